"""
Exact rational arithmetic on Q^2 and subgroups of Q^2 of rank at most 2.

Every lattice is kept in a canonical Hermite form, so two ``Lattice2``
values compare equal exactly when they are the same subgroup of Q^2.
Rational lattices are handled by clearing denominators, running an
integer Hermite reduction, and dividing back.

Nothing here uses floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import NotInLattice, NotSublattice, ZeroVector

__all__ = [
    "Vec", "vec", "Lattice2", "hnf", "ZZ2", "coords", "rational_coords",
    "is_primitive_in", "minimal_scale", "torsion_degree", "parallel_ratio",
    "intersection_number", "det", "smith_quotient", "smith_classes",
    "complement", "rat", "rat_str", "xgcd", "lcm",
]


def rat(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rat_str(q: Fraction) -> str:
    """Serialize a rational as ``"p/q"``, or ``"p"`` when q = 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def lcm(*values: int) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b) if a and b else 0, values, 1)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True, slots=True)
class Vec:
    """An element of Q^2."""

    x: Fraction
    y: Fraction

    def __add__(self, other: Vec) -> Vec:
        return Vec(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec) -> Vec:
        return Vec(self.x - other.x, self.y - other.y)

    def __neg__(self) -> Vec:
        return Vec(-self.x, -self.y)

    def __mul__(self, scalar) -> Vec:
        s = rat(scalar)
        return Vec(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> Vec:
        s = rat(scalar)
        return Vec(self.x / s, self.y / s)

    def __iter__(self):
        yield self.x
        yield self.y

    def __bool__(self) -> bool:
        return bool(self.x) or bool(self.y)

    def __repr__(self) -> str:
        return f"({rat_str(self.x)},{rat_str(self.y)})"

    def sign_normalized(self) -> Vec:
        """Return +/- self, whichever has positive first nonzero coordinate."""
        if self.x < 0 or (self.x == 0 and self.y < 0):
            return -self
        return self

    def to_json(self) -> list[str]:
        return [rat_str(self.x), rat_str(self.y)]


def vec(x, y) -> Vec:
    return Vec(rat(x), rat(y))


def det(u: Vec, v: Vec) -> Fraction:
    return u.x * v.y - u.y * v.x


@dataclass(frozen=True, slots=True)
class Lattice2:
    """A finitely generated subgroup of Q^2 in canonical form.

    Build instances with :func:`hnf`; the constructor trusts its input.
    Rank 2 bases are ``((a1, a2), (0, a3))`` with ``a1, a3 > 0`` and
    ``0 <= a2 < a3``; a rank 1 basis is its generator with positive first
    nonzero coordinate.
    """

    basis: tuple[Vec, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def covolume(self) -> Fraction:
        """Area of a fundamental domain (rank 2 only)."""
        if self.rank != 2:
            raise ValueError("covolume is defined for rank 2 lattices only")
        return self.basis[0].x * self.basis[1].y

    def __contains__(self, v: Vec) -> bool:
        return coords(self, v) is not None

    def scaled(self, alpha) -> Lattice2:
        return hnf([b * alpha for b in self.basis])

    def __repr__(self) -> str:
        return "<" + ",".join(repr(b) for b in self.basis) + ">"

    def to_json(self) -> list[list[str]]:
        return [b.to_json() for b in self.basis]


def _int_hnf(rows: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    pivot = None
    g2 = 0
    for r0, r1 in rows:
        if r0 == 0:
            g2 = gcd(g2, r1)
        elif pivot is None:
            pivot = (r0, r1)
        else:
            p0, p1 = pivot
            g, s, t = xgcd(p0, r0)
            pivot = (g, s * p1 + t * r1)
            # the complementary unimodular row has a zero first entry
            g2 = gcd(g2, (r0 // g) * p1 - (p0 // g) * r1)
    if pivot is None:
        return [(0, g2)] if g2 else []
    p0, p1 = pivot
    if p0 < 0:
        p0, p1 = -p0, -p1
    if g2 == 0:
        return [(p0, p1)]
    return [(p0, p1 % g2), (0, g2)]


def hnf(generators: Iterable[Vec]) -> Lattice2:
    """Canonical form of the subgroup of Q^2 generated by ``generators``."""
    gens = [g for g in generators if g]
    if not gens:
        return Lattice2(())
    scale = lcm(*(c.denominator for g in gens for c in g))
    rows = [(int(g.x * scale), int(g.y * scale)) for g in gens]
    basis = tuple(Vec(Fraction(a, scale), Fraction(b, scale)) for a, b in _int_hnf(rows))
    return Lattice2(basis)


ZZ2 = hnf([vec(1, 0), vec(0, 1)])


def rational_coords(L: Lattice2, v: Vec) -> Optional[tuple[Fraction, Fraction]]:
    """Coordinates of ``v`` in the Q-span of L's basis; rank 1 pads with 0."""
    if L.rank == 2:
        (a1, a2), (_, a3) = L.basis
        c1 = v.x / a1
        return c1, (v.y - c1 * a2) / a3
    if L.rank == 1:
        b = L.basis[0]
        if det(b, v) != 0:
            return None
        c = v.x / b.x if b.x else v.y / b.y
        return c, Fraction(0)
    return (Fraction(0), Fraction(0)) if not v else None


def coords(L: Lattice2, v: Vec) -> Optional[tuple[int, int]]:
    """Integer coordinates of ``v`` in L's basis, or None if v is not in L."""
    rc = rational_coords(L, v)
    if rc is None or rc[0].denominator != 1 or rc[1].denominator != 1:
        return None
    return int(rc[0]), int(rc[1])


def _require_member(L: Lattice2, v: Vec) -> tuple[int, int]:
    if not v:
        raise ZeroVector("expected a nonzero vector")
    c = coords(L, v)
    if c is None:
        raise NotInLattice(f"{v!r} is not in {L!r}")
    return c


def torsion_degree(L: Lattice2, w: Vec) -> int:
    """Largest d such that w/d lies in L."""
    c1, c2 = _require_member(L, w)
    return gcd(c1, c2)


def is_primitive_in(L: Lattice2, v: Vec) -> bool:
    return torsion_degree(L, v) == 1


def _rat_gcd(values: Sequence[Fraction]) -> Fraction:
    nums = [q.numerator for q in values if q]
    dens = [q.denominator for q in values if q]
    return Fraction(gcd(*nums), lcm(*dens))


def minimal_scale(L: Lattice2, u: Vec) -> Optional[Fraction]:
    """Smallest positive t with t*u in L; None when u is outside span_Q(L)."""
    if not u:
        raise ZeroVector("minimal_scale of the zero vector")
    rc = rational_coords(L, u)
    if rc is None:
        return None
    return 1 / _rat_gcd(rc)


def parallel_ratio(u: Vec, v: Vec) -> Optional[Fraction]:
    """The q with v = q*u, if u and v are parallel."""
    if not u or not v:
        raise ZeroVector("parallel_ratio needs nonzero vectors")
    if det(u, v) != 0:
        return None
    return v.x / u.x if u.x else v.y / u.y


def intersection_number(u: Vec, v: Vec) -> Fraction:
    return abs(det(u, v))


def smith_form(rows: list[list[int]], ncols: int) -> tuple[list[int], list[list[int]]]:
    """Smith normal form of an integer matrix, tracking column operations.

    Returns ``(diag, Q)`` where ``diag`` has ``ncols`` nonnegative entries
    with each dividing the next (zeros last) and ``Q`` is unimodular with
    rowspace(rows) * Q = rowspace(diag).
    """
    A = [list(r) for r in rows if any(r)]
    Q = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def col_op(dst, src, k):
        # column dst += k * column src
        for r in A:
            r[dst] += k * r[src]
        for r in Q:
            r[dst] += k * r[src]

    def col_swap(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in Q:
            r[i], r[j] = r[j], r[i]

    diag = []
    for k in range(ncols):
        sub = [r for r in A if any(r[k:])]
        if not sub:
            diag.extend([0] * (ncols - k))
            break
        while True:
            # move the smallest nonzero entry of the remaining block to (k, k)
            _, i, j = min((abs(r[c]), i, c) for i, r in enumerate(A) for c in range(k, ncols) if r[c])
            A[k], A[i] = A[i], A[k]
            if j != k:
                col_swap(k, j)
            p = A[k][k]
            done = True
            for r in A[k + 1:]:
                q = r[k] // p
                if q:
                    for c in range(ncols):
                        r[c] -= q * A[k][c]
                done = done and r[k] == 0
            for c in range(k + 1, ncols):
                q = A[k][c] // p
                if q:
                    col_op(c, k, -q)
                done = done and A[k][c] == 0
            if not done:
                continue
            bad = next(((r, c) for r in A[k + 1:] for c in range(k + 1, ncols) if r[c] % p), None)
            if bad is None:
                break
            # fold a row carrying a non-multiple into row k and repeat
            r, _ = bad
            for c in range(ncols):
                A[k][c] += r[c]
        if A[k][k] < 0:
            A[k] = [-a for a in A[k]]
        diag.append(A[k][k])
        A = A[:k + 1] + [r for r in A[k + 1:] if any(r)]
    return diag, Q


def _coord_rows(sup: Lattice2, sub: Lattice2) -> list[list[int]]:
    rows = []
    for b in sub.basis:
        c = coords(sup, b)
        if c is None:
            raise NotSublattice(f"{b!r} is not in {sup!r}")
        rows.append(list(c[:sup.rank]))
    if sup.rank and sub.rank:
        # cheap rejection: covolume ratio must be a positive integer
        if sup.rank == 2 and sub.rank == 2 and (sub.covolume / sup.covolume).denominator != 1:
            raise NotSublattice("covolume ratio is not an integer")
    return rows


def smith_quotient(sup: Lattice2, sub: Lattice2) -> tuple[int, int]:
    """Invariant factors (d1, d2) of sup/sub, with 0 for an infinite factor."""
    rows = _coord_rows(sup, sub)
    if sup.rank == 0:
        return (1, 1)
    diag, _ = smith_form(rows, sup.rank)
    if sup.rank == 1:
        return (1, diag[0])
    return (diag[0], diag[1])


def smith_classes(sup: Lattice2, sub: Lattice2):
    """Return (factors, classify) where classify maps v in sup to its class
    in Z/d1 x Z/d2 (a factor 0 leaves that coordinate unreduced)."""
    rows = _coord_rows(sup, sub)
    if sup.rank != 2:
        raise ValueError("smith_classes expects a rank 2 ambient lattice")
    diag, Q = smith_form(rows, 2)

    def classify(v: Vec) -> tuple[int, int]:
        c = coords(sup, v)
        if c is None:
            raise NotInLattice(f"{v!r} is not in {sup!r}")
        y = [c[0] * Q[0][j] + c[1] * Q[1][j] for j in range(2)]
        return tuple(yj % d if d else yj for yj, d in zip(y, diag))

    return (diag[0], diag[1]), classify


def complement(L: Lattice2, w: Vec) -> Vec:
    """A vector c with (c, w) a positively oriented basis of L.

    ``w`` must be primitive in the rank 2 lattice L. Among all such c the
    shortest is returned (ties broken towards the smaller shift).
    """
    if L.rank != 2:
        raise ValueError("complement needs a rank 2 lattice")
    a, b = _require_member(L, w)
    g, s, t = xgcd(a, b)
    if g != 1:
        raise NotInLattice(f"{w!r} is not primitive in {L!r}")
    b1, b2 = L.basis
    c = b1 * t - b2 * s
    # c - j*w keeps the basis property; choose j nearest the projection
    proj = (c.x * w.x + c.y * w.y) / (w.x * w.x + w.y * w.y)
    j = round(proj)
    return c - w * j
