"""
Regulating E-tuples.

An E-tuple k (one positive integer per edge) is regulating when every
scaled image k_e*u_e, k_e*v_e is primitive in the sublattice G_v^(k)
generated by all scaled images at its vertex. A regulating tuple exists
iff the group has a primitive domain, iff it is residually finite.

For single-vertex groups the search is finite: after discarding edges
whose two images span the same cyclic group, any regulating tuple has
the form k = m * (1, z1/t1, z1 z2/(t1 t2), ...) with integers z_i whose
product is T = t1 ... tn, where t_i is the least positive rational with
t_i u_i in <u_{i+1}, v_{i+1}>. Signs of k_e never matter, so only
positive tuples are searched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterator, Mapping, Optional, Sequence

from .errors import (InvalidCertificate, MissingEdgeEntry, NotSingleVertex,
                     RankDeficientEdge, TooFewEdges)
from .exactlat import (Lattice2, complement, coords, det, hnf, lcm, minimal_scale,
                       parallel_ratio, torsion_degree)
from .model import (Edge, TubularGroup, is_primitive, normalize_tuple,
                    require_valid, subtubular)


@dataclass(frozen=True)
class TupleCertificate:
    """A regulating tuple with its lattices G_v^(k) and, for every
    (edge, side), the coordinates of the scaled image in G_v^(k)."""

    etuple: dict
    lattices: dict
    witnesses: dict


@dataclass(frozen=True)
class TSequence:
    order: tuple
    t: tuple
    T: Fraction


@dataclass(frozen=True)
class Regulating:
    certificate: TupleCertificate
    discarded: tuple = ()
    tseq: Optional[TSequence] = None
    z: Optional[tuple] = None


@dataclass(frozen=True)
class NoTuple:
    """Why no regulating tuple exists.

    reason is one of ``"commensurable"`` (edge's images are parallel with
    ratio other than +/-1), ``"non-integral"`` (T is not an integer) or
    ``"exhausted"`` (every candidate from the parametric form failed).
    """

    reason: str
    edge: Optional[str] = None
    ratio: Optional[Fraction] = None
    tseq: Optional[TSequence] = None
    candidates: tuple = field(default=())


def _check_tuple(G: TubularGroup, k: Mapping[str, int]):
    missing = [e for e in G.edge_ids if e not in k]
    if missing:
        raise MissingEdgeEntry(f"E-tuple has no entry for edges {missing}")


def vertex_sublattices(G: TubularGroup, k: Mapping[str, int]) -> dict[str, Lattice2]:
    """G_v^(k) for every vertex."""
    _check_tuple(G, k)
    gens = {vid: [] for vid in G.vertex_ids}
    for e in G.edges:
        gens[e.minus].append(e.u * k[e.id])
        gens[e.plus].append(e.v * k[e.id])
    return {vid: hnf(g) for vid, g in gens.items()}


def is_regulating(G: TubularGroup, k: Mapping[str, int]) -> Optional[TupleCertificate]:
    lattices = vertex_sublattices(G, k)
    witnesses = {}
    for e in G.edges:
        for side, vid, img in (("-", e.minus, e.u), ("+", e.plus, e.v)):
            c = coords(lattices[vid], img * k[e.id])
            if c is None or gcd(*c) != 1:
                return None
            witnesses[(e.id, side)] = c
    return TupleCertificate(dict(k), lattices, witnesses)


def _single_vertex(G: TubularGroup) -> str:
    require_valid(G)
    if not G.single_vertex:
        raise NotSingleVertex(f"expected one vertex, found {len(G.vertices)}")
    return G.vertex_ids[0]


def t_sequence(G: TubularGroup, order: Optional[Sequence[str]] = None) -> TSequence:
    _single_vertex(G)
    order = tuple(order or G.edge_ids)
    if len(order) < 2:
        raise TooFewEdges("t_sequence needs at least two edges")
    edges = [G.edge(e) for e in order]
    for e in edges:
        if det(e.u, e.v) == 0:
            raise RankDeficientEdge(f"edge {e.id}: <u, v> has rank 1")
    ts = []
    for i, e in enumerate(edges):
        nxt = edges[(i + 1) % len(edges)]
        ts.append(minimal_scale(hnf([nxt.u, nxt.v]), e.u))
    T = Fraction(1)
    for t in ts:
        T *= t
    return TSequence(order, tuple(ts), T)


def _divisors(n: int) -> list[int]:
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def ordered_factorizations(T: int, n: int) -> Iterator[tuple[int, ...]]:
    """All ordered n-tuples of positive integers with product T."""
    if n == 1:
        yield (T,)
        return
    for d in _divisors(T):
        for rest in ordered_factorizations(T // d, n - 1):
            yield (d,) + rest


def parametric_tuple(t: Sequence[Fraction], z: Sequence[int]) -> tuple[int, ...]:
    """Normalized (m, m z1/t1, ..., m z1..z_{n-1}/t1..t_{n-1})."""
    ratios = [Fraction(1)]
    for ti, zi in zip(t[:-1], z[:-1]):
        ratios.append(ratios[-1] * zi / ti)
    m = lcm(*(r.denominator for r in ratios))
    k = [int(r * m) for r in ratios]
    g = gcd(*k)
    return tuple(x // g for x in k)


def _extend(G: TubularGroup, k: dict[str, int], e: Edge) -> dict[str, int]:
    """Add an edge with <u_e> = <v_e> to a regulating tuple."""
    L = vertex_sublattices(subtubular(G, k), k)[e.minus]
    q = minimal_scale(L, e.u) if L.rank else None
    if q is None:
        return {**k, e.id: 1}
    m = q.denominator
    return {**{x: m * v for x, v in k.items()}, e.id: q.numerator}


def single_vertex_decide(G: TubularGroup):
    """Return Regulating(...) or NoTuple(...) for a single-vertex group."""
    _single_vertex(G)
    discarded = []
    for e in G.edges:
        r = parallel_ratio(e.u, e.v)
        if r is not None:
            if abs(r) != 1:
                return NoTuple("commensurable", edge=e.id, ratio=r)
            discarded.append(e)
    survivors = [e.id for e in G.edges if e not in discarded]
    tseq = z = None
    if len(survivors) <= 1:
        k = {e: 1 for e in survivors}
    else:
        tseq = t_sequence(G, survivors)
        if tseq.T.denominator != 1:
            return NoTuple("non-integral", tseq=tseq)
        sub = subtubular(G, survivors)
        tried = []
        for z in ordered_factorizations(int(tseq.T), len(survivors)):
            cand = parametric_tuple(tseq.t, z)
            tried.append((z, cand))
            if is_regulating(sub, dict(zip(survivors, cand))) is not None:
                k = dict(zip(survivors, cand))
                break
        else:
            return NoTuple("exhausted", tseq=tseq, candidates=tuple(tried))
    for e in discarded:
        k = _extend(G, k, e) if k else {e.id: 1}
    k = normalize_tuple({e: k[e] for e in G.edge_ids})
    cert = is_regulating(G, k)
    if cert is None:
        raise AssertionError(f"extension produced a non-regulating tuple {k}")
    return Regulating(cert, tuple(e.id for e in discarded), tseq, z)


def verify_certificate(G: TubularGroup, cert: TupleCertificate) -> list[str]:
    """Problems with a tuple certificate, recomputed from G alone."""
    problems = []
    try:
        fresh = is_regulating(G, cert.etuple)
    except MissingEdgeEntry as exc:
        return [str(exc)]
    if any(v < 1 for v in cert.etuple.values()):
        problems.append("tuple entries must be positive")
    if fresh is None:
        problems.append("tuple is not regulating")
        return problems
    if fresh.lattices != cert.lattices:
        problems.append("recorded sublattices do not match")
    for key, c in cert.witnesses.items():
        if fresh.witnesses.get(key) != tuple(c):
            problems.append(f"coordinate witness for {key} does not match")
    return problems


def primitive_domain(G: TubularGroup, cert: TupleCertificate) -> TubularGroup:
    """The primitive tubular group built from a regulating tuple; it maps
    into G by inclusion."""
    require_valid(G)
    problems = verify_certificate(G, cert)
    if problems:
        raise InvalidCertificate("; ".join(problems))
    k = cert.etuple
    vertices = []
    for vid, L in G.vertices:
        Lk = cert.lattices[vid]
        if Lk.rank == 2:
            bar = Lk
        elif Lk.rank == 1:
            w = Lk.basis[0]
            w0 = w / torsion_degree(L, w)
            bar = hnf([w, complement(L, w0)])
        else:
            bar = L
        vertices.append((vid, bar))
    edges = [Edge(e.id, e.minus, e.plus, e.u * k[e.id], e.v * k[e.id]) for e in G.edges]
    D = TubularGroup(vertices, edges)
    require_valid(D)
    if not is_primitive(D):
        raise AssertionError("primitive domain construction produced a non-primitive group")
    return D
