"""
Words in single-vertex tubular groups, Britton reduction, local
quotients G//nG and finite-quotient witnesses.

A word is a tuple of letters. ``Elt(vertex, vec)`` is an element of the
vertex group (written additively) and ``Stable(edge, exp)`` is the stable
letter t_e or its inverse. With t_e u_e t_e^-1 = v_e the pinches are

    t_e (c u_e) t_e^-1  ->  c v_e
    t_e^-1 (c v_e) t_e  ->  c u_e

for integers c. A nonempty word without pinches is nontrivial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import (ConditionViolated, InvalidParameters, MalformedWord,
                     NotPrimitive, NotSingleVertex, TrivialWord)
from .exactlat import (Vec, complement, coords, det, minimal_scale, rat_str,
                       smith_classes, smith_quotient)
from .model import TubularGroup, is_primitive, require_valid


@dataclass(frozen=True)
class Elt:
    vertex: str
    vec: Vec


@dataclass(frozen=True)
class Stable:
    edge: str
    exp: int


Letter = Union[Elt, Stable]
Word = tuple


def _vertex(G: TubularGroup) -> str:
    if not G.single_vertex:
        raise NotSingleVertex(f"words need a single-vertex group, found {len(G.vertices)} vertices")
    return G.vertex_ids[0]


# ------------------------------------------------------------ word basics

def normalize(w: Sequence[Letter]) -> Word:
    """Merge neighbouring vertex elements and drop zero ones."""
    out = []
    for x in w:
        if isinstance(x, Elt):
            if out and isinstance(out[-1], Elt):
                x = Elt(x.vertex, out.pop().vec + x.vec)
            if x.vec:
                out.append(x)
        else:
            out.append(x)
    return tuple(out)


def inverse(w: Sequence[Letter]) -> Word:
    return tuple(Elt(x.vertex, -x.vec) if isinstance(x, Elt) else Stable(x.edge, -x.exp)
                 for x in reversed(w))


def concat(*words: Sequence[Letter]) -> Word:
    return normalize([x for w in words for x in w])


def is_hyperbolic(w: Sequence[Letter]) -> bool:
    return any(isinstance(x, Stable) for x in w)


def stable_length(w: Sequence[Letter]) -> int:
    """Number of stable letters. On reduced words this depends only on
    the group element, unlike the letter count: vertex elements can slide
    across a stable letter, as in (0,1);t;(0,1) = (1,2);t when
    t(0,1)t^-1 = (1,1)."""
    return sum(1 for x in w if isinstance(x, Stable))


_VEC = re.compile(r"^\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)$")
_LETTER = re.compile(r"^([A-Za-z_][\w.-]*)(?:\^([+-]?\d+))?$")


def parse_word(G: TubularGroup, text: str) -> Word:
    """Parse ``t;(2,3);t^-1``. Empty text is the identity."""
    vid = _vertex(G)
    L = G.lattice(vid)
    letters = []
    tokens = [tok.strip() for tok in text.split(";")] if text.strip() else []
    for pos, tok in enumerate(tokens):
        m = _VEC.match(tok)
        if m:
            try:
                v = Vec(Fraction(m.group(1)), Fraction(m.group(2)))
            except (ValueError, ZeroDivisionError):
                raise MalformedWord(f"letter {pos}: bad vector {tok!r}") from None
            if coords(L, v) is None:
                raise MalformedWord(f"letter {pos}: {tok} is not in the lattice of {vid}")
            letters.append(Elt(vid, v))
            continue
        m = _LETTER.match(tok)
        if not m:
            raise MalformedWord(f"letter {pos}: cannot parse {tok!r}")
        eid, exp = m.group(1), int(m.group(2) or 1)
        if eid not in G.edge_ids:
            raise MalformedWord(f"letter {pos}: unknown edge {eid!r}")
        if exp == 0:
            raise MalformedWord(f"letter {pos}: exponent 0")
        letters.extend([Stable(eid, 1 if exp > 0 else -1)] * abs(exp))
    return normalize(letters)


def format_word(w: Sequence[Letter]) -> str:
    parts = []
    for x in w:
        if isinstance(x, Elt):
            parts.append(f"({rat_str(x.vec.x)},{rat_str(x.vec.y)})")
        else:
            parts.append(x.edge if x.exp == 1 else f"{x.edge}^-1")
    return ";".join(parts)


def check_word(G: TubularGroup, w: Sequence[Letter]) -> Word:
    """Validate letters against G and return the normalized word."""
    vid = _vertex(G)
    for pos, x in enumerate(w):
        if isinstance(x, Elt):
            if x.vertex != vid or coords(G.lattice(vid), x.vec) is None:
                raise MalformedWord(f"letter {pos}: {x!r} is not in the vertex lattice")
        elif isinstance(x, Stable):
            if x.edge not in G.edge_ids or x.exp not in (1, -1):
                raise MalformedWord(f"letter {pos}: bad stable letter {x!r}")
        else:
            raise MalformedWord(f"letter {pos}: unknown letter {x!r}")
    return normalize(w)


# ------------------------------------------------------------ reduction

def _multiple(h: Vec, gen: Vec) -> Optional[int]:
    """c with h = c*gen for an integer c, else None."""
    if det(gen, h) != 0:
        return None
    r = h.x / gen.x if gen.x else h.y / gen.y
    return int(r) if r.denominator == 1 else None


def _pinch(G: TubularGroup, opening: Stable, h: Vec) -> Optional[Vec]:
    """The vertex element replacing opening*h*opening^-1, if it is a pinch."""
    e = G.edge(opening.edge)
    src, dst = (e.u, e.v) if opening.exp == 1 else (e.v, e.u)
    c = _multiple(h, src)
    return None if c is None else dst * c


def britton_reduce(G: TubularGroup, w: Sequence[Letter]) -> Word:
    """Remove pinches until none is left (left-to-right stack pass)."""
    w = check_word(G, w)
    vid = _vertex(G)
    stack: list = []

    def push_elt(v: Vec):
        if stack and isinstance(stack[-1], Elt):
            v = stack.pop().vec + v
        if v:
            stack.append(Elt(vid, v))

    for x in w:
        if isinstance(x, Elt):
            push_elt(x.vec)
            continue
        if stack and isinstance(stack[-1], Stable) and stack[-1] == Stable(x.edge, -x.exp):
            stack.pop()
            continue
        if (len(stack) >= 2 and isinstance(stack[-1], Elt)
                and stack[-2] == Stable(x.edge, -x.exp)):
            image = _pinch(G, stack[-2], stack[-1].vec)
            if image is not None:
                stack.pop()
                stack.pop()
                push_elt(image)
                continue
        stack.append(x)
    return tuple(stack)


def is_trivial_word(G: TubularGroup, w: Sequence[Letter]) -> bool:
    return britton_reduce(G, w) == ()


def pinch_sites(G: TubularGroup, w: Word) -> list[int]:
    """Positions in a normalized word where a single pinch applies."""
    sites = []
    for i, x in enumerate(w):
        if not isinstance(x, Stable):
            continue
        closing = Stable(x.edge, -x.exp)
        if i + 1 < len(w) and w[i + 1] == closing:
            sites.append(i)
        elif (i + 2 < len(w) and isinstance(w[i + 1], Elt) and w[i + 2] == closing
              and _pinch(G, x, w[i + 1].vec) is not None):
            sites.append(i)
    return sites


def apply_pinch(G: TubularGroup, w: Word, i: int) -> Word:
    """Rewrite the pinch starting at position i and renormalize."""
    x = w[i]
    if w[i + 1] == Stable(x.edge, -x.exp):
        return normalize(w[:i] + w[i + 2:])
    image = _pinch(G, x, w[i + 1].vec)
    if image is None or w[i + 2] != Stable(x.edge, -x.exp):
        raise ValueError(f"no pinch at position {i}")
    return normalize(w[:i] + (Elt(w[i + 1].vertex, image),) + w[i + 3:])


# ------------------------------------------------------------ local quotients

@dataclass(frozen=True)
class FiniteGOG:
    """A graph of finite abelian groups: vertex groups Z/d1 x Z/d2, cyclic
    edge groups, and the classes of the edge generators at both ends."""

    vertices: dict
    edges: dict
    attaching: dict
    _classify: dict = field(default_factory=dict, compare=False, repr=False)

    def project(self, vid: str, v: Vec) -> tuple[int, int]:
        return self._classify[vid](v)

    def _reduce(self, vid, cls):
        return tuple(c % d if d else c for c, d in zip(cls, self.vertices[vid]))

    def multiples(self, vid: str, cls) -> set:
        """The cyclic subgroup generated by cls, enumerated."""
        seen, cur = set(), (0, 0)
        while cur not in seen:
            seen.add(cur)
            cur = self._reduce(vid, (cur[0] + cls[0], cur[1] + cls[1]))
        return seen

    def element_order(self, vid: str, cls) -> int:
        return len(self.multiples(vid, cls))

    def to_json(self) -> dict:
        return {
            "vertices": {v: list(d) for v, d in self.vertices.items()},
            "edges": {e: n for e, n in self.edges.items()},
            "attaching": {e: {"minus": list(a), "plus": list(b)}
                          for e, (a, b) in self.attaching.items()},
        }


def _mod_classifier(L, n):
    def classify(v: Vec) -> tuple[int, int]:
        c = coords(L, v)
        if c is None:
            raise MalformedWord(f"{v!r} is not in {L!r}")
        return (c[0] % n, c[1] % n)
    return classify


def _check_injective(Q: FiniteGOG, G: TubularGroup):
    for e in G.edges:
        for vid, cls in ((e.minus, Q.attaching[e.id][0]), (e.plus, Q.attaching[e.id][1])):
            if Q.element_order(vid, cls) != Q.edges[e.id]:
                raise AssertionError(f"edge {e.id} does not inject into vertex {vid}")


def local_quotient(G: TubularGroup, n: int) -> FiniteGOG:
    """G // nG: every vertex group becomes (Z/n)^2 and every edge Z/n."""
    require_valid(G)
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise InvalidParameters(f"modulus must be an integer >= 2, got {n!r}")
    if not is_primitive(G):
        raise NotPrimitive("local quotients by nG need a primitive group")
    classify = {vid: _mod_classifier(L, n) for vid, L in G.vertices}
    Q = FiniteGOG(
        {vid: (n, n) for vid in G.vertex_ids},
        {e.id: n for e in G.edges},
        {e.id: (classify[e.minus](e.u), classify[e.plus](e.v)) for e in G.edges},
        classify,
    )
    _check_injective(Q, G)
    return Q


def local_quotient_general(G: TubularGroup, sub: TubularGroup) -> FiniteGOG:
    """G // G' for a group G' on the same graph with G'_v inside G_v and
    edge images c_e*u_e, c_e*v_e (c_e a nonzero integer).

    Requires <c_e u_e> = <u_e> meet G'_v at both ends of every edge.
    """
    require_valid(G)
    require_valid(sub)
    if sub.vertex_ids != G.vertex_ids or sub.edge_ids != G.edge_ids:
        raise ConditionViolated("the two groups must share vertex and edge ids")
    for vid, L in G.vertices:
        if any(coords(L, b) is None for b in sub.lattice(vid).basis):
            raise ConditionViolated(f"vertex {vid}: sublattice is not contained in G_v")
    orders, attaching = {}, {}
    classes = {vid: smith_classes(L, sub.lattice(vid)) for vid, L in G.vertices}
    for e in G.edges:
        f = sub.edge(e.id)
        if (f.minus, f.plus) != (e.minus, e.plus):
            raise ConditionViolated(f"edge {e.id}: endpoints differ")
        c = _multiple(f.u, e.u)
        if c is None or c == 0 or f.v != e.v * c:
            raise ConditionViolated(f"edge {e.id}: images are not a common integer multiple")
        for vid, img in ((e.minus, e.u), (e.plus, e.v)):
            m = minimal_scale(sub.lattice(vid), img)
            if m is None or m.numerator != abs(c):
                raise ConditionViolated(
                    f"edge {e.id}: <{abs(c)} x image> differs from its intersection with G'_{vid}")
        orders[e.id] = abs(c)
        attaching[e.id] = (classes[e.minus][1](e.u), classes[e.plus][1](e.v))
    Q = FiniteGOG(
        {vid: smith_quotient(L, sub.lattice(vid)) for vid, L in G.vertices},
        orders, attaching, {vid: cl[1] for vid, cl in classes.items()},
    )
    _check_injective(Q, G)
    return Q


# ------------------------------------------------------------ witnesses

@dataclass(frozen=True)
class Backtrack:
    """A potential backtrack t^e h t^-e of a reduced word: h written as
    a*generator + q*complement."""

    position: int
    edge: str
    exp: int
    h: Vec
    generator: Vec
    complement: Vec
    q: int


@dataclass(frozen=True)
class WitnessRecord:
    n: int
    reduced: Word
    backtracks: tuple
    elliptic: Optional[tuple] = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "reduced_word": format_word(self.reduced),
            "elliptic_coords": None if self.elliptic is None else list(self.elliptic),
            "backtrack_table": [{
                "position": b.position,
                "edge": b.edge,
                "exponent": b.exp,
                "h": b.h.to_json(),
                "generator": b.generator.to_json(),
                "complement": b.complement.to_json(),
                "q": b.q,
            } for b in self.backtracks],
        }


def potential_backtracks(G: TubularGroup, w: Word) -> list[Backtrack]:
    """Every subword t^e h t^-e of a reduced word, with h's coordinate
    along the complement of the relevant edge generator."""
    L = G.lattice(_vertex(G))
    out = []
    for i in range(len(w) - 2):
        a, h, b = w[i:i + 3]
        if not (isinstance(a, Stable) and isinstance(h, Elt) and b == Stable(a.edge, -a.exp)):
            continue
        e = G.edge(a.edge)
        gen = e.u if a.exp == 1 else e.v
        c = complement(L, gen)
        # h = x*c + y*gen, so det(h, gen) = x*det(c, gen)
        q = det(h.vec, gen) / det(c, gen)
        out.append(Backtrack(i, a.edge, a.exp, h.vec, gen, c, int(q)))
    return out


def witness_modulus(G: TubularGroup, w: Sequence[Letter]) -> WitnessRecord:
    """An n for which w survives in the local quotient G // nG."""
    vid = _vertex(G)
    require_valid(G)
    if not is_primitive(G):
        raise NotPrimitive("witnesses need a primitive group")
    red = britton_reduce(G, w)
    if not red:
        raise TrivialWord("the word reduces to the identity")
    if not is_hyperbolic(red):
        p, q = coords(G.lattice(vid), red[0].vec)
        return WitnessRecord(max(abs(p), abs(q)) + 1, red, (), (p, q))
    table = potential_backtracks(G, red)
    n = max([2] + [abs(b.q) + 1 for b in table])
    return WitnessRecord(n, red, tuple(table))


def check_modulus(G: TubularGroup, w: Sequence[Letter], n: int) -> list[str]:
    """Problems with n as a witness for w, judged inside G // nG by
    enumerating edge subgroups. Empty list means the criterion holds."""
    vid = _vertex(G)
    Q = local_quotient(G, n)
    red = britton_reduce(G, w)
    if not red:
        return ["the word reduces to the identity"]
    if not is_hyperbolic(red):
        cls = Q.project(vid, red[0].vec)
        return [] if cls != (0, 0) else [f"vertex element {format_word(red)} vanishes mod {n}"]
    problems = []
    for b in potential_backtracks(G, red):
        e = G.edge(b.edge)
        gen_cls = Q.attaching[e.id][0 if b.exp == 1 else 1]
        if Q.project(vid, b.h) in Q.multiples(vid, gen_cls):
            problems.append(f"backtrack at {b.position} collapses mod {n}")
    return problems

