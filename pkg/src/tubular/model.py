"""
Tubular groups as data: a connected directed multigraph whose vertices
carry rank 2 lattices in Q^2 and whose edges carry a pair of images.

Convention: the stable letter ``t_e`` of edge ``e`` satisfies
``t_e u_e t_e^-1 = v_e`` where ``u_e`` (``minus`` image) lives in the
vertex ``minus`` and ``v_e`` (``plus`` image) lives in ``plus``.
Edges are stored with ``u_e`` sign-normalized (first nonzero coordinate
positive); flipping both images does not change the group.
"""

from __future__ import annotations

import json
from itertools import combinations
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Optional

from .errors import (DisconnectedSubgraph, DocumentSyntaxError, EmptySelection,
                     InvalidGroup, InvalidParameters, SemanticError, ZeroScalar)
from .exactlat import ZZ2, Lattice2, Vec, coords, hnf, rat, vec

__all__ = [
    "Edge", "TubularGroup", "validate", "require_valid", "is_primitive",
    "snowflake", "scale", "subtubular", "connected_edge_subsets",
    "group_to_json", "group_from_json", "dumps", "loads",
    "normalize_tuple", "tuple_to_json", "tuple_from_json", "parse_vector",
    "group_canonical_key",
]


@dataclass(frozen=True)
class Edge:
    id: str
    minus: str
    plus: str
    u: Vec
    v: Vec

    def __post_init__(self):
        lead = self.u if self.u else self.v
        if lead and lead.sign_normalized() != lead:
            object.__setattr__(self, "u", -self.u)
            object.__setattr__(self, "v", -self.v)


@dataclass(frozen=True)
class TubularGroup:
    vertices: tuple[tuple[str, Lattice2], ...]
    edges: tuple[Edge, ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "_index", {
            "v": dict(self.vertices),
            "e": {e.id: e for e in self.edges},
        })

    @property
    def vertex_ids(self) -> list[str]:
        return [v for v, _ in self.vertices]

    @property
    def edge_ids(self) -> list[str]:
        return [e.id for e in self.edges]

    def lattice(self, vid: str) -> Lattice2:
        return self._index["v"][vid]

    def edge(self, eid: str) -> Edge:
        return self._index["e"][eid]

    def has_vertex(self, vid: str) -> bool:
        return vid in self._index["v"]

    @property
    def single_vertex(self) -> bool:
        return len(self.vertices) == 1

    def ends(self, vid: str) -> list[tuple[str, str, Vec]]:
        """Edge images living in vertex ``vid`` as (edge id, side, vector)."""
        out = []
        for e in self.edges:
            if e.minus == vid:
                out.append((e.id, "-", e.u))
            if e.plus == vid:
                out.append((e.id, "+", e.v))
        return out

    def replace(self, vertices=None, edges=None) -> TubularGroup:
        return TubularGroup(self.vertices if vertices is None else vertices,
                            self.edges if edges is None else edges)

    def __repr__(self) -> str:
        vs = ", ".join(f"{v}:{L!r}" for v, L in self.vertices)
        es = ", ".join(f"{e.id}:{e.minus}{e.u!r}->{e.plus}{e.v!r}" for e in self.edges)
        return f"TubularGroup([{vs}] | {es})"


def _components(vertex_ids: Iterable[str], edges: Iterable[Edge]) -> int:
    parent = {v: v for v in vertex_ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        if e.minus in parent and e.plus in parent:
            parent[find(e.minus)] = find(e.plus)
    return len({find(v) for v in parent})


def validate(G: TubularGroup) -> list[str]:
    """Every violated invariant of G, as human-readable strings."""
    problems = []
    seen = set()
    for vid, L in G.vertices:
        if vid in seen:
            problems.append(f"vertex {vid}: duplicate id")
        seen.add(vid)
        if L.rank != 2:
            problems.append(f"vertex {vid}: lattice has rank {L.rank}, expected 2")
    if not G.vertices:
        problems.append("graph has no vertices")
    seen_e = set()
    for e in G.edges:
        if e.id in seen_e:
            problems.append(f"edge {e.id}: duplicate id")
        seen_e.add(e.id)
        for side, vid, img in (("minus", e.minus, e.u), ("plus", e.plus, e.v)):
            if not G.has_vertex(vid):
                problems.append(f"edge {e.id}: unknown {side} vertex {vid}")
                continue
            if not img:
                problems.append(f"edge {e.id}: {side} image is zero")
            elif coords(G.lattice(vid), img) is None:
                problems.append(f"edge {e.id}: {side} image {img!r} not in lattice of {vid}")
    if G.vertices and _components(G.vertex_ids, G.edges) != 1:
        problems.append("underlying graph is disconnected")
    return problems


def require_valid(G: TubularGroup) -> TubularGroup:
    problems = validate(G)
    if problems:
        raise InvalidGroup(problems)
    return G


def is_primitive(G: TubularGroup) -> bool:
    """True iff every edge image is primitive in its vertex lattice."""
    for e in G.edges:
        for vid, img in ((e.minus, e.u), (e.plus, e.v)):
            c = coords(G.lattice(vid), img)
            if c is None or gcd(*c) != 1:
                return False
    return True


def snowflake(p: int, q: int) -> TubularGroup:
    """<Z^2, s, t | (q,0)^s = (p,1), (q,0)^t = (p,-1)> for p >= q >= 1."""
    if q < 1 or p < q:
        raise InvalidParameters(f"snowflake needs p >= q >= 1, got p={p}, q={q}")
    return TubularGroup(
        [("v", ZZ2)],
        [Edge("s", "v", "v", vec(q, 0), vec(p, 1)),
         Edge("t", "v", "v", vec(q, 0), vec(p, -1))],
    )


def scale(G: TubularGroup, alpha) -> TubularGroup:
    alpha = rat(alpha)
    if alpha == 0:
        raise ZeroScalar("cannot scale a tubular group by 0")
    return TubularGroup(
        [(vid, L.scaled(alpha)) for vid, L in G.vertices],
        [Edge(e.id, e.minus, e.plus, e.u * alpha, e.v * alpha) for e in G.edges],
    )


def subtubular(G: TubularGroup, edge_subset: Iterable[str]) -> TubularGroup:
    chosen = set(edge_subset)
    if not chosen:
        raise EmptySelection("no edges selected")
    unknown = chosen - set(G.edge_ids)
    if unknown:
        raise SemanticError(f"unknown edge ids {sorted(unknown)}")
    edges = [e for e in G.edges if e.id in chosen]
    used = {e.minus for e in edges} | {e.plus for e in edges}
    vertices = [(vid, L) for vid, L in G.vertices if vid in used]
    if _components([v for v, _ in vertices], edges) != 1:
        raise DisconnectedSubgraph(f"edges {sorted(chosen)} do not span a connected subgraph")
    return TubularGroup(vertices, edges)


def connected_edge_subsets(G: TubularGroup, proper: bool = True) -> list[tuple[str, ...]]:
    """All edge subsets spanning a connected subgraph, smallest first,
    in document order within each size."""
    ids = G.edge_ids
    out = []
    top = len(ids) - 1 if proper else len(ids)
    for size in range(1, top + 1):
        for combo in combinations(ids, size):
            edges = [G.edge(e) for e in combo]
            used = {e.minus for e in edges} | {e.plus for e in edges}
            if _components(used, edges) == 1:
                out.append(combo)
    return out


# ---------------------------------------------------------------- JSON I/O

def group_to_json(G: TubularGroup) -> dict:
    return {
        "vertices": [{"id": vid, "basis": L.to_json()} for vid, L in G.vertices],
        "edges": [{"id": e.id, "minus": e.minus, "plus": e.plus,
                   "u": e.u.to_json(), "v": e.v.to_json()} for e in G.edges],
    }


def _rational(value, where) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise DocumentSyntaxError(f"expected a rational string, got {value!r}", where)
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise DocumentSyntaxError(f"bad rational {value!r}", where) from None


def parse_vector(value, where="vector") -> Vec:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise DocumentSyntaxError(f"expected a two-element array, got {value!r}", where)
    return Vec(_rational(value[0], f"{where}[0]"), _rational(value[1], f"{where}[1]"))


def _expect(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise DocumentSyntaxError(f"missing key {key!r}", where)
    if not isinstance(obj[key], kind):
        raise DocumentSyntaxError(f"key {key!r} has the wrong type", f"{where}.{key}")
    return obj[key]


def group_from_json(doc, check: bool = True) -> TubularGroup:
    """Build a group from its JSON object. Raises DocumentSyntaxError for
    shape problems and SemanticError when the result fails validation."""
    if not isinstance(doc, dict):
        raise DocumentSyntaxError("group document must be an object", "$")
    vertices = []
    for i, v in enumerate(_expect(doc, "vertices", list, "$")):
        where = f"$.vertices[{i}]"
        vid = _expect(v, "id", str, where)
        if "basis" in v:
            basis = v["basis"]
            if not isinstance(basis, list):
                raise DocumentSyntaxError("basis must be an array", f"{where}.basis")
            L = hnf(parse_vector(b, f"{where}.basis[{j}]") for j, b in enumerate(basis))
        else:
            L = ZZ2
        vertices.append((vid, L))
    edges = []
    for i, e in enumerate(_expect(doc, "edges", list, "$")):
        where = f"$.edges[{i}]"
        edges.append(Edge(
            _expect(e, "id", str, where),
            _expect(e, "minus", str, where),
            _expect(e, "plus", str, where),
            parse_vector(_expect(e, "u", list, where), f"{where}.u"),
            parse_vector(_expect(e, "v", list, where), f"{where}.v"),
        ))
    G = TubularGroup(vertices, edges)
    if check:
        problems = validate(G)
        if problems:
            raise SemanticError("; ".join(problems))
    return G


def dumps(obj: dict) -> str:
    """Deterministic JSON text used for every emitted document."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None


# ---------------------------------------------------------------- E-tuples

def normalize_tuple(k: Mapping[str, int]) -> dict[str, int]:
    """Divide a positive E-tuple by the gcd of its entries."""
    g = gcd(*k.values()) if k else 1
    return {e: v // g for e, v in k.items()} if g else dict(k)


def tuple_to_json(k: Mapping[str, int]) -> dict[str, str]:
    return {e: str(v) for e, v in k.items()}


def tuple_from_json(doc, edge_ids: Optional[Iterable[str]] = None) -> dict[str, int]:
    if not isinstance(doc, dict):
        raise DocumentSyntaxError("E-tuple must be an object", "$")
    out = {}
    for e, v in doc.items():
        q = _rational(v, f"$.{e}")
        if q.denominator != 1 or q < 1:
            raise SemanticError(f"E-tuple entry {e}={v} is not a positive integer")
        out[e] = int(q)
    if edge_ids is not None:
        unknown = set(out) - set(edge_ids)
        if unknown:
            raise SemanticError(f"E-tuple names unknown edges {sorted(unknown)}")
    return out


def group_canonical_key(G: TubularGroup) -> str:
    """Hashable canonical text for exact equality checks."""
    return json.dumps(group_to_json(G), separators=(",", ":"))

