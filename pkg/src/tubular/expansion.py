"""
Expansion morphisms, expansion sequences and rigid isomorphism search.

The expansion of G divides every edge group by its edge degree
``d_e = lcm(d_e^-, d_e^+)`` and enlarges each vertex lattice by the
divided images. Iterating gives the expansion sequence; it either
reaches a primitive group (residually finite) or, if some later term is
rigidly isomorphic to an earlier one, recurs (not residually finite).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from .errors import NotSingleVertex
from .exactlat import (Lattice2, Vec, complement, det, hnf, intersection_number,
                       lcm, parallel_ratio, rat_str, torsion_degree)
from .model import (Edge, TubularGroup, connected_edge_subsets, is_primitive,
                    require_valid, subtubular)

DEFAULT_BUDGET = 64

Mat = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


class EdgeDegree(NamedTuple):
    minus: int
    plus: int
    lcm: int


def edge_degrees(G: TubularGroup) -> dict[str, EdgeDegree]:
    require_valid(G)
    out = {}
    for e in G.edges:
        dm = torsion_degree(G.lattice(e.minus), e.u)
        dp = torsion_degree(G.lattice(e.plus), e.v)
        out[e.id] = EdgeDegree(dm, dp, lcm(dm, dp))
    return out


def expand(G: TubularGroup) -> tuple[TubularGroup, bool]:
    """One expansion step. Returns (G', trivial); trivial means G' is G."""
    degrees = edge_degrees(G)
    if all(d.lcm == 1 for d in degrees.values()):
        return G, True
    edges = [Edge(e.id, e.minus, e.plus, e.u / degrees[e.id].lcm, e.v / degrees[e.id].lcm)
             for e in G.edges]
    extra = {vid: list(L.basis) for vid, L in G.vertices}
    for e in edges:
        extra[e.minus].append(e.u)
        extra[e.plus].append(e.v)
    vertices = [(vid, hnf(extra[vid])) for vid, _ in G.vertices]
    return TubularGroup(vertices, edges), False


# ------------------------------------------------------------ 2x2 matrices

def mat_apply(M: Mat, v: Vec) -> Vec:
    return Vec(M[0][0] * v.x + M[0][1] * v.y, M[1][0] * v.x + M[1][1] * v.y)


def mat_det(M: Mat) -> Fraction:
    return M[0][0] * M[1][1] - M[0][1] * M[1][0]


def mat_inv(M: Mat) -> Mat:
    d = mat_det(M)
    return ((M[1][1] / d, -M[0][1] / d), (-M[1][0] / d, M[0][0] / d))


def mat_from_columns(c1: Vec, c2: Vec) -> Mat:
    return ((c1.x, c2.x), (c1.y, c2.y))


def mat_mul(A: Mat, B: Mat) -> Mat:
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2))
                 for i in range(2))


def scalar_mat(s) -> Mat:
    s = Fraction(s)
    return ((s, Fraction(0)), (Fraction(0), s))


def _solve(pairs: list[tuple[Vec, Vec]]) -> Optional[Mat]:
    """The matrix sending two independent sources to their targets."""
    for i, (s1, t1) in enumerate(pairs):
        for s2, t2 in pairs[i + 1:]:
            if det(s1, s2):
                return mat_mul(mat_from_columns(t1, t2), mat_inv(mat_from_columns(s1, s2)))
    return None


# ------------------------------------------------------------ rigid isos

@dataclass(frozen=True)
class RigidIso:
    """Data-level rigid isomorphism A -> B.

    ``edge_map[e] = (f, reversed, sign)``: edge e goes to f, with its
    orientation reversed or not, and generator g_e sent to sign * g_f.
    ``matrices[v]`` acts on column vectors of the lattice at v.
    """

    vertex_map: dict
    edge_map: dict
    matrices: dict

    def inverse(self) -> RigidIso:
        return RigidIso(
            {b: a for a, b in self.vertex_map.items()},
            {f: (e, r, s) for e, (f, r, s) in self.edge_map.items()},
            {self.vertex_map[v]: mat_inv(M) for v, M in self.matrices.items()},
        )

    def scalar(self) -> Optional[Fraction]:
        """The common scalar if every vertex matrix is the same multiple of I."""
        scalars = set()
        for M in self.matrices.values():
            if M[0][1] or M[1][0] or M[0][0] != M[1][1]:
                return None
            scalars.add(M[0][0])
        return scalars.pop() if len(scalars) == 1 else None


def _edge_targets(e: Edge, f: Edge, reversed_: bool, sign: int):
    """(source vertex, target vertex, source image, target image) for both ends."""
    if not reversed_:
        return [(e.minus, f.minus, e.u, f.u * sign), (e.plus, f.plus, e.v, f.v * sign)]
    return [(e.minus, f.plus, e.u, f.v * sign), (e.plus, f.minus, e.v, f.u * sign)]


def verify_rigid_iso(A: TubularGroup, B: TubularGroup, iso: RigidIso) -> list[str]:
    """Every way in which ``iso`` fails to be a rigid isomorphism A -> B."""
    problems = []
    if sorted(iso.vertex_map) != sorted(A.vertex_ids) or \
            sorted(iso.vertex_map.values()) != sorted(B.vertex_ids):
        problems.append("vertex map is not a bijection")
        return problems
    if sorted(iso.edge_map) != sorted(A.edge_ids) or \
            sorted(f for f, _, _ in iso.edge_map.values()) != sorted(B.edge_ids):
        problems.append("edge map is not a bijection")
        return problems
    for v, L in A.vertices:
        M = iso.matrices.get(v)
        if M is None or mat_det(M) == 0:
            problems.append(f"vertex {v}: missing or singular matrix")
            continue
        image = hnf(mat_apply(M, b) for b in L.basis)
        if image != B.lattice(iso.vertex_map[v]):
            problems.append(f"vertex {v}: lattice image {image!r} != {B.lattice(iso.vertex_map[v])!r}")
    if problems:
        return problems
    for e in A.edges:
        f_id, rev, sign = iso.edge_map[e.id]
        if sign not in (1, -1):
            problems.append(f"edge {e.id}: sign must be +1 or -1")
            continue
        for sv, tv, src, tgt in _edge_targets(e, B.edge(f_id), rev, sign):
            if iso.vertex_map[sv] != tv:
                problems.append(f"edge {e.id}: incidence not preserved")
            elif mat_apply(iso.matrices[sv], src) != tgt:
                problems.append(f"edge {e.id}: image {src!r} does not map to {tgt!r}")
    return problems


def vertex_signature(G: TubularGroup, vid: str) -> tuple:
    """GL_2(Z)-invariant data of a vertex, normalized by its covolume."""
    cov = G.lattice(vid).covolume
    ends = [img for _, _, img in G.ends(vid)]
    pairs = sorted(intersection_number(a, b) / cov
                   for i, a in enumerate(ends) for b in ends[i + 1:])
    loops = sorted(intersection_number(e.u, e.v) / cov
                   for e in G.edges if e.minus == vid and e.plus == vid)
    return (len(ends), tuple(loops), tuple(pairs))


def group_signature(G: TubularGroup) -> tuple:
    loops = sum(1 for e in G.edges if e.minus == e.plus)
    return (len(G.vertices), len(G.edges), loops,
            tuple(sorted(vertex_signature(G, v) for v in G.vertex_ids)))


def iso_obstruction(A: TubularGroup, B: TubularGroup) -> Optional[str]:
    """A reason A and B cannot be rigidly isomorphic, from cheap invariants."""
    sa, sb = group_signature(A), group_signature(B)
    if sa[:3] != sb[:3]:
        return f"graph shapes differ: (vertices, edges, loops) {sa[:3]} vs {sb[:3]}"
    if sa[3] != sb[3]:
        return ("normalized unsigned intersection numbers differ: "
                f"{_fmt_sig(sa[3])} vs {_fmt_sig(sb[3])}")
    return None


def _fmt_sig(sig) -> str:
    return "; ".join("loops [" + ",".join(rat_str(x) for x in loops) + "] pairs [" +
                     ",".join(rat_str(x) for x in pairs) + "]" for _, loops, pairs in sig)


def _line_completion(LA: Lattice2, LB: Lattice2, src: Vec, tgt: Vec) -> Optional[Mat]:
    """Matrix sending LA onto LB with src -> tgt, when all constraints at a
    vertex are parallel. Any completion works, so the choice is canonical."""
    d = torsion_degree(LA, src)
    a1, b1 = src / d, tgt / d
    try:
        if torsion_degree(LB, b1) != 1:
            return None
    except ValueError:
        return None
    a2, b2 = complement(LA, a1), complement(LB, b1)
    # complement() orients (c, w) positively; keep orientation consistent
    return mat_mul(mat_from_columns(b1, b2), mat_inv(mat_from_columns(a1, a2)))


def _vertex_consistent(pairs: list[tuple[Vec, Vec]], LA: Lattice2, LB: Lattice2) -> bool:
    M = _solve(pairs)
    if M is not None:
        if mat_det(M) == 0 or any(mat_apply(M, s) != t for s, t in pairs):
            return False
        return abs(mat_det(M)) == LB.covolume / LA.covolume
    s0, t0 = pairs[0]
    for s, t in pairs[1:]:
        r = parallel_ratio(s0, s)
        if t != t0 * r:
            return False
    return True


def detect_rigid_iso(A: TubularGroup, B: TubularGroup) -> Optional[RigidIso]:
    """Search for a rigid isomorphism A -> B.

    Backtracks over edge assignments (target edge, orientation, sign);
    vertex matrices are pinned down by the edge images they must carry,
    and vertices whose constraints are all parallel are completed along
    the lattice. Every returned witness passes verify_rigid_iso.
    """
    if iso_obstruction(A, B) is not None:
        return None
    a_edges = list(A.edges)
    b_edges = list(B.edges)

    def search(k, vmap, used, pairs, emap):
        if k == len(a_edges):
            return finish(vmap, pairs, emap)
        e = a_edges[k]
        for f in b_edges:
            if f.id in used:
                continue
            for rev in (False, True):
                for sign in (1, -1):
                    ends = _edge_targets(e, f, rev, sign)
                    vm = dict(vmap)
                    ok = True
                    for sv, tv, _, _ in ends:
                        if vm.get(sv, tv) != tv or (sv not in vm and tv in vm.values()):
                            ok = False
                            break
                        vm[sv] = tv
                    if not ok:
                        continue
                    new_pairs = {v: list(p) for v, p in pairs.items()}
                    for sv, tv, src, tgt in ends:
                        new_pairs.setdefault(sv, []).append((src, tgt))
                    if not all(_vertex_consistent(new_pairs[sv], A.lattice(sv), B.lattice(tv))
                               for sv, tv, _, _ in ends):
                        continue
                    found = search(k + 1, vm, used | {f.id}, new_pairs,
                                   {**emap, e.id: (f.id, rev, sign)})
                    if found is not None:
                        return found
        return None

    def finish(vmap, pairs, emap):
        vmap = dict(vmap)
        free_a = [v for v in A.vertex_ids if v not in vmap]
        free_b = [v for v in B.vertex_ids if v not in vmap.values()]
        # only an edgeless single vertex can be left unmatched
        for a, b in zip(free_a, free_b):
            vmap[a] = b
        matrices = {}
        for v in A.vertex_ids:
            LA, LB = A.lattice(v), B.lattice(vmap[v])
            ps = pairs.get(v, [])
            M = _solve(ps)
            if M is None and ps:
                M = _line_completion(LA, LB, *ps[0])
            elif M is None:
                M = mat_mul(mat_from_columns(*LB.basis), mat_inv(mat_from_columns(*LA.basis)))
            if M is None:
                return None
            matrices[v] = M
        iso = RigidIso(vmap, dict(emap), matrices)
        return iso if not verify_rigid_iso(A, B, iso) else None

    return search(0, {}, frozenset(), {}, {})


# ------------------------------------------------------------ sequences

@dataclass(frozen=True)
class ExpansionOutcome:
    """Result of iterating expand.

    status is "terminated" (history[-1] is primitive and reached after
    ``len(history) - 1`` nontrivial expansions), "recurrent" (history[i]
    and history[j] rigidly isomorphic via ``witness``: i -> j) or
    "exhausted" (``budget`` nontrivial steps without either).
    """

    history: tuple
    status: str
    budget: int
    i: Optional[int] = None
    j: Optional[int] = None
    witness: Optional[RigidIso] = None

    @property
    def steps(self) -> int:
        return len(self.history) - 1

    @property
    def target(self) -> Optional[TubularGroup]:
        return self.history[-1] if self.status == "terminated" else None


def run_sequence(G: TubularGroup, budget: int = DEFAULT_BUDGET) -> ExpansionOutcome:
    require_valid(G)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    history = [G]
    sigs = [group_signature(G)]
    for _ in range(budget):
        nxt, trivial = expand(history[-1])
        if trivial:
            return ExpansionOutcome(tuple(history), "terminated", budget)
        j = len(history)
        history.append(nxt)
        sig = group_signature(nxt)
        for i in range(j):
            if sigs[i] != sig:
                continue
            iso = detect_rigid_iso(history[i], nxt)
            if iso is not None:
                return ExpansionOutcome(tuple(history), "recurrent", budget, i, j, iso)
        sigs.append(sig)
    if is_primitive(history[-1]):
        return ExpansionOutcome(tuple(history), "terminated", budget)
    return ExpansionOutcome(tuple(history), "exhausted", budget)


def length_bound(source: TubularGroup, target: TubularGroup) -> int:
    """Sum over edges of the index of the source edge group in the target's."""
    total = 0
    for e in source.edges:
        r = parallel_ratio(target.edge(e.id).u, e.u)
        total += abs(int(r))
    return total


# ------------------------------------------------------------ verdicts

@dataclass(frozen=True)
class SequenceEvidence:
    """An expansion outcome for G (edges is None) or a subtubular group."""

    edges: Optional[tuple]
    outcome: ExpansionOutcome


@dataclass(frozen=True)
class Verdict:
    """status is "RF", "NotRF" or "Unknown"; evidence holds one certificate
    per route that resolved (or the exhausted searches for Unknown)."""

    status: str
    group: TubularGroup
    evidence: tuple = field(default=())


ROUTES = ("auto", "expansion", "regulating")


def _expansion_route(G: TubularGroup, budget: int) -> tuple[str, list]:
    out = run_sequence(G, budget)
    if out.status == "terminated":
        return "RF", [SequenceEvidence(None, out)]
    if out.status == "recurrent":
        return "NotRF", [SequenceEvidence(None, out)]
    exhausted = [SequenceEvidence(None, out)]
    for subset in connected_edge_subsets(G, proper=True):
        sub = run_sequence(subtubular(G, subset), budget)
        if sub.status == "recurrent":
            return "NotRF", [SequenceEvidence(subset, sub)]
        if sub.status == "exhausted":
            exhausted.append(SequenceEvidence(subset, sub))
    return "Unknown", exhausted


def decide(G: TubularGroup, budget: int = DEFAULT_BUDGET, route: str = "auto") -> Verdict:
    """Decide residual finiteness of G.

    route="regulating" runs the complete single-vertex algorithm;
    route="expansion" runs the expansion sequence, then every proper
    connected subtubular group, and may answer Unknown; route="auto"
    runs both where available, the regulating answer being final for
    single-vertex groups.
    """
    from .regulating import Regulating, single_vertex_decide

    require_valid(G)
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}")
    if route == "regulating" and not G.single_vertex:
        raise NotSingleVertex("the regulating route needs a single-vertex group")
    status = None
    evidence = []
    if route != "expansion" and G.single_vertex:
        res = single_vertex_decide(G)
        status = "RF" if isinstance(res, Regulating) else "NotRF"
        evidence.append(res)
    if route != "regulating":
        exp_status, exp_evidence = _expansion_route(G, budget)
        if exp_status != "Unknown":
            if status is not None and status != exp_status:
                raise AssertionError(f"routes disagree on {G!r}: {status} vs {exp_status}")
            status = exp_status
            evidence.extend(exp_evidence)
        elif status is None:
            status = "Unknown"
            evidence.extend(exp_evidence)
    return Verdict(status, G, tuple(evidence))
