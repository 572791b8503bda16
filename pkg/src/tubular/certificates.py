"""
JSON encoding of expansion outcomes, regulating results and verdicts,
plus independent re-verification of emitted certificates.

Every certificate embeds the full group documents it refers to, so a
recheck needs nothing but the JSON itself.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DocumentSyntaxError, TubularError
from .exactlat import hnf, parallel_ratio, rat_str
from .expansion import (ExpansionOutcome, RigidIso, SequenceEvidence, Verdict,
                        expand, verify_rigid_iso)
from .model import (group_from_json, group_to_json, is_primitive, parse_vector,
                    subtubular, tuple_from_json, tuple_to_json)
from .regulating import (NoTuple, Regulating, TSequence, TupleCertificate,
                         is_regulating, ordered_factorizations, parametric_tuple,
                         primitive_domain, t_sequence, verify_certificate)

EXIT_CODES = {"RF": 0, "NotRF": 1, "Unknown": 2}


# ------------------------------------------------------------ encoding

def iso_to_json(iso: RigidIso) -> dict:
    return {
        "vertex_map": dict(iso.vertex_map),
        "edge_map": {e: {"edge": f, "reversed": r, "sign": s}
                     for e, (f, r, s) in iso.edge_map.items()},
        "matrices": {v: [[rat_str(x) for x in row] for row in M]
                     for v, M in iso.matrices.items()},
    }


def iso_from_json(doc) -> RigidIso:
    try:
        return RigidIso(
            dict(doc["vertex_map"]),
            {e: (m["edge"], bool(m["reversed"]), int(m["sign"]))
             for e, m in doc["edge_map"].items()},
            {v: tuple(tuple(Fraction(x) for x in row) for row in M)
             for v, M in doc["matrices"].items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentSyntaxError(f"malformed rigid isomorphism: {exc}", "witness") from None


def outcome_to_json(out: ExpansionOutcome) -> dict:
    doc = {
        "kind": "expansion-outcome",
        "status": out.status,
        "budget": out.budget,
        "steps": out.steps,
        "history": [group_to_json(G) for G in out.history],
    }
    if out.status == "recurrent":
        doc.update(i=out.i, j=out.j, witness=iso_to_json(out.witness))
    return doc


def outcome_from_json(doc) -> ExpansionOutcome:
    try:
        history = tuple(group_from_json(g) for g in doc["history"])
        witness = iso_from_json(doc["witness"]) if doc["status"] == "recurrent" else None
        return ExpansionOutcome(history, doc["status"], int(doc["budget"]),
                                doc.get("i"), doc.get("j"), witness)
    except (KeyError, TypeError) as exc:
        raise DocumentSyntaxError(f"malformed expansion outcome: {exc}", "outcome") from None


def _tseq_to_json(ts: TSequence) -> dict:
    return {"order": list(ts.order), "t": [rat_str(x) for x in ts.t], "T": rat_str(ts.T)}


def regulating_to_json(res, G=None) -> dict:
    if isinstance(res, Regulating):
        cert = res.certificate
        doc = {
            "kind": "regulating",
            "status": "Regulating",
            "tuple": tuple_to_json(cert.etuple),
            "lattices": {v: L.to_json() for v, L in cert.lattices.items()},
            "witnesses": [{"edge": e, "side": side, "coords": [str(a), str(b)]}
                          for (e, side), (a, b) in cert.witnesses.items()],
            "discarded": list(res.discarded),
        }
        if res.tseq is not None:
            doc["t_sequence"] = _tseq_to_json(res.tseq)
            doc["z"] = [str(z) for z in res.z]
        if G is not None:
            doc["primitive_domain"] = group_to_json(primitive_domain(G, cert))
        return doc
    doc = {"kind": "regulating", "status": "NoTuple", "reason": res.reason}
    if res.edge is not None:
        doc["edge"] = res.edge
        doc["ratio"] = rat_str(res.ratio)
    if res.tseq is not None:
        doc["t_sequence"] = _tseq_to_json(res.tseq)
    if res.candidates:
        doc["candidates"] = [{"z": [str(x) for x in z], "tuple": [str(x) for x in k]}
                             for z, k in res.candidates]
    return doc


def evidence_to_json(item, G) -> dict:
    if isinstance(item, SequenceEvidence):
        return {"route": "expansion",
                "edges": None if item.edges is None else list(item.edges),
                "outcome": outcome_to_json(item.outcome)}
    return {"route": "regulating", "result": regulating_to_json(item, G)}


def verdict_to_json(v: Verdict) -> dict:
    return {
        "kind": "verdict",
        "status": v.status,
        "group": group_to_json(v.group),
        "evidence": [evidence_to_json(x, v.group) for x in v.evidence],
    }


# ------------------------------------------------------------ rechecking

def check_outcome(doc, source=None) -> list[str]:
    """Re-verify an expansion outcome; ``source`` pins history[0]."""
    try:
        out = outcome_from_json(doc)
    except TubularError as exc:
        return [str(exc)]
    problems = []
    if source is not None and out.history[0] != source:
        problems.append("history does not start at the claimed group")
    for k in range(len(out.history) - 1):
        nxt, trivial = expand(out.history[k])
        if trivial or nxt != out.history[k + 1]:
            problems.append(f"history[{k + 1}] is not the nontrivial expansion of history[{k}]")
    if out.status == "terminated":
        if not is_primitive(out.history[-1]):
            problems.append("terminal group is not primitive")
    elif out.status == "recurrent":
        i, j = out.i, out.j
        if not (isinstance(i, int) and isinstance(j, int) and 0 <= i < j < len(out.history)):
            problems.append("recurrence indices out of range")
        else:
            problems += [f"witness: {p}" for p in
                         verify_rigid_iso(out.history[i], out.history[j], out.witness)]
    elif out.status == "exhausted":
        if out.steps != out.budget:
            problems.append("exhausted outcome does not use its whole budget")
    else:
        problems.append(f"unknown status {out.status!r}")
    return problems


def _survivor_order(G) -> list[str]:
    return [e.id for e in G.edges if parallel_ratio(e.u, e.v) is None]


def check_regulating(doc, G) -> list[str]:
    status = doc.get("status")
    if status == "Regulating":
        try:
            k = tuple_from_json(doc["tuple"], G.edge_ids)
            lattices = {v: hnf(parse_vector(b) for b in basis)
                        for v, basis in doc["lattices"].items()}
            witnesses = {(w["edge"], w["side"]): (int(w["coords"][0]), int(w["coords"][1]))
                         for w in doc["witnesses"]}
        except (KeyError, TypeError, ValueError, TubularError) as exc:
            return [f"malformed certificate: {exc}"]
        cert = TupleCertificate(k, lattices, witnesses)
        problems = verify_certificate(G, cert)
        if not problems and "primitive_domain" in doc:
            D = group_from_json(doc["primitive_domain"])
            if D != primitive_domain(G, cert):
                problems.append("primitive domain does not match the certificate")
        return problems
    if status != "NoTuple":
        return [f"unknown regulating status {status!r}"]
    reason = doc.get("reason")
    if reason == "commensurable":
        e = G.edge(doc["edge"])
        r = parallel_ratio(e.u, e.v)
        if r is None or abs(r) == 1 or rat_str(r) != doc["ratio"]:
            return [f"edge {e.id} is not commensurable with ratio {doc['ratio']}"]
        return []
    if any(parallel_ratio(e.u, e.v) not in (None, 1, -1) for e in G.edges):
        return ["a commensurable edge was overlooked"]
    order = _survivor_order(G)
    ts = t_sequence(G, order)
    if doc.get("t_sequence") != _tseq_to_json(ts):
        return ["recorded t-sequence does not match"]
    if reason == "non-integral":
        return [] if ts.T.denominator != 1 else ["T is an integer"]
    if reason == "exhausted":
        sub = subtubular(G, order)
        expected = [{"z": [str(x) for x in z], "tuple": [str(x) for x in parametric_tuple(ts.t, z)]}
                    for z in ordered_factorizations(int(ts.T), len(order))]
        if doc.get("candidates") != expected:
            return ["candidate list is not the full parametric enumeration"]
        for c in expected:
            k = dict(zip(order, (int(x) for x in c["tuple"])))
            if is_regulating(sub, k) is not None:
                return [f"candidate {c['tuple']} is regulating"]
        return []
    return [f"unknown NoTuple reason {reason!r}"]


def check_verdict(doc) -> list[str]:
    try:
        G = group_from_json(doc["group"])
        status = doc["status"]
        evidence = doc["evidence"]
    except (KeyError, TypeError) as exc:
        return [f"malformed verdict: {exc}"]
    except TubularError as exc:
        return [str(exc)]
    if status not in EXIT_CODES:
        return [f"unknown status {status!r}"]
    if not evidence:
        return ["verdict carries no evidence"]
    problems = []
    for n, item in enumerate(evidence):
        where = f"evidence[{n}]"
        try:
            if item["route"] == "regulating":
                res = item["result"]
                problems += [f"{where}: {p}" for p in check_regulating(res, G)]
                claimed = "RF" if res["status"] == "Regulating" else "NotRF"
            else:
                out = item["outcome"]
                source = G if item["edges"] is None else subtubular(G, item["edges"])
                problems += [f"{where}: {p}" for p in check_outcome(out, source)]
                claimed = {"terminated": "RF", "recurrent": "NotRF"}.get(out["status"], "Unknown")
                if item["edges"] is not None and claimed == "RF":
                    problems.append(f"{where}: a terminating subtubular group proves nothing")
        except (KeyError, TypeError, TubularError) as exc:
            problems.append(f"{where}: malformed: {exc}")
            continue
        if claimed != status:
            problems.append(f"{where}: supports {claimed}, verdict says {status}")
    return problems
