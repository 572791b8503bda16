"""Command-line frontend: ``tubular <command> ...``.

Every command prints one JSON document on standard output. Exit codes:
0 = RF / success, 1 = NotRF / negative answer, 2 = Unknown, 3 = error.
"""

from __future__ import annotations

import argparse
import sys

from .certificates import (EXIT_CODES, check_outcome, check_regulating,
                           check_verdict, outcome_to_json, regulating_to_json,
                           verdict_to_json)
from .errors import TubularError
from .expansion import DEFAULT_BUDGET, ROUTES, decide, run_sequence
from .model import (group_from_json, group_to_json, loads, snowflake, dumps,
                    validate)
from .regulating import Regulating, single_vertex_decide
from .words import (britton_reduce, check_modulus, format_word, parse_word,
                    witness_modulus)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read(path: str):
    if path == "-":
        return loads(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tubular", description="Residual finiteness of tubular groups.")
    p.add_argument("--recheck", metavar="CERT",
                   help="re-verify a certificate JSON emitted by this tool and exit")
    sub = p.add_subparsers(dest="command")

    d = sub.add_parser("decide", help="decide residual finiteness")
    d.add_argument("file")
    d.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    d.add_argument("--route", choices=ROUTES, default="auto")

    e = sub.add_parser("expand", help="run the expansion sequence")
    e.add_argument("file")
    e.add_argument("--steps", type=_positive, default=DEFAULT_BUDGET)

    r = sub.add_parser("regulate", help="search for a regulating tuple (one vertex)")
    r.add_argument("file")

    w = sub.add_parser("witness", help="finite-quotient witness for a word")
    w.add_argument("file")
    w.add_argument("--word", required=True)
    w.add_argument("--check-n", type=_positive, dest="check_n")

    s = sub.add_parser("snowflake", help="emit or decide a snowflake group")
    s.add_argument("p", type=int)
    s.add_argument("q", type=int)
    s.add_argument("--decide", action="store_true")
    s.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    s.add_argument("--route", choices=ROUTES, default="auto")

    v = sub.add_parser("validate", help="list invariant violations")
    v.add_argument("file")
    return p


def _verdict(G, budget, route):
    v = decide(G, budget, route)
    return verdict_to_json(v), EXIT_CODES[v.status]


def recheck(doc) -> list[str]:
    """Dispatch on the certificate kind."""
    if not isinstance(doc, dict):
        return ["certificate must be a JSON object"]
    kind = doc.get("kind")
    if kind == "verdict":
        return check_verdict(doc)
    if kind == "expansion-outcome":
        return check_outcome(doc)
    if kind == "regulating":
        if "group" not in doc:
            return ["regulating certificate does not embed its group"]
        return check_regulating(doc, group_from_json(doc["group"]))
    if kind == "witness":
        G = group_from_json(doc["group"])
        word = parse_word(G, doc["word"])
        problems = []
        if format_word(britton_reduce(G, word)) != doc["reduced_word"]:
            problems.append("recorded reduced word does not match")
        return problems + check_modulus(G, word, int(doc["n"]))
    return [f"unknown certificate kind {kind!r}"]


def run(args) -> tuple[dict, int]:
    if args.recheck:
        problems = recheck(_read(args.recheck))
        return {"kind": "recheck", "valid": not problems, "problems": problems}, int(bool(problems))
    cmd = args.command
    if cmd is None:
        raise UsageError("tubular: a command or --recheck is required")
    if cmd == "snowflake":
        G = snowflake(args.p, args.q)
        if args.decide:
            return _verdict(G, args.budget, args.route)
        return group_to_json(G), 0
    if cmd == "validate":
        G = group_from_json(_read(args.file), check=False)
        problems = validate(G)
        return {"kind": "validation", "valid": not problems, "violations": problems}, int(bool(problems))
    G = group_from_json(_read(args.file))
    if cmd == "decide":
        return _verdict(G, args.budget, args.route)
    if cmd == "expand":
        return outcome_to_json(run_sequence(G, args.steps)), 0
    if cmd == "regulate":
        res = single_vertex_decide(G)
        doc = regulating_to_json(res, G)
        doc["group"] = group_to_json(G)
        return doc, 0 if isinstance(res, Regulating) else 1
    if cmd == "witness":
        word = parse_word(G, args.word)
        rec = witness_modulus(G, word)
        doc = {"kind": "witness", "group": group_to_json(G), "word": format_word(word)}
        doc.update(rec.to_json())
        code = 0
        if args.check_n is not None:
            problems = check_modulus(G, word, args.check_n) if args.check_n >= 2 else \
                ["modulus must be at least 2"]
            doc["check"] = {"n": args.check_n, "holds": not problems, "problems": problems}
            code = int(bool(problems))
        return doc, code
    raise UsageError(f"tubular: unknown command {cmd!r}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        doc, code = run(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 3
    except TubularError as exc:
        print(f"tubular: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, TypeError) as exc:
        print(f"tubular: error: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(dumps(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
