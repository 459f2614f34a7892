from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .decision import Answer, OracleOptions, check_containment, decide_equivalence
from .errors import BudgetExceeded, CcqError
from .evaluator import evaluate
from .explicit_wave import fast_explicit_wave, implicit_wave_witness
from .mappings import CLI_KINDS, find_mapping
from .oracle import Counterexample, counterexample_family, falsify_random
from .query import Query, classify, scale_signature
from .textio import GRAMMAR_VERSION, format_fact, format_tuple, parse_database, parse_queries, parse_query, print_query
from .transforms import canonical, copy_enhanced, deregularized, regularized
from .wave import (
    DEFAULT_ASSOCIATION_BUDGET,
    build_family_database,
    enumerate_monomial_classes,
    family_spec,
    label,
    multiplicity_monomial,
    wave,
    wave_class_scvm,
)

EXIT_CODES = {Answer.YES: 0, Answer.NO: 3, Answer.UNKNOWN: 4}

TRANSFORMS = {
    "canonical": canonical,
    "regularized": regularized,
    "deregularized": deregularized,
    "copy-enhanced": copy_enhanced,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share exit 1 with parse errors; 2 is reserved for budgets
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(message)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _query(path: str) -> Query:
    return parse_query(_read(path), path)


def _counterexample_json(ce: Counterexample | None) -> dict | None:
    if ce is None:
        return None
    out = {
        "database": [format_fact(p, a, n) for (p, a), n in ce.database],
        "tuple": format_tuple(ce.tuple),
        "mult1": ce.mult1,
        "mult2": ce.mult2,
    }
    if ce.n is not None:
        out["n"] = list(ce.n)
    if ce.sample is not None:
        out["sample"] = ce.sample
    return out


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_check(args) -> tuple[dict, int]:
    out = []
    for q in parse_queries(_read(args.query), args.query):
        out.append(
            {
                "name": q.name,
                "query": print_query(q),
                "class": classify(q).value,
                "scale_signature": list(scale_signature(q)),
            }
        )
    return {"queries": out}, 0


def cmd_eval(args) -> tuple[dict, int]:
    q = _query(args.query)
    d = parse_database(_read(args.db), args.db)
    bag = evaluate(q, d)
    return {format_tuple(t): n for t, n in sorted(bag.items(), key=lambda kv: format_tuple(kv[0]))}, 0


def cmd_map(args) -> tuple[dict, int]:
    src, tgt = _query(args.src), _query(args.tgt)
    m = find_mapping(CLI_KINDS[args.kind], src, tgt, args.budget)
    return {"found": m is not None, "mapping": None if m is None else m.to_json()}, 0 if m else 3


def cmd_wave(args) -> tuple[dict, int]:
    budget = args.budget if args.budget is not None else DEFAULT_ASSOCIATION_BUDGET
    if args.classify:
        q = _query(args.classify)
        fast = fast_explicit_wave(q)
        witness = None if fast else implicit_wave_witness(q, node_budget=args.budget)
        return {
            "query": q.name,
            "classification": "implicit" if witness else "explicit",
            "fast_path": fast is True,
            "witness": None if witness is None else witness.to_json(),
        }, 0
    q = _query(args.analyze)
    other = _query(args.against) if args.against else q
    fspec = family_spec(q)
    n = _int_list(args.n) if args.n else [1] * fspec.size
    if len(n) != fspec.size or min(n, default=1) < 1:
        raise UsageError(f"--n needs {fspec.size} positive entries")
    fam = build_family_database(fspec, n)
    target = wave(fspec)
    rows = []
    for k, c in enumerate(enumerate_monomial_classes(fspec, other, n, budget), start=1):
        mono = multiplicity_monomial(c, fspec)
        db_atoms = sorted({format_fact(*fam.atoms()[i][:3]) for mem in c.members for i in mem})
        rows.append(
            {
                "id": f"C{k}",
                "db_atoms": db_atoms,
                "psi_a": [str(a) for a in c.atom_signature],
                "phi_n": [str(t) for t in c.noncopy_signature],
                "phi_c": [label(j) for j in c.copy_signature],
                "monomial": str(mono),
                "is_wave": mono == target,
                "contributed": len(c.tuples),
                "tuples": sorted(format_tuple(t[0] + t[1] + t[2]) for t in c.tuples),
            }
        )
    scvm = wave_class_scvm(fspec, other, budget)
    return {
        "query": q.name,
        "analyzed": other.name,
        "n": list(n),
        "t_star": format_tuple(fspec.t_star),
        "wave": str(target),
        "database": [format_fact(p, a, c) for p, a, c, _ in fam.atoms()],
        "classes": rows,
        "scvm": None if scvm is None else scvm.to_json(),
    }, 0


def _oracle_options(args) -> OracleOptions:
    return OracleOptions(jobs=args.jobs)


def cmd_decide(args) -> tuple[dict, int]:
    q1, q2 = _query(args.q1), _query(args.q2)
    if args.containment:
        v = check_containment(q1, q2, args.budget)
    else:
        v = decide_equivalence(q1, q2, oracle=args.oracle, budget=args.budget, oracle_options=_oracle_options(args))
    return v.to_json(), EXIT_CODES[v.answer]


def cmd_oracle(args) -> tuple[dict, int]:
    q1, q2 = _query(args.q1), _query(args.q2)
    if args.random:
        samples, adom, max_copy, seed = args.random
        ce = falsify_random(q1, q2, samples, adom, max_copy, seed, jobs=args.jobs)
        mode = "random"
    else:
        ce = counterexample_family(q1, q2, args.family or 3)
        mode = "family"
    return {"mode": mode, "found": ce is not None, "counterexample": _counterexample_json(ce)}, 3 if ce else 0


def cmd_transform(args) -> tuple[dict, int]:
    q = _query(args.query)
    r = TRANSFORMS[args.to](q)
    return {"transform": args.to, "query": print_query(r)}, 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="node cap for searches")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes")

    p = _Parser(prog="ccq", description="Copy-sensitive conjunctive query toolkit.", parents=[common])
    p.add_argument("--version", action="store_true", help="print engine and grammar versions")
    sub = p.add_subparsers(dest="command")

    s = sub.add_parser("check", parents=[common], help="parse, validate and classify queries")
    s.add_argument("--query", required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("eval", parents=[common], help="evaluate a query on a bag database")
    s.add_argument("--query", required=True)
    s.add_argument("--db", required=True)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("map", parents=[common], help="search for a mapping from --src to --tgt")
    s.add_argument("--kind", required=True, choices=sorted(CLI_KINDS))
    s.add_argument("--src", required=True)
    s.add_argument("--tgt", required=True)
    s.set_defaults(func=cmd_map)

    s = sub.add_parser("wave", parents=[common], help="explicit-wave test or monomial class table")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--classify", metavar="FILE")
    g.add_argument("--analyze", metavar="FILE")
    s.add_argument("--against", metavar="FILE")
    s.add_argument("--n", help="comma-separated vector, e.g. 2,3")
    s.set_defaults(func=cmd_wave)

    s = sub.add_parser("decide", parents=[common], help="decide equivalence or containment")
    s.add_argument("--q1", required=True)
    s.add_argument("--q2", required=True)
    s.add_argument("--oracle", action="store_true", help="search for a counterexample when inconclusive")
    s.add_argument("--containment", action="store_true", help="test q1 contained in q2 instead")
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("oracle", parents=[common], help="counterexample search")
    s.add_argument("--q1", required=True)
    s.add_argument("--q2", required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--family", type=int, metavar="N_MAX")
    g.add_argument("--random", type=int, nargs=4, metavar=("SAMPLES", "ADOM", "MAX_COPY", "SEED"))
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("transform", parents=[common], help="rewrite a query")
    s.add_argument("--query", required=True)
    s.add_argument("--to", required=True, choices=sorted(TRANSFORMS))
    s.set_defaults(func=cmd_transform)
    return p


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"ccq: {exc}\n")
        return 1
    if args.version:
        _emit({"engine": __version__, "grammar": GRAMMAR_VERSION})
        return 0
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 1
    args.budget = getattr(args, "budget", None)
    args.jobs = getattr(args, "jobs", 1)
    try:
        doc, code = args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"ccq: {exc}\n")
        return 1
    except BudgetExceeded as exc:
        sys.stderr.write(f"{exc}\n")
        _emit(exc.to_json())
        return 2
    except CcqError as exc:
        sys.stderr.write(f"{exc}\n")
        _emit(exc.to_json())
        return 1
    except OSError as exc:
        sys.stderr.write(f"ccq: {exc}\n")
        return 1
    _emit(doc)
    return code
