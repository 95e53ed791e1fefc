"""Command-line interface.

One subcommand per analysis surface. Verdicts are data: the exit code is
0 whenever the analysis ran, regardless of what it found, and nonzero
only for input or usage errors. JSON output is byte-stable for identical
inputs; timing and warnings go to stderr, never into the payload.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .canonical import canonicalize
from .coupling import multimaximal_coupling
from .rationals import format_decimal, format_rational, parse_rational
from .solver import (
    SystemTooLargeError,
    Verdict,
    build_connected_constraints,
    min_total_variation,
    solve_feasibility,
)
from .systems import system_from_dict, system_to_dict, validate_system
from .testlab import equivalence_sweep
from .two_connection import (
    TwoConnectionInstance,
    analyze_full_splits,
    construct_12_coupling,
    lp_cross_check,
    nominally_dominates,
    rank_of_constraint_matrix,
)

USAGE_ERROR = 2


class InputError(Exception):
    pass


def _emit(payload: dict, args, human_lines) -> None:
    if args.json:
        text = json.dumps(payload, indent=2, sort_keys=True)
    else:
        text = "\n".join(human_lines(payload))
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_system(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(
            f"parse error in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        return system_from_dict(obj)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_valid_system(path: str):
    sys_ = _load_system(path)
    report = validate_system(sys_)
    if not report.ok:
        raise InputError(
            f"{path} is not a valid system:\n  " + "\n  ".join(report.violations)
        )
    return sys_


def _parse_vector(text: str) -> list[Fraction]:
    try:
        return [parse_rational(part) for part in text.split(",")]
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _degree_fields(payload: dict, degree: Fraction | None) -> None:
    if degree is not None:
        payload["degree"] = format_rational(degree)
        payload["degree_decimal"] = format_decimal(degree)


def _witness_payload(witness) -> dict:
    return {
        "variables": list(witness.variables),
        "masses": [
            {"state": "".join(str(b) for b in state), "mass": format_rational(m)}
            for state, m in sorted(witness.masses.items())
        ],
    }


def _coupling_payload(matrix) -> list[list[str]]:
    return [[format_rational(v) for v in row] for row in matrix.entries]


# -- subcommands ---------------------------------------------------------------


def _cmd_validate(args) -> int:
    sys_ = _load_system(args.file)
    report = validate_system(sys_)
    payload = {
        "command": "validate",
        "ok": report.ok,
        "violations": list(report.violations),
    }

    def human(p):
        if p["ok"]:
            yield "ok"
        else:
            yield f"invalid: {len(p['violations'])} violation(s)"
            for v in p["violations"]:
                yield f"  - {v}"

    _emit(payload, args, human)
    return 0


def _cmd_canonicalize(args) -> int:
    sys_ = _load_valid_system(args.file)
    canonical = canonicalize(sys_, policy=args.policy)
    # The canonical system is itself the report, in the system file schema.
    text = json.dumps(system_to_dict(canonical.system), indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_analyze(args) -> int:
    sys_ = _load_valid_system(args.file)
    canonical = canonicalize(sys_, policy=args.policy)
    started = time.perf_counter()
    verdict: Verdict
    if args.degree:
        verdict = min_total_variation(canonical)
    else:
        verdict = solve_feasibility(build_connected_constraints(canonical))
    elapsed = time.perf_counter() - started

    payload: dict = {"command": "analyze", "contextual": verdict.contextual}
    _degree_fields(payload, verdict.degree)
    if verdict.total_variation is not None:
        payload["total_variation"] = format_rational(verdict.total_variation)
    if args.witness:
        shown = verdict.witness or verdict.quasi_witness
        if shown is not None:
            payload["witness"] = _witness_payload(shown)
    print(f"solved in {elapsed:.3f}s", file=sys.stderr)

    def human(p):
        yield ("contextual" if p["contextual"] else "noncontextual")
        if "degree" in p:
            yield f"degree: {p['degree']} ({p['degree_decimal']})"
        if "witness" in p:
            yield "witness:"
            for entry in p["witness"]["masses"]:
                yield f"  {entry['state']}  {entry['mass']}"

    _emit(payload, args, human)
    return 0


def _cmd_coupling(args) -> int:
    probs = _parse_vector(args.marginals)
    joint = multimaximal_coupling([(f"v{i}", p) for i, p in enumerate(probs)])
    payload = {"command": "coupling", **_witness_payload(joint)}

    def human(p):
        for entry in p["masses"]:
            yield f"{entry['state']}  {entry['mass']}"

    _emit(payload, args, human)
    return 0


def _cmd_dominance(args) -> int:
    inst = _make_instance(args)
    p_dom = nominally_dominates(inst.p, inst.q)
    q_dom = nominally_dominates(inst.q, inst.p)
    payload = {
        "command": "dominance",
        "p_dominates_q": p_dom,
        "q_dominates_p": q_dom,
        "noncontextual": p_dom or q_dom,
    }

    def human(p):
        yield f"p dominates q: {p['p_dominates_q']}"
        yield f"q dominates p: {p['q_dominates_p']}"
        yield (
            "full-splits system: noncontextual"
            if p["noncontextual"]
            else "full-splits system: contextual"
        )

    _emit(payload, args, human)
    return 0


def _make_instance(args) -> TwoConnectionInstance:
    p = _parse_vector(args.p)
    q = _parse_vector(args.q)
    try:
        return TwoConnectionInstance.from_vectors(p, q)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _cmd_two_connection(args) -> int:
    inst = _make_instance(args)
    verdict = analyze_full_splits(inst)
    payload: dict = {
        "command": "two-connection",
        "k": inst.k,
        "contextual": verdict.contextual,
    }
    if verdict.coupling is not None:
        payload["coupling"] = _coupling_payload(verdict.coupling)
    if args.lp_verify:
        max_m: int | str = args.max_m
        if max_m != "all":
            try:
                max_m = int(max_m)
            except ValueError as exc:
                raise InputError(f"bad --max-m value {args.max_m!r}") from exc
        try:
            lp_verdict = lp_cross_check(inst, max_m)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        payload["lp"] = {"max_m": args.max_m, "feasible": lp_verdict.feasible}
        if lp_verdict.feasible and lp_verdict.coupling is not None:
            payload["lp"]["coupling"] = _coupling_payload(lp_verdict.coupling)

    def human(p):
        yield ("contextual" if p["contextual"] else "noncontextual")
        if "coupling" in p:
            yield "coupling:"
            for row in p["coupling"]:
                yield "  " + "  ".join(f"{v:>8}" for v in row)
        if "lp" in p:
            yield (
                f"lp check (max_m={p['lp']['max_m']}): "
                + ("feasible" if p["lp"]["feasible"] else "infeasible")
            )

    _emit(payload, args, human)
    return 0


def _cmd_rank(args) -> int:
    k = args.k
    if k < 2:
        raise InputError("need k >= 2")
    rank = rank_of_constraint_matrix(k)
    payload = {
        "command": "rank",
        "k": k,
        "rows": 3 * k + k * (k - 1) // 2,
        "columns": k * k,
        "rank": rank,
    }

    def human(p):
        yield (
            f"k={p['k']}: constraint matrix {p['rows']}x{p['columns']}, "
            f"rank {p['rank']}"
        )

    _emit(payload, args, human)
    return 0


def _parse_k_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(part) for part in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad k range {text!r}; use e.g. 3..6 or 3,4,5") from exc


def _cmd_sweep(args) -> int:
    k_values = _parse_k_range(args.k)
    for k in k_values:
        if k < 2:
            raise InputError("k values must be >= 2")
    report = equivalence_sweep(k_values, args.count, args.seed)
    print(f"swept {report.instances} instances in {report.wall_time:.3f}s",
          file=sys.stderr)
    payload = {"command": "sweep", **report.to_dict()}

    def human(p):
        yield f"instances: {p['instances']}"
        yield f"agreements: {p['agreements']}"
        if p["first_counterexample"]:
            yield f"counterexample: {p['first_counterexample']}"
        else:
            yield "all verdicts agree"

    _emit(payload, args, human)
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbdcanon",
        description=(
            "Contextuality analysis of content-context systems via canonical "
            "all-binary representations and exact rational linear programming."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_json(p):
        p.add_argument("--json", action="store_true", help="emit a JSON report")

    p = sub.add_parser("validate", help="check a system file against all invariants")
    p.add_argument("file")
    add_json(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("canonicalize", help="compile a system to all-binary form")
    p.add_argument("file")
    p.add_argument(
        "--policy", choices=("detectors", "all-splits"), default="detectors"
    )
    p.add_argument("-o", "--output", help="write the result to a file")
    add_json(p)
    p.set_defaults(func=_cmd_canonicalize)

    p = sub.add_parser("analyze", help="decide contextuality of a system file")
    p.add_argument("file")
    p.add_argument(
        "--policy", choices=("detectors", "all-splits"), default="detectors"
    )
    p.add_argument("--degree", action="store_true", help="compute the exact degree")
    p.add_argument("--witness", action="store_true", help="include a witness")
    p.add_argument("-o", "--output", help="write the report to a file")
    add_json(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("coupling", help="multimaximal coupling of binary marginals")
    p.add_argument("--marginals", required=True, help="comma-separated probabilities")
    add_json(p)
    p.set_defaults(func=_cmd_coupling)

    p = sub.add_parser("dominance", help="nominal dominance between two distributions")
    p.add_argument("-p", required=True, help="comma-separated distribution")
    p.add_argument("-q", required=True, help="comma-separated distribution")
    add_json(p)
    p.set_defaults(func=_cmd_dominance)

    p = sub.add_parser(
        "two-connection", help="full-splits analysis of one two-context content"
    )
    p.add_argument("-p", required=True)
    p.add_argument("-q", required=True)
    p.add_argument("--max-m", default="2", help="m-split order cap, or 'all'")
    p.add_argument(
        "--lp-verify", action="store_true", help="cross-check the verdict by LP"
    )
    add_json(p)
    p.set_defaults(func=_cmd_two_connection)

    p = sub.add_parser("rank", help="rank of the 1-2 constraint matrix")
    p.add_argument("-k", type=int, required=True)
    add_json(p)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("sweep", help="randomized oracle agreement sweep")
    p.add_argument("--k", default="3..6", help="k range, e.g. 3..6 or 4,5")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    add_json(p)
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except SystemTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
