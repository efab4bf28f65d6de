"""Command-line front end.

Commands: eig, report, verify, example, sweep.  Exit codes are a stable
contract: 0 success, 1 usage or parse failure, 2 an assumption flag fired
(the report is still written), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments, io, verify
from .bounds import full_report
from .config import DEFAULT_TOL, Tolerances
from .errors import IndexOutOfRange, InvalidMatrix, SpecViolation, SplabError
from .linalg import eig
from .partition import NearestAssignment, SameSelector, parse_selector

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ASSUMPTION = 2
EXIT_NUMERICAL = 3

DEFAULT_SEED = 42


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; remap to the contract's 1."""

    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="splab",
                     description="Invariant-subspace perturbation workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eig = sub.add_parser("eig", help="eigendecomposition of a matrix file")
    p_eig.add_argument("--input", required=True)
    p_eig.add_argument("--out", default=None)
    p_eig.add_argument("--tol", action="append", default=[], metavar="KEY=VAL")

    p_rep = sub.add_parser("report", help="full bound report for (A, dA, selector)")
    p_rep.add_argument("--input", required=True)
    p_rep.add_argument("--perturb", required=True,
                       help="unit:i,j,EPS | gaussian:NORM | file:PATH")
    p_rep.add_argument("--select", required=True)
    p_rep.add_argument("--match", choices=["same", "nearest"], default="same")
    p_rep.add_argument("--seed", type=int, default=None)
    p_rep.add_argument("--out", default=None)
    p_rep.add_argument("--tol", action="append", default=[], metavar="KEY=VAL")

    p_ver = sub.add_parser("verify", help="run a named verification suite")
    p_ver.add_argument("suite",
                       help="lemma32 | lemma33 | contour | dominance | scaling")
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--cases", type=int, default=None)
    p_ver.add_argument("--out", default=None)
    p_ver.add_argument("--tol", action="append", default=[], metavar="KEY=VAL")

    p_ex = sub.add_parser("example", help="generate a worked example matrix")
    p_ex.add_argument("family",
                      help="example11 | tightr2 | tightgeneral | v2necessity3 | v2necessityn")
    p_ex.add_argument("--eps", type=float, default=None)
    p_ex.add_argument("--delta", type=float, default=None)
    p_ex.add_argument("--delta1", type=float, default=None)
    p_ex.add_argument("--r", type=int, default=None)
    p_ex.add_argument("--n", type=int, default=None)
    p_ex.add_argument("--out", required=True)
    p_ex.add_argument("--perturb-out", default=None,
                      help="also write the family's paired perturbation")

    p_sw = sub.add_parser("sweep", help="run a sweep harness")
    p_sw.add_argument("family", help="table1 | tightness | v2necessity | special")
    p_sw.add_argument("--eps-list", default="1e-2,1e-4,1e-6,1e-8,1e-10")
    p_sw.add_argument("--norm", type=float, default=1e-6)
    p_sw.add_argument("--seed", type=int, default=None)
    p_sw.add_argument("--r", type=int, default=2)
    p_sw.add_argument("--delta-list", default="0.2,0.1,0.05")
    p_sw.add_argument("--eps-rule", type=float, default=0.01)
    p_sw.add_argument("--delta", type=float, default=0.05)
    p_sw.add_argument("--delta1", type=float, default=0.005)
    p_sw.add_argument("--eps", type=float, default=1e-6)
    p_sw.add_argument("--n", type=int, default=None)
    p_sw.add_argument("--eps1", type=float, default=1e-6)
    p_sw.add_argument("--format", choices=["json", "csv"], default="csv")
    p_sw.add_argument("--out", default=None)
    p_sw.add_argument("--jobs", type=int, default=1)
    p_sw.add_argument("--tol", action="append", default=[], metavar="KEY=VAL")
    return parser


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("SPLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise _UsageError(f"SPLAB_SEED must be an integer, got {env!r}") from exc
    return DEFAULT_SEED


def _resolve_tol(pairs: list[str]) -> Tolerances:
    updates = {}
    for item in pairs:
        if "=" not in item:
            raise _UsageError(f"--tol expects KEY=VAL, got {item!r}")
        key, val = item.split("=", 1)
        updates[key.strip()] = val.strip()
    try:
        return DEFAULT_TOL.override(**updates)
    except (KeyError, ValueError) as exc:
        raise _UsageError(f"bad --tol override: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _parse_perturbation(spec: str, n: int, seed: int) -> np.ndarray:
    parts = spec.split(":", 1)
    if len(parts) != 2:
        raise _UsageError(f"--perturb: cannot parse {spec!r}")
    kind, rest = parts[0].lower(), parts[1]
    if kind == "unit":
        try:
            i_s, j_s, eps_s = rest.split(",")
            return experiments.gen_unit_perturbation(n, int(i_s), int(j_s), float(eps_s))
        except ValueError as exc:
            raise _UsageError(f"--perturb unit: expected i,j,EPS: {exc}") from exc
    if kind == "gaussian":
        try:
            return experiments.gen_gaussian_perturbation(n, float(rest), seed)
        except ValueError as exc:
            raise _UsageError(f"--perturb gaussian: bad norm {rest!r}") from exc
    if kind == "file":
        return io.load_matrix(rest)
    raise _UsageError(f"--perturb: unknown kind {kind!r}")


def _cmd_eig(args) -> int:
    tol = _resolve_tol(args.tol)
    ed = eig(io.load_matrix(args.input), tol)
    _emit(json.dumps(io.eig_to_obj(ed), indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_report(args) -> int:
    tol = _resolve_tol(args.tol)
    seed = _resolve_seed(args.seed)
    a = io.load_matrix(args.input)
    selector = parse_selector(args.select)
    da = _parse_perturbation(args.perturb, a.shape[0], seed)
    match = SameSelector(selector) if args.match == "same" else NearestAssignment()
    report = full_report(a, da, selector, match=match, tol=tol)
    _emit(json.dumps(io.report_to_obj(report), indent=2) + "\n", args.out)
    if not (report.classical_valid and report.gap_ok and report.dominance_ok):
        return EXIT_ASSUMPTION
    return EXIT_OK


def _cmd_verify(args) -> int:
    tol = _resolve_tol(args.tol)
    if args.suite not in verify.SUITES:
        raise _UsageError(
            f"unknown suite {args.suite!r}; choose from {sorted(verify.SUITES)}")
    records = verify.run_suite(args.suite, _resolve_seed(args.seed), args.cases, tol)
    _emit(io.records_to_json(records), args.out)
    failed = [rec for rec in records if not rec["pass"]]
    if failed:
        sys.stderr.write(f"verify {args.suite}: {len(failed)} of "
                         f"{len(records)} cases failed\n")
        return EXIT_NUMERICAL
    sys.stderr.write(f"verify {args.suite}: all {len(records)} cases passed\n")
    return EXIT_OK


def _require(value, name: str):
    if value is None:
        raise _UsageError(f"example family requires {name}")
    return value


def _example_spec(args):
    family = args.family.lower()
    if family == "example11":
        return experiments.Example11(eps=_require(args.eps, "--eps"))
    if family == "tightr2":
        return experiments.TightR2(delta=_require(args.delta, "--delta"),
                                   eps=_require(args.eps, "--eps"))
    if family == "tightgeneral":
        return experiments.TightGeneral(r=_require(args.r, "--r"),
                                        delta=_require(args.delta, "--delta"),
                                        eps=_require(args.eps, "--eps"))
    if family == "v2necessity3":
        return experiments.V2Necessity3(delta=_require(args.delta, "--delta"),
                                        delta1=_require(args.delta1, "--delta1"),
                                        eps=_require(args.eps, "--eps"))
    if family == "v2necessityn":
        return experiments.V2NecessityN(n=_require(args.n, "--n"),
                                        delta=_require(args.delta, "--delta"),
                                        delta1=_require(args.delta1, "--delta1"),
                                        eps=_require(args.eps, "--eps"))
    raise _UsageError(f"unknown example family {args.family!r}")


def _cmd_example(args) -> int:
    spec = _example_spec(args)
    a, facts = experiments.gen_example(spec)
    io.save_matrix(args.out, a)
    if args.perturb_out is not None:
        if facts.perturbation is None:
            raise _UsageError(
                f"family {facts.family} has no paired perturbation to write")
        io.save_matrix(args.perturb_out, facts.perturbation)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    tol = _resolve_tol(args.tol)
    seed = _resolve_seed(args.seed)
    family = args.family.lower()
    if family == "table1":
        eps_list = [float(tok) for tok in args.eps_list.split(",") if tok]
        result = experiments.run_table1_sweep(eps_list, args.norm, seed,
                                              jobs=args.jobs, tol=tol)
    elif family == "tightness":
        deltas = [float(tok) for tok in args.delta_list.split(",") if tok]
        result = experiments.run_tightness_sweep(args.r, deltas, args.eps_rule,
                                                 seed, jobs=args.jobs, tol=tol)
    elif family == "v2necessity":
        record = experiments.run_v2_necessity(args.delta, args.delta1, args.eps,
                                              n=args.n, tol=tol)
        _emit(io.records_to_json([record]), args.out)
        return EXIT_OK
    elif family == "special":
        rows = experiments.run_special_perturbation_suite(args.eps, args.eps1, tol)
        _emit(io.records_to_json(rows), args.out)
        return EXIT_NUMERICAL if any(not row["pass"] for row in rows) else EXIT_OK
    else:
        raise _UsageError(f"unknown sweep family {args.family!r}")

    text = io.sweep_to_json(result) if args.format == "json" else io.sweep_to_csv(result)
    _emit(text, args.out)
    for note in result.notes:
        sys.stderr.write(note + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handlers = {
            "eig": _cmd_eig,
            "report": _cmd_report,
            "verify": _cmd_verify,
            "example": _cmd_example,
            "sweep": _cmd_sweep,
        }
        return handlers[args.command](args)
    except _UsageError as exc:
        sys.stderr.write(f"splab: {exc}\n")
        return EXIT_USAGE
    except (InvalidMatrix, SpecViolation, IndexOutOfRange, FileNotFoundError) as exc:
        sys.stderr.write(f"splab: {exc}\n")
        return EXIT_USAGE
    except SplabError as exc:
        sys.stderr.write(f"splab: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
