"""Command-line interface.

Subcommands: run, certify, worstcase, sweep, prip, coherence.  Exit codes:
0 success or condition satisfied, 1 usage or IO problems, 2 a condition or
recovery failed, 3 rank deficiency, 4 a constructed failure scenario did not
reproduce.  All numbers are printed with 17 significant digits so runs can be
compared byte for byte.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .dictionary import coherence, load_dictionary, load_vector, make_instance, save_dictionary, save_vector, spark
from .errors import (CalibrationFailed, CapExceeded, GreedyCertError, InvalidArgs,
                     InvalidSeed, OutOfDomain, RankDeficient)
from .greedy import RecoveryOutcome, classify, run
from .guarantees import coherence_threshold, partial_erc, prip_coherence_bounds, prip_exact, tropp_erc
from .sweep import SweepConfig, run_sweep
from .worstcase import build_scenario


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _parse_indices(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise InvalidArgs(f"expected a comma-separated index list, got {text!r}") from None


def _parse_instance(text: str) -> tuple[list[int], list[float]]:
    support, coeffs = [], []
    try:
        for pair in text.split(","):
            idx, val = pair.split(":")
            support.append(int(idx))
            coeffs.append(float(val))
    except ValueError:
        raise InvalidArgs(
            f"expected index:coefficient pairs like '0:1.5,3:-2', got {text!r}") from None
    return support, coeffs


def _load_dict(path):
    d, renormalized = load_dictionary(path)
    if renormalized:
        print(f"warning: {path}: columns were re-normalized to unit length", file=sys.stderr)
    return d


def cmd_run(args) -> int:
    d = _load_dict(args.dict)
    truth = None
    if args.instance is not None:
        support, coeffs = _parse_instance(args.instance)
        inst = make_instance(d, support, coeffs)
        y = inst.observation
        truth = list(inst.support)
    else:
        y = load_vector(args.y)
    if args.truth is not None:
        truth = _parse_indices(args.truth)
    seed_support = _parse_indices(args.seed_support) if args.seed_support else None
    trace = run(args.variant, d, y, args.k, seed_support=seed_support)
    outcome = classify(trace, truth) if truth is not None else None
    print(trace.to_json(outcome))
    if outcome is None:
        return 0
    return 0 if outcome.is_success else 2


def cmd_certify(args) -> int:
    d = _load_dict(args.dict)
    qstar = _parse_indices(args.qstar)
    q = _parse_indices(args.q) if args.q is not None else None
    k = len(qstar)
    l = len(q) if q is not None else 0
    mu = coherence(d)
    full = tropp_erc(d, qstar)
    partial = partial_erc(args.variant, d, q, qstar) if q is not None else None
    thr_full = coherence_threshold(k, 0)
    thr_partial = coherence_threshold(k, l)
    operative = partial if partial is not None else full
    report = {
        "coherence": mu,
        "k": k,
        "l": l,
        "threshold_full": thr_full,
        "threshold_partial": thr_partial,
        "conditions": {
            "coherence_below_full_threshold": bool(mu < thr_full),
            "coherence_below_partial_threshold": bool(mu < thr_partial),
            "erc_satisfied": full.satisfied,
            "partial_erc_satisfied": partial.satisfied if partial is not None else None,
        },
        "erc": full.to_dict(),
        "partial_erc": partial.to_dict() if partial is not None else None,
    }
    if args.format == "csv":
        head = ["coherence", "threshold_full", "threshold_partial", "erc_lhs", "erc_satisfied",
                "partial_lhs", "partial_satisfied"]
        row = [_fmt(mu), _fmt(thr_full), _fmt(thr_partial), _fmt(full.lhs), str(full.satisfied),
               _fmt(partial.lhs) if partial else "", str(partial.satisfied) if partial else ""]
        print(",".join(head))
        print(",".join(row))
    else:
        print(json.dumps(report, indent=2))
    return 0 if operative.satisfied else 2


def cmd_worstcase(args) -> int:
    if args.l >= args.k or args.l < 0 or args.k < 1:
        raise InvalidArgs(f"need 0 <= l < k, got k={args.k}, l={args.l}")
    if 2 * args.k - args.l > 64:
        raise InvalidArgs(f"2k-l = {2 * args.k - args.l} exceeds the supported cap of 64")
    scenario = build_scenario(args.k, args.l, args.variant)
    trace = run(scenario.variant, scenario.dictionary, scenario.y, args.k)
    outcome = classify(trace, scenario.truth)
    reproduced = (
        list(trace.selected)[: args.l] == list(scenario.partial)
        and outcome.kind in (RecoveryOutcome.WRONG_ATOM, RecoveryOutcome.TIE_WITH_WRONG_ATOM)
        and outcome.iteration == args.l
    )
    os.makedirs(args.out, exist_ok=True)
    save_dictionary(scenario.dictionary, os.path.join(args.out, "dictionary.csv"))
    save_vector(scenario.y, os.path.join(args.out, "y.csv"))
    payload = scenario.to_dict()
    payload["replay"] = trace.to_dict(outcome)
    payload["reproduced"] = reproduced
    with open(os.path.join(args.out, "scenario.json"), "w") as fh:
        fh.write(json.dumps(payload, indent=2) + "\n")
    print(f"coherence = {_fmt(scenario.coherence)} (threshold {_fmt(scenario.threshold)})")
    print(f"prefix selections = {list(scenario.partial)}")
    print(f"truth = {list(scenario.truth)}; predicted wrong atom = {scenario.predicted_wrong}")
    if outcome.iteration is not None:
        print(f"failure iteration = {outcome.iteration + 1} (1-based), kind = {outcome.kind}")
    print(f"wrote dictionary.csv, y.csv, scenario.json to {args.out}")
    if not reproduced:
        print("scenario did NOT reproduce the predicted failure", file=sys.stderr)
        return 4
    return 0


def cmd_sweep(args) -> int:
    with open(args.config) as fh:
        raw = json.load(fh)
    if args.seed is not None:
        raw["seed"] = args.seed
    config = SweepConfig.from_dict(raw)
    report = run_sweep(config, jobs=args.jobs)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        csv_path = os.path.join(args.out, "sweep.csv")
        json_path = os.path.join(args.out, "sweep.json")
        with open(csv_path, "w") as fh:
            fh.write(report.to_csv())
        with open(json_path, "w") as fh:
            fh.write(report.to_json() + "\n")
        print(f"wrote {csv_path} and {json_path}")
    elif args.format == "json":
        print(report.to_json())
    else:
        print(report.to_csv(), end="")
    return 0


def cmd_prip(args) -> int:
    d = _load_dict(args.dict)
    mu = coherence(d)
    exact = prip_exact(d, args.q, args.l)
    try:
        bound = prip_coherence_bounds(args.q, args.l, mu)
    except OutOfDomain:
        bound = None
    if args.format == "csv":
        print("kind,q,l,lower,upper")
        print(f"exact,{exact.q},{exact.l},{_fmt(exact.lower)},{_fmt(exact.upper)}")
        if bound is not None:
            print(f"coherence_bound,{bound.q},{bound.l},{_fmt(bound.lower)},{_fmt(bound.upper)}")
    else:
        print(json.dumps({
            "coherence": mu,
            "exact": exact.to_dict(),
            "coherence_bound": bound.to_dict() if bound is not None else None,
        }, indent=2))
    return 0


def cmd_coherence(args) -> int:
    d = _load_dict(args.dict)
    report = {"m": d.m, "n": d.n, "coherence": coherence(d)}
    if args.spark:
        report["spark"] = spark(d)
    if args.format == "csv":
        print(",".join(report.keys()))
        print(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in report.values()))
    else:
        print(json.dumps(report, indent=2))
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="greedycert",
                     description="Greedy sparse recovery with exact-recovery certificates")
    parser.add_argument("--version", action="version", version=f"greedycert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a pursuit and report the trace")
    p.add_argument("--dict", required=True, help="dictionary CSV file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--y", help="observation vector file")
    g.add_argument("--instance", help="planted instance as index:coefficient pairs, e.g. '0:1,2:2'")
    p.add_argument("--variant", choices=["omp", "ols"], default="omp")
    p.add_argument("--k", type=int, required=True, help="number of selections")
    p.add_argument("--seed-support", help="comma-separated atoms treated as already selected")
    p.add_argument("--truth", help="planted support for classification, e.g. '0,2'")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("certify", help="evaluate exact-recovery conditions for a support")
    p.add_argument("--dict", required=True)
    p.add_argument("--qstar", required=True, help="planted support, e.g. '0,1,2'")
    p.add_argument("--q", help="correctly selected prefix (subset of qstar)")
    p.add_argument("--variant", choices=["omp", "ols"], default="omp")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("worstcase", help="build and replay a guaranteed failure at the threshold")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--variant", choices=["omp", "ols"], default="omp")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_worstcase)

    p = sub.add_parser("sweep", help="Monte Carlo success-rate sweep over (k, l) cells")
    p.add_argument("--config", required=True, help="sweep config JSON file")
    p.add_argument("--out", help="directory for sweep.csv and sweep.json")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("prip", help="projected restricted-isometry constants")
    p.add_argument("--dict", required=True)
    p.add_argument("--q", type=int, required=True, help="block size")
    p.add_argument("--l", type=int, required=True, help="projected-out support size")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_prip)

    p = sub.add_parser("coherence", help="mutual coherence (and optionally spark) of a dictionary")
    p.add_argument("--dict", required=True)
    p.add_argument("--spark", action="store_true", help="also compute the spark (small n only)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_coherence)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (InvalidArgs, InvalidSeed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RankDeficient as exc:
        print(f"rank deficiency: {exc}", file=sys.stderr)
        return 3
    except CalibrationFailed as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return 4
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GreedyCertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
