"""Command-line front end: ``renewsim run|verify-all|list-scenarios``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
errors and unreadable or invalid scenario files.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from renewsim.runner import (EXIT_FAIL, EXIT_PASS, EXIT_USAGE, reproducibility_matrix, run,
                             verify_all)
from renewsim.scenario import ParseError, ValidationError, bundled_scenarios, load_scenario


def _positive_int(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return val


def _positive_float(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def _resolve(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    for p in bundled_scenarios():
        if p.stem == name:
            return p
    return path


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--workers", type=_positive_int, help="worker processes")
    common.add_argument("--replicas", type=_positive_int, help="Monte Carlo replicas")
    common.add_argument("--grid-step", type=_positive_float, help="renewal grid step h")
    common.add_argument("--out-dir", type=Path, default=Path("reports"),
                        help="report directory (default: ./reports)")

    parser = argparse.ArgumentParser(prog="renewsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    p_run = sub.add_parser("run", parents=[common], help="run one scenario file")
    p_run.add_argument("file", help="scenario path or bundled scenario name")
    p_all = sub.add_parser("verify-all", parents=[common],
                           help="run every bundled scenario and print the verdict matrix")
    p_all.add_argument("--reproducibility", action="store_true",
                       help="also compare verdicts across seeds 1,2,3 and workers 1,8")
    sub.add_parser("list-scenarios", help="list bundled scenarios")
    return parser


def _overrides(args):
    return dict(seed=args.seed, workers=args.workers, replicas=args.replicas,
                grid_step=args.grid_step)


def _cmd_run(args) -> int:
    try:
        sc = load_scenario(_resolve(args.file)).with_overrides(**_overrides(args))
    except (ParseError, ValidationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    res = run(sc, args.out_dir)
    for c in res.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<24} [{c.formula}]")
    if res.error:
        print(f"error: {res.error}", file=sys.stderr)
    print(f"reports: {args.out_dir / sc.name}")
    if not res.passed:
        print(f"failed: {', '.join(res.failed_checks)}", file=sys.stderr)
    return EXIT_PASS if res.passed else EXIT_FAIL


def _cmd_verify_all(args) -> int:
    summary = verify_all(out_dir=args.out_dir, **_overrides(args))
    print(summary.format())
    ok = summary.passed
    if args.reproducibility:
        mats = reproducibility_matrix(replicas=args.replicas)
        first = next(iter(mats.values()))
        same = all(m == first for m in mats.values())
        for (seed, workers), m in mats.items():
            verdicts = " ".join(f"{c}={'P' if v else 'F'}" for c, v in m.items())
            print(f"seed={seed} workers={workers}: {verdicts}")
        print(f"{'AC11':<10} {'PASS' if same else 'FAIL':<7} reproducibility")
        ok = ok and same
    return EXIT_PASS if ok else EXIT_FAIL


def _cmd_list(args) -> int:
    for path in bundled_scenarios():
        try:
            sc = load_scenario(path)
            print(f"{sc.name:<28} {sc.mode:<12} {','.join(sc.criteria):<10} {sc.description}")
        except (ParseError, ValidationError) as exc:
            print(f"{path.stem:<28} invalid: {exc}")
    return EXIT_PASS


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    handler = {"run": _cmd_run, "verify-all": _cmd_verify_all,
               "list-scenarios": _cmd_list}[args.verb]
    return handler(args)


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
