"""Command-line front end.

Subcommands: run, check, compare, dump-superop, list-scenarios.  The check
subcommand exits nonzero iff any invariant check fails; the others exit
nonzero only on errors.  WAVEOP_OUT_DIR overrides the default output
directory when --out is not given.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from .runner import check_invariants, compare_models, dump_superoperator, run_scenario
from .scenario import ScenarioError


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", help="scenario file (JSON)")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    parser.add_argument("--tolerance-scale", type=float, default=1.0,
                        help="multiply all check tolerances by this factor")
    parser.add_argument("--integrator", choices=("exact", "stepping"), default=None,
                        help="override the scenario's integrator")
    parser.add_argument("--dt", type=float, default=None, help="override the stepping substep cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waveop",
        description="Simulate generalized unitary evolution between pure and mixed states",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("run", help="run a scenario and write its time series"))
    _add_common(sub.add_parser("check", help="run the invariant battery; exit 1 on any failure"))
    _add_common(sub.add_parser("compare", help="run both models on matched dephasing"))
    dump = sub.add_parser("dump-superop", help="write the extended-space generator as a table")
    dump.add_argument("config", help="scenario file (JSON)")
    dump.add_argument("--out", default=None, help="output directory")
    sub.add_parser("list-scenarios", help="list scenario files shipped with the package")
    return parser


def _print_report(report) -> None:
    for line in report.lines():
        print(line)
    for path in report.outputs:
        print(f"wrote {path}")
    print(f"scenario {report.scenario}: {'ok' if report.passed else 'FAILED'} "
          f"({report.duration_s:.3f} s)")


def list_scenarios() -> list[str]:
    root = resources.files("waveop").joinpath("scenarios")
    names = sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))
    return names


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            report = run_scenario(args.config, out_dir=args.out, seed=args.seed,
                                  tolerance_scale=args.tolerance_scale,
                                  integrator=args.integrator, dt=args.dt)
            _print_report(report)
            return 0
        if args.command == "check":
            report = check_invariants(args.config, out_dir=args.out, seed=args.seed,
                                      tolerance_scale=args.tolerance_scale,
                                      integrator=args.integrator, dt=args.dt)
            _print_report(report)
            return 0 if report.passed else 1
        if args.command == "compare":
            report = compare_models(args.config, out_dir=args.out, seed=args.seed,
                                    tolerance_scale=args.tolerance_scale,
                                    integrator=args.integrator, dt=args.dt)
            _print_report(report)
            return 0
        if args.command == "dump-superop":
            path = dump_superoperator(args.config, out_dir=args.out)
            print(f"wrote {path}")
            return 0
        if args.command == "list-scenarios":
            root = resources.files("waveop").joinpath("scenarios")
            for name in list_scenarios():
                print(f"{name[:-5]}  {root.joinpath(name)}")
            return 0
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
