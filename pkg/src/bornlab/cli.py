"""Command-line harness.

Subcommands: verify, train, sweep, compare, appendix. Exit codes: 0 on
success, 1 when a check or experiment fails, 2 on configuration errors.
"""

import argparse
import sys


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its fields")
    parser.add_argument("--out", help="output directory (default: out_<command>)")
    parser.add_argument("--seeds", help="comma-separated integer seeds overriding "
                                        "the default five-seed block")
    parser.add_argument("--shots", help="'exact' or a shot count per loss evaluation "
                                        "(default: 10000)")
    parser.add_argument("--jobs", type=int, help="parallel training workers (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bornlab",
        description="Train and benchmark quantum-neuron and layered-circuit "
                    "Born machines on a statevector simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", help="run the engine/algebra self-check suite")
    for name, text in (
        ("train", "train one configured model on one target"),
        ("sweep", "train every network topology on its matched constrained target"),
        ("compare", "non-linear network vs layered circuit on easy and hard targets"),
        ("appendix", "ablations: 2-layer circuit and linearized network"),
    ):
        _add_common_flags(sub.add_parser(name, help=text))
    return parser


def _run_verify() -> int:
    from .verification import run_verify

    report = run_verify()
    for res in report.results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: max_error={res.max_error:.3e} "
              f"(tol {res.tolerance:.0e}) - {res.detail}")
    if report.passed:
        print("all checks passed")
        return 0
    print("some checks FAILED", file=sys.stderr)
    return 1


def _summary_has_failures(summary: dict) -> bool:
    return any(model["failures"]
               for models in summary["targets"].values()
               for model in models.values())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return _run_verify()

    # deferred so `verify` never pays the plotting-stack import
    from . import experiments
    from .experiments import ConfigError, build_experiment_config, load_config

    try:
        doc = load_config(args.config) if args.config else None
        cfg = build_experiment_config(
            doc,
            out=args.out if args.out is not None else (doc or {}).get("out", f"out_{args.command}"),
            seeds=args.seeds,
            shots=args.shots if args.shots is not None else "unset",
            jobs=args.jobs,
        )
        if args.command == "train":
            summary = experiments.run_train(cfg)
            failed = _summary_has_failures(summary)
        elif args.command == "sweep":
            rows, _timings = experiments.run_sweep(cfg)
            failed = any(row["errors"] for row in rows)
        elif args.command == "compare":
            failed = _summary_has_failures(experiments.run_compare(cfg))
        else:
            failed = _summary_has_failures(experiments.run_appendix(cfg))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    print(f"results written to {cfg.out_dir}")
    if failed:
        print("some runs failed; see the errors/failures fields", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
