"""Command-line front end: sweeps, single solves, counterexamples, validators.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 I/O error.
argparse's own usage errors already exit with status 2, which matches the
invalid-input convention, so they are left alone.
"""

from __future__ import annotations

import argparse
import sys

from .errors import InvalidInputError, NumericalFailureError, RetryExhaustedError
from .harness import CSV_HEADER, SweepSpec, run_trial, sweep
from .landscape import (
    CONDITION_FAILS,
    CONDITION_NON_STRICT,
    CONDITION_STRICT,
    NON_STRICT_2_CRITICAL,
    NOT_2_CRITICAL,
    STRICT_2_CRITICAL,
    certify,
    planar7_example,
    preset_example,
)
from .theory import (
    check_certificates,
    check_edm_properties,
    check_second_order_inequality,
    check_sensing_map_properties,
    make_random_sensing_map,
    rip_lower_bound,
)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INVALID = 2
EXIT_IO = 3

PROPERTY_SETS = ("P", "Q", "cute", "rip", "certificates")

# A valid construction pairs each condition verdict with the Hessian verdict
# certification must reproduce.
_EXPECTED_BY_CONDITION = {
    CONDITION_STRICT: STRICT_2_CRITICAL,
    CONDITION_NON_STRICT: NON_STRICT_2_CRITICAL,
    CONDITION_FAILS: NOT_2_CRITICAL,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snl",
        description="Sensor-network localization landscape toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a rank/density sweep from a JSON spec")
    p_sweep.add_argument("--config", required=True, help="sweep spec JSON file")
    p_sweep.add_argument("--out", required=True, help="output CSV path")

    p_solve = sub.add_parser("solve", help="run and print a single trial")
    p_solve.add_argument("--n", type=int, required=True)
    p_solve.add_argument("--dg", type=int, required=True)
    p_solve.add_argument("--k", type=int, required=True)
    p_solve.add_argument("--density", type=float, required=True)
    p_solve.add_argument("--seed", type=int, required=True)
    p_solve.add_argument("--noise-variance", type=float, default=0.0)

    p_example = sub.add_parser(
        "counterexample", help="build a spurious-minimizer preset and certify it"
    )
    p_example.add_argument(
        "preset", help="planar7, simplex(dg), or mixed7(dg)"
    )
    p_example.add_argument(
        "--verify",
        action="store_true",
        help="exit 1 unless certification matches the construction's verdict",
    )

    p_check = sub.add_parser(
        "check-properties", help="run numerical validators of the operator theory"
    )
    p_check.add_argument("--n", type=int, required=True)
    p_check.add_argument("--trials", type=int, required=True)
    p_check.add_argument("--seed", type=int, required=True)
    p_check.add_argument("--set", dest="which", choices=PROPERTY_SETS, default=None)
    return parser


def _cmd_sweep(args) -> int:
    spec = SweepSpec.from_file(args.config)
    records, summary = sweep(spec, args.out)
    print(f"experiment {spec.experiment_id}: {len(records)} trials -> {args.out}")
    print(f"{'k':>5} {'density':>9} {'success':>9} {'connectivity':>13}")
    for cell in summary:
        print(
            f"{cell.k:>5} {cell.density:>9.3f} {cell.success_rate:>9.3f}"
            f" {cell.connectivity_rate:>13.3f}"
        )
    return EXIT_OK


def _cmd_solve(args) -> int:
    spec = SweepSpec(
        n=args.n,
        dg=args.dg,
        k_values=(args.k,),
        densities=(args.density,),
        trials_per_cell=1,
        base_seed=args.seed,
        noise_variance=args.noise_variance,
    )
    record = run_trial(spec, 0, 0)
    print(CSV_HEADER)
    print(record.csv_row())
    return EXIT_OK


def _format_float(value) -> str:
    return "n/a" if value is None else f"{value:.6e}"


def _cmd_counterexample(args) -> int:
    example = preset_example(args.preset)
    instance = example.instance()
    report = certify(instance, example.spurious)
    print(f"preset: {example.label}")
    print(f"n: {example.n}")
    print(f"dg: {example.dg}")
    print(f"condition_verdict: {example.condition_verdict}")
    print(f"certified_verdict: {report.verdict}")
    print(f"gradient_norm: {report.grad_norm:.6e}")
    print(f"min_eigenvalue: {_format_float(report.min_eigenvalue)}")
    print(f"negative_eigenvalues: {report.num_negative}")
    print(f"kernel_dimension: {report.kernel_dimension}")
    print(f"symmetry_dimension: {report.symmetry_dimension}")
    if args.verify:
        expected = _EXPECTED_BY_CONDITION[example.condition_verdict]
        if report.verdict != expected:
            print(f"VERIFY FAIL: expected {expected}, certified {report.verdict}")
            return EXIT_VERIFICATION
        print(f"VERIFY OK: {report.verdict}")
    return EXIT_OK


def _print_report(report) -> bool:
    status = "PASS" if report.passed else "FAIL"
    print(
        f"{report.property_id}: {status} (trials={report.trials},"
        f" max_violation={report.max_violation:.3e}, tolerance={report.tolerance:.3e})"
    )
    return report.passed


def _cmd_check_properties(args) -> int:
    which = PROPERTY_SETS if args.which is None else (args.which,)
    all_passed = True
    for name in which:
        if name == "P":
            for report in check_edm_properties(args.n, args.trials, args.seed):
                all_passed &= _print_report(report)
        elif name == "Q":
            dim = args.n * (args.n - 1) // 2
            smap = make_random_sensing_map(args.n, dim, args.seed)
            for report in check_sensing_map_properties(smap, args.trials, args.seed):
                all_passed &= _print_report(report)
        elif name == "cute":
            example = planar7_example()
            report = check_second_order_inequality(
                example.instance(), example.spurious, args.trials, args.seed
            )
            all_passed &= _print_report(report)
        elif name == "rip":
            bound = rip_lower_bound(args.n)
            print(f"rip-lower-bound: PASS (n={args.n}, bound={bound:.12f})")
        elif name == "certificates":
            example = planar7_example()
            for report in check_certificates(example.spurious, example.ground_truth):
                all_passed &= _print_report(report)
    return EXIT_OK if all_passed else EXIT_VERIFICATION


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "sweep": _cmd_sweep,
        "solve": _cmd_solve,
        "counterexample": _cmd_counterexample,
        "check-properties": _cmd_check_properties,
    }
    try:
        return handlers[args.command](args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericalFailureError, RetryExhaustedError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
