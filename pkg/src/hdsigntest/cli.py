"""Command-line front end.

Subcommands: ``two-sample`` and ``one-sample`` run tests on CSV files,
``simulate`` runs a seeded size/power study and writes plot data plus a
JSON run manifest, ``selftest`` validates the fast paths against the
naive oracles.

Exit codes: 0 success, 2 usage error, 3 data error.  All outputs are
deterministic given the flags; only the manifest timestamp varies.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys

from . import __version__
from ._selftest import TOLERANCE, run_selftest, selftest_passed
from .dataio import read_matrix_csv
from .errors import HDTestError
from .inference import (
    TestReport,
    asymptotic_one_sample,
    asymptotic_two_sample,
    randomization_one_sample,
    randomization_two_sample,
)
from .montecarlo import ExperimentPlan, run_power_study, summarize_to_plot_data

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3

_METHOD_TOKENS = {"asym": "asymptotic", "perm": "permutation", "oracle": "rsrm-oracle"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _report_lines(report: TestReport, fmt: str) -> str:
    data = report.to_dict()
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    if fmt == "csv":
        keys = [k for k in data if k not in ("nuisance", "schema")]
        nuis = data["nuisance"] or {}
        keys_n = [f"nuisance_{k}" for k in nuis]
        header = ",".join(keys + keys_n)
        values = [_csv_cell(data[k]) for k in keys] + [
            _csv_cell(v) for v in nuis.values()
        ]
        return header + "\n" + ",".join(values) + "\n"
    lines = [
        f"statistic {report.stat_kind}: {report.statistic!r}",
        f"method: {report.method}",
        f"p-value: {report.p_value!r}",
        f"reject at alpha={report.alpha!r}: {'yes' if report.reject else 'no'}",
    ]
    if report.z is not None:
        lines.insert(2, f"z-score: {report.z!r}")
    if report.n_resamples is not None:
        lines.append(f"resamples: {report.n_resamples} (seed {report.seed})")
    return "\n".join(lines) + "\n"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _add_common_test_flags(sub):
    sub.add_argument("--alpha", type=float, default=0.05)
    sub.add_argument("--perms", type=int, default=500,
                     help="number of resamples for randomization methods")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--format", choices=("json", "csv", "text"), default="json")


def build_parser() -> _Parser:
    parser = _Parser(prog="hdsigntest", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    two = subs.add_parser("two-sample", help="test E(X) = E(Y) from two CSV files")
    two.add_argument("--x", required=True, help="CSV file, one observation per row")
    two.add_argument("--y", required=True)
    two.add_argument("--stat", choices=("cq2", "wmw"), required=True)
    two.add_argument("--method", choices=("asymptotic", "permutation"), required=True)
    _add_common_test_flags(two)

    one = subs.add_parser("one-sample", help="test E(X) = 0 from a CSV file")
    one.add_argument("--x", required=True)
    one.add_argument("--stat", choices=("cq1", "s", "sr"), required=True)
    one.add_argument("--method", choices=("asymptotic", "signflip"), required=True)
    _add_common_test_flags(one)

    sim = subs.add_parser("simulate", help="run a seeded size/power study")
    sim.add_argument(
        "--model",
        choices=("ar1-gauss", "ar1-t5", "spherical-t5", "equicorr-gauss"),
        required=True,
    )
    sim.add_argument("--m", type=int, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--grid", required=True, help='grid points as "d:c,d:c,..."')
    sim.add_argument(
        "--tests", required=True,
        help='tests as "stat:method,..." with methods asym, perm or oracle',
    )
    sim.add_argument("--reps", type=int, required=True)
    sim.add_argument("--alpha", type=float, default=0.05)
    sim.add_argument("--perms", type=int, default=500)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--rho", type=float, default=0.7)
    sim.add_argument("--beta", type=float, default=0.7)
    sim.add_argument("--shift-style", choices=("first-coordinate", "spread-equally"),
                     default="first-coordinate")
    sim.add_argument("--out", required=True, help="plot-data CSV output path")

    self_p = subs.add_parser("selftest", help="validate fast paths against oracles")
    self_p.add_argument("--trials", type=int, default=100)
    self_p.add_argument("--seed", type=int, default=0)
    return parser


def _parse_grid(text: str):
    points = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        parts = token.split(":")
        if len(parts) != 2:
            raise _UsageError(f"bad grid token {token!r}, expected d:c")
        try:
            points.append((int(parts[0]), float(parts[1])))
        except ValueError:
            raise _UsageError(f"bad grid token {token!r}, expected d:c") from None
    if not points:
        raise _UsageError("grid is empty")
    return tuple(points)


def _parse_tests(text: str):
    tests = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        parts = token.split(":")
        if len(parts) != 2 or parts[0] not in ("cq2", "wmw") or parts[1] not in _METHOD_TOKENS:
            raise _UsageError(
                f"bad test token {token!r}, expected stat:method with stat in "
                "{cq2, wmw} and method in {asym, perm, oracle}"
            )
        tests.append((parts[0], _METHOD_TOKENS[parts[1]]))
    if not tests:
        raise _UsageError("test list is empty")
    return tuple(tests)


def _cmd_two_sample(args, out) -> int:
    x = read_matrix_csv(args.x)
    y = read_matrix_csv(args.y)
    if args.method == "asymptotic":
        report = asymptotic_two_sample(x, y, args.stat, args.alpha)
    else:
        report = randomization_two_sample(
            x, y, args.stat, args.alpha, args.perms, args.seed
        )
    out.write(_report_lines(report, args.format))
    return EXIT_OK


def _cmd_one_sample(args, out) -> int:
    x = read_matrix_csv(args.x)
    if args.method == "asymptotic":
        report = asymptotic_one_sample(x, args.stat, args.alpha)
    else:
        report = randomization_one_sample(
            x, args.stat, args.alpha, args.perms, args.seed
        )
    out.write(_report_lines(report, args.format))
    return EXIT_OK


def _cmd_simulate(args, out) -> int:
    if args.reps < 1:
        raise _UsageError("--reps must be at least 1")
    if args.perms < 1:
        raise _UsageError("--perms must be at least 1")
    tests = _parse_tests(args.tests)
    if any(method == "rsrm-oracle" for _, method in tests) and args.model not in (
        "spherical-t5",
    ):
        raise _UsageError(
            f"the oracle method needs latent scales; model {args.model!r} has none"
        )
    plan = ExperimentPlan(
        model=args.model,
        grid=_parse_grid(args.grid),
        m=args.m,
        n=args.n,
        tests=tests,
        replications=args.reps,
        alpha=args.alpha,
        n_resamples=args.perms,
        base_seed=args.seed,
        rho=args.rho,
        beta=args.beta,
        shift_style=args.shift_style,
    )
    points = run_power_study(plan)
    csv_text = summarize_to_plot_data(points)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(csv_text)
    manifest = {
        "schema": 1,
        "command": ["simulate"] + _echo_flags(args),
        "library_version": __version__,
        "plan": plan.to_dict(),
        "points": [
            {
                "model": p.model,
                "d": p.d,
                "c": p.c,
                "stat": p.stat,
                "method": p.method,
                "rate": p.rejection_rate,
                "se": p.std_err,
                "replications": p.replications,
            }
            for p in points
        ],
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    with open(args.out + ".manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
        handle.write("\n")
    out.write(f"wrote {len(points)} curve points to {args.out}\n")
    return EXIT_OK


def _echo_flags(args) -> list:
    skip = {"command", "func"}
    return [
        f"--{key.replace('_', '-')}={value}"
        for key, value in sorted(vars(args).items())
        if key not in skip
    ]


def _cmd_selftest(args, out) -> int:
    if args.trials < 1:
        raise _UsageError("--trials must be at least 1")
    results = run_selftest(args.trials, args.seed)
    width = max(len(name) for name in results)
    for name in sorted(results):
        dev = results[name]
        status = "ok" if dev <= TOLERANCE else "FAIL"
        out.write(f"{name:<{width}}  max relative deviation {dev:.3e}  [{status}]\n")
    if selftest_passed(results):
        out.write(f"all checks within {TOLERANCE:.0e}\n")
        return EXIT_OK
    out.write("selftest FAILED\n")
    return 1


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "two-sample":
            return _cmd_two_sample(args, out)
        if args.command == "one-sample":
            return _cmd_one_sample(args, out)
        if args.command == "simulate":
            return _cmd_simulate(args, out)
        return _cmd_selftest(args, out)
    except _UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except HDTestError as exc:
        err.write(f"data error: {exc}\n")
        return EXIT_DATA
    except OSError as exc:
        err.write(f"data error: {exc}\n")
        return EXIT_DATA


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
