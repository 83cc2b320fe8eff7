"""Command-line entry point.

Exit codes: 0 on success (whatever the decision), 2 on usage, input or
validation errors, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import math
import sys

from quantest.core import DispersionRule, Kernel, QuantileSpec, TestConfig
from quantest.errors import InputError, NumericalError
from quantest.inference import median_test
from quantest.montecarlo import Family, PowerConfig, power_curve
from quantest.plot import power_curve_svg
from quantest.report import build_report, format_text, parse_samples, power_csv, write_atomic

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def parse_delta_grid(text: str) -> tuple[float, ...]:
    """``start:stop:step`` with ``stop`` included when it lies on the grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"--deltas expects start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise InputError(f"--deltas has a non-numeric field: {text!r}") from None
    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise InputError("--deltas fields must be finite")
    if step <= 0:
        raise InputError("--deltas step must be positive")
    if start < 0 or stop < start:
        raise InputError("--deltas needs 0 <= start <= stop")
    count = math.floor((stop - start) / step + 1e-9) + 1
    return tuple(round(start + i * step, 12) for i in range(count))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quantest", description="k-sample test for equal medians or quantiles")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="run the test on CSV samples")
    src = t.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", nargs="+", metavar="PATH", help="one CSV per group (single numeric column)")
    src.add_argument("--grouped", metavar="PATH", help="one CSV with group,value columns")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--quantile", type=float, default=0.5, help="quantile level p (default 0.5, the median)")
    t.add_argument("--kernel", choices=[k.value for k in Kernel], default=Kernel.GAUSSIAN.value)
    t.add_argument("--bandwidth-const", type=float, default=1.0)
    t.add_argument("--dispersion", choices=[d.value for d in DispersionRule], default=DispersionRule.ROBUST.value)
    t.add_argument("--format", choices=["json", "text"], default="json")

    p = sub.add_parser("power", help="Monte Carlo power curve for shift alternatives")
    p.add_argument("--family", choices=[f.value for f in Family], default=Family.NORMAL.value)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--deltas", default="0:0.5:0.025", help="start:stop:step (default 0:0.5:0.025)")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: $QUANTEST_THREADS or CPU count)")
    p.add_argument("--out", metavar="CSV", help="output CSV path (default: standard output)")
    p.add_argument("--svg", metavar="PATH", help="also write an SVG plot of the curve")
    return parser


def cmd_test(args) -> int:
    config = TestConfig(
        quantile=QuantileSpec(args.quantile),
        alpha=args.alpha,
        kernel=args.kernel,
        bandwidth_const=args.bandwidth_const,
        dispersion_rule=args.dispersion,
    )
    samples = parse_samples(paths=args.input) if args.input else parse_samples(grouped=args.grouped)
    outcome = median_test(samples, config)
    report = build_report(samples, config, outcome)
    if args.format == "json":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(format_text(report, outcome.critical_value))
    return EXIT_OK


def cmd_power(args) -> int:
    config = PowerConfig(
        family=args.family,
        k=args.k,
        n=args.n,
        deltas=parse_delta_grid(args.deltas),
        reps=args.reps,
        alpha=args.alpha,
        seed=args.seed,
    )
    points = power_curve(config, workers=args.workers)
    text = power_csv(points)
    svg = None
    if args.svg:
        title = f"{config.family.value}, k={config.k}, n={config.n}, reps={config.reps}"
        svg = power_curve_svg(points, config.alpha, title)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    if svg is not None:
        write_atomic(args.svg, svg)
    errors = sum(p.errors for p in points)
    if errors:
        print(f"warning: {errors} replication(s) had a degenerate density estimate", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = cmd_test if args.command == "test" else cmd_power
        return handler(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (InputError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
        print(f"quantest: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"quantest: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except Exception as exc:  # noqa: BLE001
        print(f"quantest: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
