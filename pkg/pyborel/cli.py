"""
Command-line front door: ``pyborel <command> [flags]``.

JSON output is {command, config, results, errors_bounds, runtime_ms}; CSV
output is the command's table. Exit codes: 0 success, 2 bad arguments,
3 tolerance not met, 4 domain error.
"""
import argparse
import csv
import io
import json
import logging
import sys
import time
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from mpmath import mp

from . import acceptance, borel, generalized, gumbel, series, special
from .alpha import Alpha, AlphaKind, parse_alpha
from .errors import (
    DomainError,
    EstimationError,
    PrecisionError,
    PreconditionError,
    PyBorelError,
    ToleranceNotMetError,
)
from .precision import PrecisionConfig, PrecisionReal
from .quadrature import SCHEMES, QuadratureConfig
from .utils import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TOLERANCE = 3
EXIT_DOMAIN = 4

Table = Tuple[Sequence[str], List[Sequence[object]]]


class CommandResult:
    def __init__(self, results: dict, errors_bounds: Optional[dict] = None,
                 table: Optional[Table] = None, ok: bool = True):
        self.results = results
        self.errors_bounds = errors_bounds or {}
        self.table = table
        self.ok = ok


# -- argument parsing ---------------------------------------------------------

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=None,
                        help="decimal digits (default: PYBOREL_DIGITS or 60)")
    common.add_argument("--guard-digits", type=int, default=None,
                        help="guard digits (default: PYBOREL_GUARD_DIGITS or 10)")
    common.add_argument("--budget", type=int, default=4096, help="quadrature node budget")
    common.add_argument("--scheme", choices=SCHEMES, default=SCHEMES[0], help="quadrature scheme")
    common.add_argument("--tolerance", type=float, default=None,
                        help="quadrature tolerance (default 10^-(digits - guard))")
    common.add_argument("--interval-cap", type=int, default=20, help="Laplace cut-off U")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", default=None, help="write to this file instead of stdout")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    return common


def _offsets(text: str) -> List[Fraction]:
    try:
        return [Fraction(part.strip()) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"offsets must be comma-separated rationals or decimals, got {text!r}")


def _criteria(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"criteria must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="pyborel",
        description="Borel sums, Stokes constants and the alpha = 1/e dichotomy for S_gamma + alpha S_delta",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("constants", parents=[common], help="gamma, delta, Ein(1), Ei(1) by every route")
    p.add_argument("--names", default=",".join(special.CONSTANT_NAMES))

    p = sub.add_parser("prop1", parents=[common], help="partial-sum trace of S(alpha)")
    p.add_argument("--alpha", default="1/e")
    p.add_argument("--terms", type=int, default=1000)

    p = sub.add_parser("alpha-scan", parents=[common], help="optimal truncation around a centre alpha")
    p.add_argument("--center", default="1/e")
    p.add_argument("--offsets", type=_offsets, default=_offsets("1e-3,1e-6,1e-9"))
    p.add_argument("--terms", type=int, default=400)

    p = sub.add_parser("borel", parents=[common], help="Laplace (Borel) sum and root-test radius")
    p.add_argument("--kind", choices=("gamma", "delta", "combined"), default="combined")
    p.add_argument("--alpha", default="1/e")
    p.add_argument("--terms", type=int, default=200)
    p.add_argument("--tail-method", choices=borel.TAIL_METHODS, default="telescoping")

    p = sub.add_parser("stokes", parents=[common], help="Stokes constant at u = -1")
    p.add_argument("--target", default="gamma", help="gamma, delta, combined or generalized")
    p.add_argument("--alpha", default=None)
    p.add_argument("--samples", type=int, default=24)
    p.add_argument("--n", type=int, default=2, help="order for the generalized target")
    p.add_argument("--kind", choices=generalized.STOKES_KINDS, default="gamma",
                   help="transform for the generalized target")

    p = sub.add_parser("moments", parents=[common], help="Gumbel moments and the closure identity")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--samples", type=int, default=None, help="Monte Carlo samples (needs --seed)")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("gen-series", parents=[common], help="order-n series trace")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--alpha", default="1/e")
    p.add_argument("--terms", type=int, default=None, help="default 1000")

    p = sub.add_parser("verify-all", parents=[common], help="run every acceptance criterion")
    p.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
    p.add_argument("--samples", type=int, default=acceptance.MONTE_CARLO_SAMPLES)
    p.add_argument("--only", type=_criteria, default=None, help="comma-separated criterion numbers")
    return parser


def _configs(args) -> Tuple[PrecisionConfig, QuadratureConfig]:
    config = PrecisionConfig.from_env(digits=args.digits, guard_digits=args.guard_digits)
    quad = QuadratureConfig(scheme=args.scheme, node_budget=args.budget, tolerance=args.tolerance,
                            interval_cap=args.interval_cap)
    return config, quad


# -- commands -----------------------------------------------------------------

def _trace_table(trace: series.PartialSumTrace) -> Table:
    return series.PartialSumTrace.CSV_HEADER, [row.csv_row() for row in trace.rows]


def cmd_constants(args, config, quad) -> CommandResult:
    names = [name.strip() for name in args.names.split(",") if name.strip()]
    reports = [special.constant_report(name, config, quad) for name in names]
    rows = [(r.name, route, value.nstr(), mp.nstr(value.radius, 5)) for r in reports for route, value in r.routes]
    return CommandResult(
        results={r.name: r.to_dict() for r in reports},
        errors_bounds={r.name: mp.nstr(r.max_pairwise_discrepancy, 5) for r in reports},
        table=(("name", "route", "value", "radius"), rows),
    )


def cmd_prop1(args, config, quad) -> CommandResult:
    alpha = parse_alpha(args.alpha)
    trace = series.partial_sums(alpha, args.terms, config)
    results = {"trace": trace.to_dict()}
    bounds = {"final_radius": mp.nstr(trace.final.radius, 5)}
    if alpha.is_reciprocal_e:
        estimate = series.limit_estimate(args.terms, config=config)
        ein1 = special.ein(PrecisionReal(1, 0, config))
        results["limit_estimate"] = estimate.to_dict()
        results["ein1"] = ein1.nstr()
        bounds["limit_error"] = mp.nstr(estimate.distance(ein1), 5)
        bounds["tail_enclosure_width"] = str(series.limit_tail_enclosure(args.terms).width)
    return CommandResult(results, bounds, _trace_table(trace))


def _shifted(center: Alpha, offset: Fraction) -> Alpha:
    if center.kind is AlphaKind.RECIPROCAL_E:
        return Alpha.reciprocal_e(center.rational + offset)
    if center.kind is AlphaKind.RATIONAL:
        return Alpha.exact(center.rational + offset)
    raise PreconditionError("alpha-scan needs an exact centre")


def cmd_alpha_scan(args, config, quad) -> CommandResult:
    center = parse_alpha(args.center)
    rows, entries = [], []
    for offset in args.offsets:
        for signed in (offset, -offset):
            alpha = _shifted(center, signed)
            trace = series.partial_sums(alpha, args.terms, config)
            report = series.optimal_truncation(alpha, config, max_terms=args.terms)
            entry = dict(report.to_dict(), verdict=trace.verdict.value)
            entries.append(entry)
            rows.append((entry["alpha"], entry["verdict"], entry["k_star"], entry["min_term"],
                         entry["best_error"], entry["borel_error"]))
    return CommandResult(
        results={"center": str(center), "rows": entries},
        errors_bounds={"best_error": {e["alpha"]: e["best_error"] for e in entries}},
        table=(("alpha", "verdict", "k_star", "min_term", "best_error", "borel_error"), rows),
    )


def cmd_borel(args, config, quad) -> CommandResult:
    alpha = parse_alpha(args.alpha) if args.kind == "combined" else None
    total = borel.laplace_borel_sum(args.kind, alpha=alpha, quad=quad, config=config, tail_method=args.tail_method)
    if args.kind == "delta":
        reference = special.gompertz_delta(config, quad)
    elif args.kind == "gamma":
        reference = special.euler_gamma(config)
    else:
        reference = special.euler_gamma(config) + alpha.value(config) * special.gompertz_delta(config, quad)
    radius = borel.radius_of_convergence(borel.transform_coefficients(args.kind, args.terms, alpha), config=config)
    discrepancy = total.distance(reference)
    return CommandResult(
        results={
            "kind": args.kind,
            "alpha": str(alpha) if alpha else None,
            "laplace_sum": total.to_dict(),
            "reference": reference.to_dict(),
            "radius_of_convergence": radius.to_dict(),
        },
        errors_bounds={"discrepancy": mp.nstr(discrepancy, 5), "laplace_radius": mp.nstr(total.radius, 5)},
        table=(("quantity", "value", "radius"), [
            ("laplace_sum", total.nstr(), mp.nstr(total.radius, 5)),
            ("reference", reference.nstr(), mp.nstr(reference.radius, 5)),
            ("radius_of_convergence", radius.nstr(12), mp.nstr(radius.radius, 5)),
        ]),
    )


def cmd_stokes(args, config, quad) -> CommandResult:
    if args.target.strip().lower() == "generalized":
        estimate = generalized.coefficient_stokes(args.n, args.kind, config=config)
    else:
        estimate = borel.stokes_constant(args.target, samples=args.samples, alpha=args.alpha, config=config)
    return CommandResult(
        results=estimate.to_dict(),
        errors_bounds={"extrapolation": mp.nstr(estimate.extrapolated.radius, 5)},
        table=(("point", "ratio"), [(mp.nstr(u, 20), r.nstr(30)) for u, r in estimate.samples]),
    )


def cmd_moments(args, config, quad) -> CommandResult:
    report = gumbel.moment_report(args.n, config, quad, samples=args.samples, seed=args.seed)
    rows = [(name, route, value.nstr(), mp.nstr(value.radius, 5))
            for name, routes in report.routes.items() for route, value in routes.items()]
    return CommandResult(
        results=report.to_dict(),
        errors_bounds={"identity_residual": mp.nstr(report.identity_residual, 5)},
        table=(("quantity", "route", "value", "radius"), rows),
    )


def cmd_gen_series(args, config, quad) -> CommandResult:
    terms = args.terms or 1000
    alpha = parse_alpha(args.alpha)
    trace = generalized.generalized_partial_sums(args.n, alpha, terms, config)
    results = {"trace": trace.to_dict()}
    bounds = {"final_radius": mp.nstr(trace.final.radius, 5)}
    if alpha.is_reciprocal_e:
        estimate = generalized.generalized_limit_estimate(args.n, terms, config=config)
        target = gumbel.moment_positive(args.n, config, quad)
        results["limit_estimate"] = estimate.to_dict()
        results["moment_positive"] = target.nstr()
        bounds["limit_error"] = mp.nstr(estimate.distance(target), 5)
    return CommandResult(results, bounds, _trace_table(trace))


def cmd_verify_all(args, config, quad) -> CommandResult:
    report = acceptance.run_acceptance(config, quad, seed=args.seed, samples=args.samples, only=args.only)
    rows = [(r.criterion, r.name, "pass" if r.passed else "fail", round(r.runtime_ms, 1)) for r in report.results]
    return CommandResult(
        results=report.to_dict(),
        errors_bounds={"failed": [r.name for r in report.failures]},
        table=(("criterion", "name", "status", "runtime_ms"), rows),
        ok=report.passed,
    )


HANDLERS = {
    "constants": cmd_constants,
    "prop1": cmd_prop1,
    "alpha-scan": cmd_alpha_scan,
    "borel": cmd_borel,
    "stokes": cmd_stokes,
    "moments": cmd_moments,
    "gen-series": cmd_gen_series,
    "verify-all": cmd_verify_all,
}


# -- output -------------------------------------------------------------------

def _config_record(args, config: PrecisionConfig, quad: QuadratureConfig) -> Dict[str, object]:
    record = {k: v for k, v in vars(args).items() if k not in ("format", "output", "log_level")}
    record.update(digits=config.digits, guard_digits=config.guard_digits,
                  scheme=quad.scheme, node_budget=quad.node_budget, interval_cap=quad.interval_cap)
    if "offsets" in record:
        record["offsets"] = [str(o) for o in record["offsets"]]
    return record


def render(args, config, quad, outcome: CommandResult, runtime_ms: float) -> str:
    if args.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        header, rows = outcome.table
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()
    document = {
        "command": args.command,
        "config": _config_record(args, config, quad),
        "results": outcome.results,
        "errors_bounds": outcome.errors_bounds,
        "runtime_ms": round(runtime_ms, 1),
    }
    return json.dumps(document, indent=2, default=str) + "\n"


def _emit(text: str, output: Optional[str]):
    if output:
        with open(output, "w", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run one command and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    if args.log_level:
        try:
            configure_logging(args.log_level)
        except ValueError as e:
            parser.print_usage(sys.stderr)
            print(f"pyborel: error: {e}", file=sys.stderr)
            return EXIT_USAGE

    start = time.perf_counter()
    try:
        config, quad = _configs(args)
        outcome = HANDLERS[args.command](args, config, quad)
    except PreconditionError as e:
        print(f"pyborel {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ToleranceNotMetError, PrecisionError) as e:
        print(f"pyborel {args.command}: {e}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (DomainError, EstimationError) as e:
        print(f"pyborel {args.command}: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except PyBorelError as e:
        print(f"pyborel {args.command}: {e}", file=sys.stderr)
        return EXIT_TOLERANCE

    _emit(render(args, config, quad, outcome, (time.perf_counter() - start) * 1000), args.output)
    if not outcome.ok:
        logger.warning("%s: checks failed: %s", args.command, outcome.errors_bounds.get("failed"))
        return EXIT_TOLERANCE
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
