"""Command line interface: ``predinfo {simulate,analyze,surrogate-test,sweep}``.

Exit codes: 0 success, 2 input error, 3 numerical failure. Errors are also
written to stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import InputError, PredInfoError
from .gaussian_info import MODEL, SAMPLE, to_bits
from .lagged_moments import DEFAULT_Q
from .pipeline import DEFAULT_MAX_ORDER, AnalysisSettings, analyze_series
from .surrogates import SurrogateConfig, significance_test
from .sweep import PRESETS, SweepSpec, rows_to_csv, run_sweep
from .var_model import load_model, read_csv, simulate_var, write_csv

ANALYSIS_SCHEMA = "predinfo.analysis/1"


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_estimate(value: str) -> int:
    v = value.split("=", 1)[1] if value.upper().startswith("T=") else value
    try:
        n = int(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected T=<n>, got {value!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("T must be positive")
    return n


def cmd_simulate(args) -> int:
    model = load_model(args.model)
    series = simulate_var(model, args.samples, burn_in=args.burn_in, seed=args.seed)
    if args.out is None:
        raise InputError("simulate needs --out")
    write_csv(series, args.out, header=args.csv_header)
    return 0


def _analysis_settings(args) -> AnalysisSettings:
    top = args.order if args.order is not None else args.max_order
    q = args.q if args.q is not None else max(DEFAULT_Q, top)
    return AnalysisSettings(order=args.order, max_order=args.max_order, q=q, sigma_x=args.sigma_x)


def cmd_analyze(args, force_surrogates: bool = False) -> int:
    series = read_csv(args.series, header=args.csv_header)
    if series.n_vars < 2:
        raise InputError(f"need at least 2 columns, got {series.n_vars}")
    settings = _analysis_settings(args)
    analysis = analyze_series(series, settings)
    scale = to_bits(1.0) if args.units == "bits" else 1.0
    doc = {
        "schema": ANALYSIS_SCHEMA,
        "input": str(args.series),
        "n_samples": series.n_samples,
        "n_vars": series.n_vars,
        "labels": list(series.labels) if series.labels else None,
        "order": analysis.model.order,
        "bic": list(analysis.bic) if analysis.bic else None,
        "q": settings.q,
        "sigma_x": settings.sigma_x,
        "model": analysis.model.to_dict(),
        "result": analysis.result.to_dict(args.units),
    }
    n_sur = args.surrogates if args.surrogates else (100 if force_surrogates else 0)
    if n_sur:
        cfg = SurrogateConfig(n_surrogates=n_sur, alpha=args.alpha, seed=args.seed)
        report = significance_test(series, cfg, settings, original=analysis.result)
        doc["significance"] = report.to_dict(include_values=args.keep_surrogates, scale=scale)
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_sweep(args) -> int:
    if args.spec:
        try:
            spec = SweepSpec.from_dict(json.loads(Path(args.spec).read_text()))
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON in {args.spec}: {exc}") from exc
    else:
        spec = PRESETS[args.preset](steps=args.steps)
    rows = run_sweep(
        spec,
        q=args.q if args.q is not None else DEFAULT_Q,
        estimate=args.estimate,
        seed=args.seed,
        max_order=args.max_order,
        jobs=args.jobs,
    )
    _emit(rows_to_csv(spec, rows, args.units), args.out)
    return 0


def _add_common(p, analysis: bool = True):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--units", choices=("nats", "bits"), default="nats")
    p.add_argument("--q", type=int, default=None, help=f"restricted-model order (default {DEFAULT_Q})")
    p.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER)
    if analysis:
        p.add_argument("--order", type=int, default=None, help="fixed VAR order (default: BIC)")
        p.add_argument("--sigma-x", choices=(MODEL, SAMPLE), default=MODEL)
        p.add_argument("--csv-header", action="store_true")
        p.add_argument("--surrogates", type=int, default=0, metavar="N")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--keep-surrogates", action="store_true",
                       help="include every surrogate value in the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="predinfo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a VAR model given as JSON")
    p.add_argument("model")
    p.add_argument("--samples", "-T", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--csv-header", action="store_true")

    for name, help_ in (
        ("analyze", "fit a VAR to a CSV series and decompose its predictive information"),
        ("surrogate-test", "analyze with surrogate significance testing (100 surrogates by default)"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("series")
        _add_common(p)

    p = sub.add_parser("sweep", help="decompose over a grid of coefficient values")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--spec", help="sweep spec JSON")
    src.add_argument("--preset", choices=sorted(PRESETS), default="three-unit")
    p.add_argument("--steps", type=int, default=26, help="grid steps per axis for presets")
    p.add_argument("--estimate", type=_parse_estimate, default=None, metavar="T=<n>",
                   help="simulate and re-estimate each grid point instead of the analytic route")
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p, analysis=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "surrogate-test":
            return cmd_analyze(args, force_surrogates=True)
        return cmd_sweep(args)
    except PredInfoError as exc:
        code = exc.exit_code
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    except OSError as exc:
        code = 2
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(err) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
