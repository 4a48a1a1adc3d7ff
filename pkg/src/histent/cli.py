"""Command-line front end.

Exit codes: 0 success, 1 self-check failure, 2 data or usage errors,
3 numerical errors.
"""
from __future__ import annotations

import argparse
import datetime as dt
import io
import logging
import os
import sys
from pathlib import Path

from . import __version__, selfcheck
from ._backend import BACKEND
from .analysis import (
    compare_to_reference,
    cumulative_analysis,
    emit,
    find_extremal_windows,
    window_analysis,
)
from .coherent import EmbeddingConfig, ToleranceConfig
from .errors import DataError, HistentError, IoFailure, NumericalError
from .timeseries import ColumnSchema, WindowSpec, aggregate, partition, read_price_csv

DATA_DIR_ENV = "HISTENT_DATA_DIR"

EXIT_OK = 0
EXIT_SELFCHECK = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(DataError):
    pass


def resolve_path(path: str) -> Path:
    """Relative paths missing from the working directory are looked up in $HISTENT_DATA_DIR."""
    p = Path(path)
    if p.is_absolute() or p.exists():
        return p
    data_dir = os.environ.get(DATA_DIR_ENV)
    if data_dir and (Path(data_dir) / p).exists():
        return Path(data_dir) / p
    return p


def _window(text: str):
    if text == "full":
        return None
    try:
        return WindowSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad date {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="histent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="entropy records for a price CSV")
    a.add_argument("--input", required=True)
    a.add_argument("--date-column", default="Date")
    a.add_argument("--value-column", default="Open")
    a.add_argument("--sigma-r", type=float, default=1.0,
                   help="gaussian width in price units (log units with --log-prices)")
    a.add_argument("--log-prices", action="store_true")
    a.add_argument("--q", type=float, action="append", dest="qs",
                   help="entropy order; repeatable (default 1 and 2; 1 is von Neumann)")
    a.add_argument("--window", type=_window, default=None, metavar="{full,month,week,fixed:K}",
                   help="default full (cumulative prefixes)")
    a.add_argument("--stride", type=int, default=None,
                   help="prefix stride for full histories (default 10, or 1 for q=2 only)")
    a.add_argument("--start", type=_date)
    a.add_argument("--end", type=_date)
    a.add_argument("--reference")
    a.add_argument("--reference-column", default="Close")
    a.add_argument("--reference-agg", choices=["mean", "last", "first", "max"], default="mean")
    a.add_argument("--indicator", choices=["auto", "n_e", "e2"], default="auto",
                   help="series compared with the reference (auto: e2 for log prices, else n_e)")
    a.add_argument("--extremal", action="store_true",
                   help="report majorization-extremal windows in the metadata")
    a.add_argument("--head", type=int, default=15, help="leading eigenvalues kept per record")
    a.add_argument("--regime-tol", type=float, default=ToleranceConfig.regime)
    a.add_argument("--format", choices=["csv", "json"], default="csv")
    a.add_argument("--output", default="-")
    a.add_argument("--workers", type=int, default=1)

    sub.add_parser("selfcheck", help="run embedded numerical fixtures")
    return parser


def _metadata(args, config, window, stride, qs) -> dict:
    return {
        "version": __version__,
        "backend": BACKEND,
        "input": str(args.input),
        "date_column": args.date_column,
        "value_column": args.value_column,
        "head": args.head,
        "sigma_r": config.sigma,
        "sigma_unit": "log-price" if config.log_prices else "price",
        "log_prices": config.log_prices,
        "log_price_reference": "first price of each history" if config.log_prices else None,
        "entropy_base": config.base.value,
        "qs": list(qs),
        "window": "full" if window is None else str(window),
        "window_convention": "cumulative-prefix" if window is None else window.convention,
        "stride": stride if window is None else None,
        "regime_adjacent_steps": window is None and stride == 1,
        "tolerances": {
            "majorization": config.tolerances.majorization,
            "regime": config.tolerances.regime,
            "clamp_factor": config.tolerances.clamp_factor,
            "saturation": config.tolerances.saturation,
        },
        "start": args.start.isoformat() if args.start else None,
        "end": args.end.isoformat() if args.end else None,
    }


def run_analyze(args) -> int:
    qs = tuple(sorted(set(args.qs or (1.0, 2.0))))
    window = args.window
    if args.reference and window is None:
        raise UsageError("--reference requires --window month, week or fixed:K")
    if args.extremal and window is None:
        raise UsageError("--extremal requires a window mode")
    if args.head < 0:
        raise UsageError("--head must be >= 0")
    q2_only = qs == (2.0,)
    stride = args.stride if args.stride is not None else (1 if q2_only else 10)
    if stride < 1:
        raise UsageError("--stride must be >= 1")

    config = EmbeddingConfig(
        sigma=args.sigma_r,
        log_prices=args.log_prices,
        tolerances=ToleranceConfig(regime=args.regime_tol),
    )
    schema = ColumnSchema(args.date_column, args.value_column)
    series = read_price_csv(resolve_path(args.input), schema)
    if args.start or args.end:
        series = series.between(args.start, args.end)

    meta = _metadata(args, config, window, stride, qs)
    if window is None:
        records = cumulative_analysis(series, config, stride, qs, spectra=not q2_only,
                                      head=args.head, workers=args.workers)
    else:
        records = window_analysis(series, window, config, qs, head=args.head,
                                  keep_spectra=args.extremal, workers=args.workers)
    if args.extremal:
        hi, lo = find_extremal_windows(records)
        meta["extremal"] = {
            "max_entropy": {"index": hi.index + 1, "label": hi.label, "universal": hi.universal, "tied": hi.tied},
            "min_entropy": {"index": lo.index + 1, "label": lo.label, "universal": lo.universal, "tied": lo.tied},
        }
    if args.reference:
        ref = read_price_csv(resolve_path(args.reference), ColumnSchema(args.date_column, args.reference_column))
        windows = partition(series, window)
        ref_values = aggregate(ref, windows, window, args.reference_agg)
        indicator = args.indicator
        if indicator == "auto":
            indicator = "e2" if args.log_prices else "n_e"
        if indicator == "e2" and 2.0 not in qs:
            raise UsageError("--indicator e2 needs --q 2")
        if indicator == "e2":
            ind = [(r.label, r.entropy(2.0)) for r in records]
        else:
            ind = [(r.label, r.n_effective) for r in records]
        report = compare_to_reference(ind, ref_values)
        meta["reference"] = {
            "input": str(args.reference),
            "column": args.reference_column,
            "aggregation": args.reference_agg,
            "indicator": indicator,
            **report.to_dict(),
        }
        if args.format == "csv":
            sys.stderr.write(
                f"reference: scale={report.scale:.6g} pearson={report.pearson:.4f} "
                f"spearman={report.spearman:.4f} n={report.paired_count}\n"
            )

    # render fully before touching the sink so failures leave no partial output
    buf = io.BytesIO()
    emit(records, args.format, buf, meta)
    data = buf.getvalue()
    try:
        if args.output == "-":
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        else:
            Path(args.output).write_bytes(data)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="histent: %(levelname)s: %(message)s")
    if args.command == "selfcheck":
        return selfcheck.run()
    try:
        return run_analyze(args)
    except NumericalError as exc:
        sys.stderr.write(f"histent: numerical error: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC
    except (DataError, IoFailure, FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        sys.stderr.write(f"histent: error: {type(exc).__name__}: {exc}\n")
        return EXIT_DATA
    except HistentError as exc:
        sys.stderr.write(f"histent: error: {type(exc).__name__}: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
