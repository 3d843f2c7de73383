"""fracspec command line: one pipeline per invocation.

Subcommands: synth, spectrum, estimate, segment, xcorr, regularize,
validate.  Delimited output (CSV or JSON with a meta block) goes to
stdout or ``-o``; ``--figures DIR`` additionally renders PNG figures
into DIR.  Errors print a single ``ErrorClass: message`` line on stderr
and exit 2; identical config and seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import date

import numpy as np

from . import __version__
from .errors import FracspecError, InvalidConfig, WindowExceedsSeries
from .estimator import (
    fit_power_law,
    generalized_hurst_track,
    rescale_volatility,
    rolling_estimate,
)
from .ingest import PriceSeries, load_csv, to_log, write_csv
from .regularize import gaussianize_diffs
from .segment import Partition, SearchConfig, SpectrumBank, search_partition
from .spectrum import InertialRange, q_spectrum, scale_spectrum
from .synth import fbm_log_prices
from .validation import run_validation
from .xcorr import DIFF_SPANS, DIFF_SPANS_DYADIC, align, scale_correlations

SCHEMA_VERSION = 1
ANNUAL = 365


@dataclass
class RunConfig:
    """Echo of one invocation, embedded in JSON output for reproducibility."""

    subcommand: str
    inputs: list[str] = field(default_factory=list)
    options: dict = field(default_factory=dict)

    def meta(self) -> dict:
        return {
            "tool": "fracspec",
            "version": __version__,
            "schema_version": SCHEMA_VERSION,
            "command": self.subcommand,
            "inputs": self.inputs,
            "config": self.options,
        }


def _default_threads() -> int:
    env = os.environ.get("FRACSPEC_THREADS")
    if env and env.isdigit():
        return max(1, int(env))
    return os.cpu_count() or 1


def _emit(text: str, output: str | None) -> None:
    if output and output != "-":
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path: str, args) -> PriceSeries:
    src = io.StringIO(sys.stdin.read()) if path == "-" else path
    return load_csv(
        src,
        date_col=getattr(args, "date_col", None),
        price_col=getattr(args, "price_col", None),
        fill_gaps=getattr(args, "fill_gaps", False),
        label="stdin" if path == "-" else None,
    )


def _parse_q_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise InvalidConfig(f"cannot parse moment orders {text!r}") from None


def _figdir(args) -> str | None:
    d = getattr(args, "figures", None)
    if d:
        os.makedirs(d, exist_ok=True)
    return d


def _inertial(args, window: int) -> InertialRange | None:
    ji, je = getattr(args, "ji", None), getattr(args, "je", None)
    if ji is None and je is None:
        return None
    rng = InertialRange(ji if ji is not None else 2, je if je is not None else window // 2)
    return rng.validate_for(window)


def _ffmt(x) -> str:
    return repr(float(x))


def _json_dump(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# -- subcommand handlers -------------------------------------------------------

def _cmd_synth(args) -> int:
    series = fbm_log_prices(
        args.hurst, args.vol, args.n, seed=args.seed,
        refine=args.refine, method=args.method, label=args.label,
    )
    prices = PriceSeries(series.dates, np.exp(series.values), args.label)
    buf = io.StringIO()
    write_csv(prices, buf)
    _emit(buf.getvalue(), args.output)
    figdir = _figdir(args)
    if figdir:
        from . import figures

        figures.save_price(prices, os.path.join(figdir, "synth_price.png"))
    return 0


def _cmd_spectrum(args) -> int:
    qs = _parse_q_list(args.q) if args.q else []
    series = _load(args.input, args)
    logp = to_log(series)
    window = args.window or logp.n
    if window > logp.n:
        raise WindowExceedsSeries(f"window {window} exceeds series length {logp.n}")
    values = logp.values[: window]
    rng = _inertial(args, window) or InertialRange.default_for(window)
    spec = scale_spectrum(values, rng)
    q_cols = {q: q_spectrum(values, q, rng).values for q in qs}
    header = ["j", "two_j", "S_j", "N_j"] + [f"S_q{q:g}" for q in qs]
    lines = [",".join(header)]
    for i, j in enumerate(spec.scales):
        row = [str(int(j)), str(int(2 * j)), _ffmt(spec.values[i]), str(int(spec.counts[i]))]
        row += [_ffmt(q_cols[q][i]) for q in qs]
        lines.append(",".join(row))
    _emit("\n".join(lines) + "\n", args.output)
    figdir = _figdir(args)
    if figdir:
        from . import figures

        figures.save_spectrum(spec, fit_power_law(spec), os.path.join(figdir, "spectrum.png"))
    return 0


def _track_rows(track, qtrack):
    rows = []
    dates = track.center_dates()
    for i, fit in enumerate(track.fits):
        row = {
            "center_date": dates[i].isoformat(),
            "hurst": fit.hurst,
            "sigma_daily": fit.volatility,
            "sigma_annual": rescale_volatility(fit, ANNUAL),
            "scheme": fit.scheme,
        }
        if qtrack is not None:
            for q in qtrack.qs:
                row[f"H_q{q:g}"] = float(qtrack.centered(q)[i])
        rows.append(row)
    return rows


def _cmd_estimate(args) -> int:
    qs = _parse_q_list(args.q) if args.q else None
    rng = _inertial(args, args.window)
    series = _load(args.input, args)
    logp = to_log(series)
    track = rolling_estimate(logp, window=args.window, step=args.step, inertial=rng)
    qtrack = None
    if qs:
        qtrack = generalized_hurst_track(
            logp, window=args.window, qs=qs, step=args.step, inertial=rng
        )
    rows = _track_rows(track, qtrack)
    cfg = RunConfig("estimate", [args.input], {
        "window": args.window, "step": args.step, "q": qs,
        "ji": args.ji, "je": args.je,
    })
    if args.format == "json":
        payload = {"meta": cfg.meta(), "track": rows}
        if qtrack is not None:
            payload["q_offsets"] = {f"{q:g}": qtrack.offsets[q] for q in qtrack.qs}
        _emit(_json_dump(payload), args.output)
    else:
        header = list(rows[0].keys())
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(
                v if isinstance(v, str) else _ffmt(v) for v in row.values()
            ))
        _emit("\n".join(lines) + "\n", args.output)
    figdir = _figdir(args)
    if figdir:
        from . import figures

        figures.save_track(track, os.path.join(figdir, "estimate_track.png"))
        if qtrack is not None:
            figures.save_qtrack(qtrack, os.path.join(figdir, "estimate_qtrack.png"))
    return 0


def _partition_payload(series, part: Partition, cfg: RunConfig) -> dict:
    bounds = (0, *part.change_points, part.n)
    segments = []
    for fit, s, e in zip(part.fits, bounds, bounds[1:]):
        segments.append({
            "start_date": str(series.dates[s]),
            "end_date": str(series.dates[e - 1]),
            "length": e - s,
            "hurst": fit.hurst,
            "sigma_daily": fit.volatility,
            "sigma_annual": rescale_volatility(fit, ANNUAL),
            "scheme": fit.scheme,
        })
    return {
        "meta": cfg.meta(),
        "boundaries": [b.isoformat() for b in part.boundaries],
        "change_points": list(part.change_points),
        "segments": segments,
        "residual": part.residual,
    }


def _cmd_segment(args) -> int:
    series = _load(args.input, args)
    logp = to_log(series)
    cfg = SearchConfig(args.q, coarse=args.coarse, fine=args.fine, min_length=args.min_length)
    part = search_partition(logp, cfg)
    run = RunConfig("segment", [args.input], {
        "segments": args.q, "coarse": args.coarse,
        "fine": args.fine, "min_length": args.min_length,
    })
    _emit(_json_dump(_partition_payload(logp, part, run)), args.output)

    spectra = None
    if args.emit_spectra or args.figures:
        from .spectrum import model_spectrum

        bank = SpectrumBank(logp.values)
        bounds = (0, *part.change_points, part.n)
        spectra = [bank.spectrum(s, e) for s, e in zip(bounds, bounds[1:])]
    if args.emit_spectra:
        for i, (spec, fit) in enumerate(zip(spectra, part.fits)):
            model = model_spectrum(fit.hurst, fit.volatility, spec.scales)
            lines = ["j,S_j,model_S_j"]
            for k, j in enumerate(spec.scales):
                lines.append(f"{int(j)},{_ffmt(spec.values[k])},{_ffmt(model[k])}")
            with open(f"{args.emit_spectra}_segment{i + 1}.csv", "w", encoding="utf-8") as fh:
                fh.write("\n".join(lines) + "\n")
    figdir = _figdir(args)
    if figdir:
        from . import figures

        figures.save_segmentation(logp, part, os.path.join(figdir, "segmentation.png"))
        figures.save_segment_spectra(
            spectra, part.fits, os.path.join(figdir, "segment_spectra.png")
        )
    return 0


def _cmd_xcorr(args) -> int:
    series = [_load(p, args) for p in args.inputs]
    panel = align(series)
    periods = None
    if args.periods:
        periods = []
        for tok in args.periods.split(","):
            if not tok.strip().isdigit():
                raise InvalidConfig(f"cannot parse year {tok!r} in --periods")
            year = int(tok)
            periods.append((tok.strip(), date(year, 1, 1), date(year, 12, 31)))
    spans = DIFF_SPANS_DYADIC if args.dyadic_diff else DIFF_SPANS
    table = scale_correlations(panel, periods, diff_spans=spans)
    lines = ["period,pair,kind,scale,rho"]
    for r in table.rows:
        lines.append(f"{r.period},{r.pair},{r.kind},{r.scale},{_ffmt(r.rho)}")
    _emit("\n".join(lines) + "\n", args.output)
    figdir = _figdir(args)
    if figdir:
        from . import figures

        figures.save_xcorr(table, os.path.join(figdir, "xcorr.png"))
    return 0


def _cmd_regularize(args) -> int:
    series = _load(args.input, args)
    logp = to_log(series)
    reg = gaussianize_diffs(logp)
    prices = PriceSeries(reg.series.dates, np.exp(reg.series.values), series.label)
    buf = io.StringIO()
    write_csv(prices, buf)
    _emit(buf.getvalue(), args.output)
    figdir = _figdir(args)
    if figdir:
        from . import figures

        figures.save_regularization(logp, reg.series, os.path.join(figdir, "regularize.png"))
    return 0


def _cmd_validate(args) -> int:
    counts = (args.trials, args.seg_trials, args.flat_trials, args.reg_trials)
    if min(counts) < 1:
        raise InvalidConfig("every trial count must be >= 1")
    report = run_validation(
        seed=args.seed,
        trials=args.trials,
        seg_trials=args.seg_trials,
        flat_trials=args.flat_trials,
        reg_trials=args.reg_trials,
        threads=args.threads,
    )
    if args.format == "json":
        cfg = RunConfig("validate", [], {
            "seed": args.seed, "trials": args.trials,
            "seg_trials": args.seg_trials, "flat_trials": args.flat_trials,
            "reg_trials": args.reg_trials,
        })
        payload = {
            "meta": cfg.meta(),
            "passed": report.passed,
            "checks": [asdict(r) for r in report.results],
        }
        _emit(_json_dump(payload), args.output)
    else:
        lines = report.lines()
        lines.append(f"overall: {'PASS' if report.passed else 'FAIL'}")
        _emit("\n".join(lines) + "\n", args.output)
    figdir = _figdir(args)
    if figdir:
        from . import figures

        figures.save_validation(report, os.path.join(figdir, "validate_hist.png"))
    return 0


# -- parser --------------------------------------------------------------------

def _add_io_options(p, with_input=True):
    if with_input:
        p.add_argument("input", help="price CSV path, or - for stdin")
        p.add_argument("--date-col", help="date column name or index")
        p.add_argument("--price-col", help="price column name or index")
        p.add_argument("--fill-gaps", action="store_true",
                       help="forward-fill up to 3 consecutive missing days")
    p.add_argument("-o", "--output", help="write output to this file instead of stdout")
    p.add_argument("--figures", metavar="DIR", help="render PNG figures into DIR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracspec",
        description="Scale-spectrum analytics for daily price series",
    )
    parser.add_argument("--version", action="version", version=f"fracspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic fractional price data")
    p.add_argument("--hurst", type=float, required=True)
    p.add_argument("--vol", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True, help="number of daily observations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--refine", type=int, default=8)
    p.add_argument("--method", choices=["auto", "cholesky", "davies-harte"], default="auto")
    p.add_argument("--label", default="synthetic")
    _add_io_options(p, with_input=False)
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser("spectrum", help="scale spectrum of one window")
    p.add_argument("--window", type=int, help="window length (default: full series)")
    p.add_argument("--ji", type=int, help="first scale (default 2)")
    p.add_argument("--je", type=int, help="last scale (default floor(M/2))")
    p.add_argument("--q", help="comma list of extra moment orders")
    _add_io_options(p)
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("estimate", help="rolling Hurst/volatility track")
    p.add_argument("--window", type=int, default=365)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--ji", type=int)
    p.add_argument("--je", type=int)
    p.add_argument("--q", help="comma list of generalized Hurst orders")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_io_options(p)
    p.set_defaults(handler=_cmd_estimate)

    p = sub.add_parser("segment", help="regime segmentation")
    p.add_argument("--q", type=int, default=4, help="number of segments")
    p.add_argument("--coarse", type=int, default=183)
    p.add_argument("--fine", type=int, default=5)
    p.add_argument("--min-length", type=int, default=30)
    p.add_argument("--emit-spectra", metavar="PREFIX",
                   help="write per-segment spectrum CSVs to PREFIX_segmentK.csv")
    _add_io_options(p)
    p.set_defaults(handler=_cmd_segment)

    p = sub.add_parser("xcorr", help="multiscale cross-correlations")
    p.add_argument("inputs", nargs="+", help="two or more price CSVs")
    p.add_argument("--periods", help="comma list of calendar years")
    p.add_argument("--dyadic-diff", action="store_true",
                   help="difference levels 1,2,4,8 instead of 1,2,3,4")
    p.add_argument("--date-col")
    p.add_argument("--price-col")
    p.add_argument("--fill-gaps", action="store_true")
    p.add_argument("-o", "--output")
    p.add_argument("--figures", metavar="DIR")
    p.set_defaults(handler=_cmd_xcorr)

    p = sub.add_parser("regularize", help="Gaussianize log-price differences")
    _add_io_options(p)
    p.set_defaults(handler=_cmd_regularize)

    p = sub.add_parser("validate", help="synthetic Monte Carlo validation suite")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seg-trials", type=int, default=100)
    p.add_argument("--flat-trials", type=int, default=200)
    p.add_argument("--reg-trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--format", choices=["text", "json"], default="text")
    _add_io_options(p, with_input=False)
    p.set_defaults(handler=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except FracspecError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
