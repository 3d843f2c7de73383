"""Figure rendering for the CLI report paths.

Every subcommand accepts ``--figures DIR`` and drops PNG files there
next to its delimited output.  Rendering is headless (Agg) and the
functions take the already-computed artifacts, so figures never change
what the pipelines emit.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .estimator import GeneralizedHurstTrack, RollingTrack, rescale_volatility
from .ingest import LogPriceSeries, PriceSeries
from .segment import Partition
from .spectrum import ScaleSpectrum, model_spectrum
from .xcorr import ScaleCorrelations

DPI = 130


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def save_price(series, path):
    """Price history on a log axis (or log-price when given one)."""
    fig, ax = plt.subplots(figsize=(8, 4))
    if isinstance(series, PriceSeries):
        ax.semilogy(series.dates, series.prices, lw=0.8)
        ax.set_ylabel("price")
    else:
        ax.plot(series.dates, series.values, lw=0.8)
        ax.set_ylabel("log price")
    ax.set_title(series.label or "series")
    return _finish(fig, path)


def save_track(track: RollingTrack, path, annual_horizon: int = 365):
    fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    dates = track.center_dates()
    axes[0].plot(dates, track.hurst, lw=0.9)
    axes[0].axhline(0.5, color="gray", ls=":", lw=0.8)
    axes[0].set_ylabel("Hurst exponent")
    annual = [rescale_volatility(f, annual_horizon) for f in track.fits]
    axes[1].plot(dates, annual, lw=0.9, color="tab:red")
    axes[1].set_ylabel(f"volatility ({annual_horizon}-step scale)")
    axes[0].set_title(f"{track.label or 'series'}: rolling window {track.window}")
    return _finish(fig, path)


def save_spectrum(spec: ScaleSpectrum, fit, path):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    x = np.log2(2.0 * spec.scales)
    ax.plot(x, np.log2(spec.values), lw=0.9, label="scale spectrum")
    if fit is not None:
        model = model_spectrum(fit.hurst, fit.volatility, spec.scales)
        ax.plot(x, np.log2(model), "r--", lw=1.2,
                label=f"fit H={fit.hurst:.2f}, sigma={fit.volatility:.3g}")
        ax.legend()
    ax.set_xlabel("log2(2j)")
    ax.set_ylabel("log2 S_j")
    return _finish(fig, path)


def save_segmentation(series: LogPriceSeries, part: Partition, path):
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(series.dates, series.values, lw=0.8)
    for b in part.boundaries:
        ax.axvline(np.datetime64(b, "D"), color="k", ls="--", lw=1.0)
    bounds = (0, *part.change_points, part.n)
    for fit, s, e in zip(part.fits, bounds, bounds[1:]):
        mid = series.dates[(s + e) // 2]
        ax.annotate(f"H={fit.hurst:.2f}", (mid, series.values.min()), ha="center", fontsize=8)
    ax.set_ylabel("log price")
    ax.set_title(f"{len(part.lengths)} epochs, residual {part.residual:.2f}")
    return _finish(fig, path)


def save_segment_spectra(spectra, fits, path):
    """Grid of per-epoch spectra with their fitted power laws."""
    k = len(spectra)
    cols = 2
    rows = (k + 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(8, 3.2 * rows), squeeze=False)
    for i, (spec, fit) in enumerate(zip(spectra, fits)):
        ax = axes[i // cols][i % cols]
        x = np.log2(2.0 * spec.scales)
        ax.plot(x, np.log2(spec.values), lw=0.8)
        model = model_spectrum(fit.hurst, fit.volatility, spec.scales)
        ax.plot(x, np.log2(model), "r--", lw=1.1)
        ax.set_title(f"epoch {i + 1}: H={fit.hurst:.2f}", fontsize=9)
        ax.set_xlabel("log2(2j)")
        ax.set_ylabel("log2 S_j")
    for i in range(k, rows * cols):
        axes[i // cols][i % cols].axis("off")
    return _finish(fig, path)


def save_qtrack(track: GeneralizedHurstTrack, path):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    dates = track.center_dates()
    for q in track.qs:
        ax.plot(dates, track.centered(q), lw=0.8, label=f"q={q:g}")
    ax.set_ylabel("generalized Hurst exponent (centered)")
    ax.legend(ncol=4, fontsize=8)
    return _finish(fig, path)


def save_xcorr(sc: ScaleCorrelations, path):
    periods = sc.periods()
    pairs = sc.pairs()
    fig, axes = plt.subplots(2, len(periods), figsize=(3.2 * len(periods), 6),
                             squeeze=False, sharey="row")
    markers = ["*", "D", "x", "o", "s"]
    for col, period in enumerate(periods):
        for row, kind in enumerate(("approx", "diff")):
            ax = axes[row][col]
            for mi, pair in enumerate(pairs):
                table = sc.get(period, pair, kind)
                if not table:
                    continue
                scales = sorted(table)
                ax.plot(scales, [table[s] for s in scales], markers[mi % len(markers)],
                        ls="-", lw=0.6, ms=5, label=pair)
            ax.set_ylim(-0.1, 1.05)
            ax.set_xscale("log", base=2)
            if row == 0:
                ax.set_title(period)
            ax.set_xlabel("block length" if kind == "approx" else "span")
            if col == 0:
                ax.set_ylabel(f"{kind} correlation")
    axes[0][0].legend(fontsize=7)
    return _finish(fig, path)


def save_regularization(raw: LogPriceSeries, reg: LogPriceSeries, path):
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(raw.dates, raw.values, lw=0.8, color="tab:red", label="raw")
    ax.plot(reg.dates, reg.values, lw=0.8, color="tab:blue", label="regularized")
    ax.set_ylabel("log price")
    ax.legend()
    return _finish(fig, path)


def save_validation(report, path):
    """Histograms of the Monte Carlo Hurst estimates per window size."""
    keys = [k for k in ("precision_1168", "precision_226") if k in report.summaries]
    fig, axes = plt.subplots(1, max(len(keys), 1), figsize=(4.5 * max(len(keys), 1), 3.6),
                             squeeze=False)
    for i, key in enumerate(keys):
        s = report.summaries[key]
        ax = axes[0][i]
        ax.hist(s.estimates, bins=40, color="tab:blue", alpha=0.8)
        ax.axvline(s.hurst, color="k", ls="--", lw=1.0)
        ax.set_title(f"M={s.window}: mean {s.mean:.3f}, std {s.std:.3f}", fontsize=9)
        ax.set_xlabel("estimated H")
    return _finish(fig, path)
