"""Regime-switch detection by residual-minimizing segmentation.

A partition of the series into Q contiguous segments is scored by the
total spectral residual

    R = sum_q sum_{j=2}^{floor(M_q/2)} (1/j) * (log2 S_j - log2 Sbar_j)^2,

where Sbar_j is the model spectrum at the segment's own robust fit.
Segments enter with their full weighted sums (no per-segment
normalization) and the 1/j factor downweights the long scales, whose
spectral values average only a handful of coefficients.  The minimizer
is found by exhaustive search on a coarse grid followed by exhaustive
refinement on a fine grid around the coarse optimum; ties break toward
earlier change points.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from itertools import combinations, product

import numpy as np

from .errors import DegenerateSpectrum, InfeasiblePartition, SeriesTooShort
from .estimator import PowerLawFit, fit_power_law
from .ingest import LogPriceSeries
from .spectrum import ScaleSpectrum, model_spectrum, prefix_sums

MIN_FITTABLE = 6  # j_i=2 < j_e=floor(M/2) forces M >= 6


@dataclass(frozen=True)
class SearchConfig:
    """Two-level search layout: grid sizes in samples."""

    n_segments: int
    coarse: int = 183
    fine: int = 5
    min_length: int = 30

    def __post_init__(self):
        if self.n_segments < 1:
            raise InfeasiblePartition("need at least one segment")
        if self.min_length < MIN_FITTABLE:
            raise InfeasiblePartition(f"min_length must be >= {MIN_FITTABLE}")
        if not (0 < self.fine <= self.coarse):
            raise InfeasiblePartition("need 0 < fine <= coarse")


@dataclass
class Partition:
    """Q contiguous segments with their fits and total residual."""

    lengths: tuple[int, ...]
    change_points: tuple[int, ...]   # sample index of each segment start (2nd..Qth)
    boundaries: list[date]           # dates of those samples
    fits: list[PowerLawFit]
    residual: float
    n: int


class SpectrumBank:
    """Cumulative detail energies letting any segment spectrum cost O(scales).

    A detail coefficient whose support [i, i+2j) lies inside a segment
    equals the coefficient computed from the segment alone, so per-scale
    running sums of squared coefficients over the whole series turn every
    segment's S_j into one subtraction.  Memory scales as n^2/4 floats
    (18 MB at n=3000).
    """

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        a = prefix_sums(values)
        self.n = n = len(values)
        jmax = n // 2
        self.scales = np.arange(2, jmax + 1)
        lengths = n - 2 * self.scales + 2  # cumulative arrays incl. leading zero
        self.offsets = np.zeros(len(self.scales), dtype=np.intp)
        np.cumsum(lengths[:-1], out=self.offsets[1:])
        self.flat = np.empty(int(lengths.sum()))
        for k, j in enumerate(self.scales):
            nj = n - 2 * j + 1
            d = (2.0 * a[j : j + nj] - a[:nj] - a[2 * j : 2 * j + nj]) / np.sqrt(2.0 * j)
            block = self.flat[self.offsets[k] : self.offsets[k] + nj + 1]
            block[0] = 0.0
            np.cumsum(d * d, out=block[1:])

    def spectrum(self, start: int, end: int) -> ScaleSpectrum:
        if not 0 <= start < end <= self.n:
            raise InfeasiblePartition(f"segment [{start}, {end}) outside 0..{self.n}")
        window = end - start
        if window < MIN_FITTABLE:
            raise SeriesTooShort(f"segment of {window} samples cannot be fitted")
        je = window // 2
        scales = self.scales[: je - 1]
        base = self.offsets[: je - 1]
        counts = window - 2 * scales + 1
        energy = self.flat[base + (end - 2 * scales + 1)] - self.flat[base + start]
        return ScaleSpectrum(scales, energy / counts, counts, window, start + (window - 1) / 2.0)


def _segment_cost(bank: SpectrumBank, start: int, end: int) -> tuple[float, PowerLawFit]:
    spec = bank.spectrum(start, end)
    fit = fit_power_law(spec)
    model = model_spectrum(fit.hurst, fit.volatility, spec.scales)
    dev = np.log2(spec.values) - np.log2(model)
    return float(np.sum(dev * dev / spec.scales)), fit


def segment_residual(series: LogPriceSeries, lengths) -> float:
    """Total spectral residual of the given contiguous segment lengths."""
    lengths = [int(m) for m in lengths]
    if sum(lengths) != series.n:
        raise InfeasiblePartition(
            f"lengths sum to {sum(lengths)}, series has {series.n} samples"
        )
    if any(m < MIN_FITTABLE for m in lengths):
        raise SeriesTooShort(f"every segment needs >= {MIN_FITTABLE} samples")
    bank = SpectrumBank(series.values)
    total = 0.0
    pos = 0
    for m in lengths:
        cost, _ = _segment_cost(bank, pos, pos + m)
        total += cost
        pos += m
    return total


def _feasible(cps: tuple[int, ...], n: int, min_length: int) -> bool:
    prev = 0
    for c in cps:
        if c - prev < min_length:
            return False
        prev = c
    return n - prev >= min_length


def search_partition(
    series: LogPriceSeries,
    cfg: SearchConfig,
    audit: list | None = None,
) -> Partition:
    """Residual-minimizing partition into cfg.n_segments epochs.

    Exhaustive over coarse-grid change points, then exhaustive over the
    fine grid within one coarse cell of each coarse optimum (the coarse
    optimum itself is a fine candidate, so refinement never worsens).
    Deterministic; ties break toward earlier change points.  The optional
    audit list collects every evaluated (stage, change_points, residual).
    """
    n = series.n
    q = cfg.n_segments
    if q * cfg.min_length > n:
        raise InfeasiblePartition(
            f"{q} segments of >= {cfg.min_length} samples do not fit in {n}"
        )
    bank = SpectrumBank(series.values)
    cache: dict[tuple[int, int], tuple[float, PowerLawFit | None]] = {}

    def seg(s: int, e: int):
        key = (s, e)
        if key not in cache:
            try:
                cache[key] = _segment_cost(bank, s, e)
            except DegenerateSpectrum:
                cache[key] = (np.inf, None)
        return cache[key]

    def scan(stage: str, candidates) -> tuple[float, tuple[int, ...] | None]:
        best_cost, best_cps = np.inf, None
        for cps in candidates:
            if not _feasible(cps, n, cfg.min_length):
                continue
            total = 0.0
            prev = 0
            for c in (*cps, n):
                total += seg(prev, c)[0]
                prev = c
            if audit is not None:
                audit.append((stage, cps, total))
            if total < best_cost:
                best_cost, best_cps = total, cps
        return best_cost, best_cps

    if q == 1:
        best_cost, best_cps = scan("coarse", [()])
    else:
        grid = range(cfg.coarse, n, cfg.coarse)
        best_cost, best_cps = scan("coarse", combinations(grid, q - 1))
        if best_cps is None:
            raise InfeasiblePartition("no feasible coarse partition")
        half = cfg.coarse // cfg.fine
        neighborhoods = []
        for c in best_cps:
            cand = c + cfg.fine * np.arange(-half, half + 1)
            cand = cand[(cand >= 1) & (cand <= n - 1)]
            neighborhoods.append([int(x) for x in cand])
        best_cost, best_cps = scan("fine", product(*neighborhoods))

    if best_cps is None or not np.isfinite(best_cost):
        raise InfeasiblePartition("no feasible partition found")

    bounds = (0, *best_cps, n)
    lengths = tuple(e - s for s, e in zip(bounds, bounds[1:]))
    fits = [seg(s, e)[1] for s, e in zip(bounds, bounds[1:])]
    boundaries = [series.dates[c].astype(date) for c in best_cps]
    return Partition(lengths, tuple(best_cps), boundaries, fits, float(best_cost), n)
