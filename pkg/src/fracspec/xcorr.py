"""Multiscale correlations across aligned asset panels.

Per period and per pair, Pearson correlations of two families of
sequences: block means of the log-prices over lengths 2^j (price-level
coherence at dyadic scales) and Haar detail coefficients at short spans
(return coherence at daily to multi-day scales).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from itertools import combinations

import numpy as np

from .errors import EmptyIntersection, InsufficientData, ZeroVariance
from .ingest import LogPriceSeries, PriceSeries, to_log

APPROX_LEVELS = (0, 1, 2, 3, 4)
DIFF_SPANS = (1, 2, 3, 4)
DIFF_SPANS_DYADIC = (1, 2, 4, 8)


@dataclass
class AlignedPanel:
    """Two or more log-price series cut to their common date range."""

    series: list[LogPriceSeries]

    def __post_init__(self):
        if len(self.series) < 2:
            raise EmptyIntersection("a panel needs at least two series")
        first = self.series[0].dates
        for s in self.series[1:]:
            if len(s.dates) != len(first) or np.any(s.dates != first):
                raise EmptyIntersection("panel members must share their date grid")

    @property
    def n(self) -> int:
        return self.series[0].n

    @property
    def dates(self) -> np.ndarray:
        return self.series[0].dates

    def labels(self) -> list[str]:
        return [s.label for s in self.series]


def align(series: list) -> AlignedPanel:
    """Cut the series to their common contiguous date range."""
    logs = [to_log(s) if isinstance(s, PriceSeries) else s for s in series]
    if len(logs) < 2:
        raise EmptyIntersection("need at least two series to align")
    start = max(s.dates[0] for s in logs)
    end = min(s.dates[-1] for s in logs)
    if end < start:
        raise EmptyIntersection(f"no common dates (latest start {start}, earliest end {end})")
    cut = []
    for s in logs:
        i0 = int((start - s.dates[0]).astype(int))
        i1 = int((end - s.dates[0]).astype(int)) + 1
        cut.append(LogPriceSeries(s.dates[i0:i1], s.values[i0:i1], s.label))
    return AlignedPanel(cut)


def pearson(x, y) -> float:
    """Sample Pearson correlation of two equal-length sequences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ZeroVariance("pearson needs two equal-length sequences of >= 2 values")
    xc = x - x.mean()
    yc = y - y.mean()
    vx = float(xc @ xc)
    vy = float(yc @ yc)
    if vx == 0.0 or vy == 0.0:
        raise ZeroVariance("correlation undefined for a constant sequence")
    return float((xc @ yc) / np.sqrt(vx * vy))


@dataclass(frozen=True)
class CorrRow:
    period: str
    pair: str
    kind: str      # "approx" | "diff"
    scale: int     # block length 2^j for approx, span j for diff
    rho: float


@dataclass
class ScaleCorrelations:
    """Long-format correlation table; one row per (period, pair, kind, scale)."""

    rows: list[CorrRow]

    def get(self, period: str, pair: str, kind: str) -> dict[int, float]:
        return {
            r.scale: r.rho
            for r in self.rows
            if r.period == period and r.pair == pair and r.kind == kind
        }

    def periods(self) -> list[str]:
        seen = dict.fromkeys(r.period for r in self.rows)
        return list(seen)

    def pairs(self) -> list[str]:
        seen = dict.fromkeys(r.pair for r in self.rows)
        return list(seen)


def calendar_year_periods(panel: AlignedPanel) -> list[tuple[str, date, date]]:
    """Calendar years overlapping the panel, cropped to the common range."""
    start = panel.dates[0].astype(date)
    end = panel.dates[-1].astype(date)
    periods = []
    for year in range(start.year, end.year + 1):
        lo = max(start, date(year, 1, 1))
        hi = min(end, date(year, 12, 31))
        periods.append((str(year), lo, hi))
    return periods


def _slice_period(s: LogPriceSeries, lo: date, hi: date) -> np.ndarray:
    i0 = int((np.datetime64(lo, "D") - s.dates[0]).astype(int))
    i1 = int((np.datetime64(hi, "D") - s.dates[0]).astype(int)) + 1
    return s.values[max(i0, 0) : max(i1, 0)]


def scale_correlations(
    panel: AlignedPanel,
    periods: list[tuple[str, date, date]] | None = None,
    approx_levels=APPROX_LEVELS,
    diff_spans=DIFF_SPANS,
) -> ScaleCorrelations:
    """Per-period, per-pair correlations of block means and detail coefficients.

    Block means use non-overlapping blocks of length 2^j (level 0 is the
    plain series correlation); detail coefficients use the full
    overlapping set at each configured span.  Periods default to calendar
    years; auto-split periods too short for the largest scale are dropped,
    explicitly requested ones raise InsufficientData.
    """
    from .spectrum import approx_coeffs, detail_coeffs

    auto = periods is None
    if auto:
        periods = calendar_year_periods(panel)
    max_need = max(
        2 * 2 ** max(approx_levels),
        2 * max(diff_spans) + 1,
    )
    rows: list[CorrRow] = []
    for label, lo, hi in periods:
        chunks = [_slice_period(s, lo, hi) for s in panel.series]
        if any(len(c) < max_need for c in chunks):
            if auto:
                continue
            raise InsufficientData(
                f"period {label} has fewer than {max_need} samples at the largest scale"
            )
        for (ia, a), (ib, b) in combinations(enumerate(chunks), 2):
            pair = f"{panel.series[ia].label}:{panel.series[ib].label}"
            for level in approx_levels:
                block = 2**level
                rho = pearson(approx_coeffs(a, block), approx_coeffs(b, block))
                rows.append(CorrRow(label, pair, "approx", block, rho))
            for span in diff_spans:
                rho = pearson(detail_coeffs(a, span), detail_coeffs(b, span))
                rows.append(CorrRow(label, pair, "diff", span, rho))
    if not rows:
        raise InsufficientData("no period long enough for the requested scales")
    return ScaleCorrelations(rows)
