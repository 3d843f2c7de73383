"""Power-law parameter estimation from scale spectra.

The log2 spectrum is regressed on (1, log2(2j)) by generalized least
squares under two diagonal weightings, R^1 and R^3 (entries j^1 and
j^3); the scheme giving the larger Hurst estimate wins, which guards the
fit against heavy large-scale spectral noise.  Slope p maps to the Hurst
exponent H = (p - 1) / 2 and the intercept c to the volatility
sigma = 2^(c/2) / sqrt(spectral_scaling(H)).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, time, timedelta

import numpy as np

from .errors import (
    DegenerateSpectrum,
    InvalidConfig,
    InvalidInertialRange,
    InvalidMomentOrder,
    WindowExceedsSeries,
)
from .ingest import LogPriceSeries
from .spectrum import (
    InertialRange,
    QSpectrum,
    ScaleSpectrum,
    _mean_abs_power,
    details_from_prefix,
    prefix_sums,
    spectral_scaling,
    spectrum_values,
)

HURST_FLOOR = 0.05
HURST_CEIL = 0.95


@dataclass(frozen=True)
class WeightScheme:
    """Diagonal GLS weighting; entries j^exponent or an explicit diagonal."""

    name: str
    exponent: float | None = None
    diag: tuple[float, ...] | None = None

    def weights(self, scales: np.ndarray) -> np.ndarray:
        if self.exponent is not None:
            w = scales.astype(float) ** self.exponent
        else:
            w = np.asarray(self.diag, dtype=float)
            if len(w) != len(scales):
                raise InvalidInertialRange("explicit diagonal length mismatch")
        if np.any(w <= 0):
            raise InvalidInertialRange("weighting diagonal must be strictly positive")
        return w


R1 = WeightScheme("R1", exponent=1.0)
R3 = WeightScheme("R3", exponent=3.0)
ROBUST_SCHEMES = (R1, R3)


@dataclass
class PowerLawFit:
    """Fitted (H, sigma) with the regression internals that produced them."""

    hurst: float              # clamped to [0.05, 0.95]
    volatility: float         # per sampling-step scale
    intercept: float
    slope: float
    scheme: str
    window_size: int
    window_center: float = 0.0  # sample offset of the window midpoint

    @property
    def hurst_raw(self) -> float:
        """Slope-implied Hurst exponent before clamping."""
        return (self.slope - 1.0) / 2.0


def gls_fit(spec: ScaleSpectrum | QSpectrum, scheme: WeightScheme) -> tuple[float, float]:
    """Weighted regression of log2 S_j on (1, log2(2j)); (intercept, slope)."""
    scales = np.asarray(spec.scales)
    values = np.asarray(spec.values, dtype=float)
    if len(scales) < 2:
        raise InvalidInertialRange("need at least 2 scales to fit")
    if np.any(values <= 0.0):
        j = int(scales[np.argmax(values <= 0.0)])
        raise DegenerateSpectrum(f"S_{j} <= 0; log-log fit undefined")
    y = np.log2(values)
    x = np.log2(2.0 * scales)
    sqrt_w = scheme.weights(scales) ** -0.5
    design = np.column_stack([sqrt_w, sqrt_w * x])
    coef, *_ = np.linalg.lstsq(design, sqrt_w * y, rcond=None)
    return float(coef[0]), float(coef[1])


def _robust_fit(spec) -> tuple[float, float, WeightScheme]:
    """(intercept, slope, scheme) maximizing the implied Hurst exponent."""
    best = None
    for scheme in ROBUST_SCHEMES:
        c, p = gls_fit(spec, scheme)
        if best is None or p > best[1]:  # strict: ties keep the earlier scheme
            best = (c, p, scheme)
    return best


def fit_power_law(spec: ScaleSpectrum) -> PowerLawFit:
    """Robust (H, sigma) estimate from a second-moment spectrum."""
    c, p, scheme = _robust_fit(spec)
    hurst = float(np.clip((p - 1.0) / 2.0, HURST_FLOOR, HURST_CEIL))
    sigma = 2.0 ** (c / 2.0) / np.sqrt(spectral_scaling(hurst))
    return PowerLawFit(
        hurst=hurst,
        volatility=float(sigma),
        intercept=c,
        slope=p,
        scheme=scheme.name,
        window_size=spec.window_size,
        window_center=spec.window_center,
    )


def rescale_volatility(fit: PowerLawFit, m: float) -> float:
    """Volatility on the horizon of m sampling steps: sigma * m^H."""
    return fit.volatility * m**fit.hurst


@dataclass
class RollingTrack:
    """Per-window fits over a sliding window of fixed size."""

    fits: list[PowerLawFit]
    window: int
    step: int
    start_date: date
    label: str = ""

    def __len__(self) -> int:
        return len(self.fits)

    @property
    def centers(self) -> np.ndarray:
        return np.array([f.window_center for f in self.fits])

    @property
    def hurst(self) -> np.ndarray:
        return np.array([f.hurst for f in self.fits])

    @property
    def volatility(self) -> np.ndarray:
        return np.array([f.volatility for f in self.fits])

    def center_dates(self) -> list:
        return offsets_to_dates(self.start_date, self.centers)


def offsets_to_dates(start: date, offsets) -> list:
    """Sample offsets as dates; fractional offsets become datetimes."""
    out = []
    for c in offsets:
        c = float(c)
        if c.is_integer():
            out.append(start + timedelta(days=int(c)))
        else:
            out.append(datetime.combine(start, time()) + timedelta(days=c))
    return out


def rolling_estimate(
    series: LogPriceSeries,
    window: int = 365,
    step: int = 1,
    inertial: InertialRange | None = None,
) -> RollingTrack:
    """One robust fit per window position; centers at t_k + (M-1)/2."""
    n = series.n
    if step < 1:
        raise InvalidConfig(f"step must be >= 1, got {step}")
    if window > n:
        raise WindowExceedsSeries(f"window {window} exceeds series length {n}")
    rng = inertial if inertial is not None else InertialRange.default_for(window)
    rng.validate_for(window)
    prefix = prefix_sums(series.values)
    fits = []
    for k in range(0, n - window + 1, step):
        scales, vals, counts = spectrum_values(prefix, k, window, rng)
        spec = ScaleSpectrum(scales, vals, counts, window, k + (window - 1) / 2.0)
        fits.append(fit_power_law(spec))
    return RollingTrack(fits, window, step, series.start_date(), series.label)


def generalized_hurst(values, q: float, rng: InertialRange | None = None) -> float:
    """H(q) from the q-moment spectrum; reduces to the raw Hurst fit at q=2."""
    from .spectrum import q_spectrum

    spec = q_spectrum(values, q, rng)
    _, p, _ = _robust_fit(spec)
    return (p - 1.0) / 2.0


@dataclass
class GeneralizedHurstTrack:
    """Rolling H(q) curves with finite-window bias removed.

    Each curve is shifted so its mean matches the mean of the q=2 curve;
    the q=2 curve itself is untouched.
    """

    qs: tuple[float, ...]
    centers: np.ndarray
    raw: dict[float, np.ndarray]
    offsets: dict[float, float]
    window: int
    step: int
    start_date: date
    label: str = ""

    def centered(self, q: float) -> np.ndarray:
        return self.raw[q] + self.offsets[q]

    def spread(self) -> np.ndarray:
        """Per-window max-min dispersion of the centered curves."""
        stacked = np.stack([self.centered(q) for q in self.qs])
        return stacked.max(axis=0) - stacked.min(axis=0)

    def center_dates(self) -> list:
        return offsets_to_dates(self.start_date, self.centers)


def _window_q_values(prefix, start, window, rng, qs):
    rng.validate_for(window)
    scales = rng.scales()
    out = {q: np.empty(len(scales)) for q in qs}
    for k, j in enumerate(scales):
        d = details_from_prefix(prefix, start, window, int(j))
        for q in qs:
            mean_q = _mean_abs_power(d, q)
            out[q][k] = mean_q if q == 2 else mean_q ** (2.0 / q)
    return scales, out


def generalized_hurst_track(
    series: LogPriceSeries,
    window: int = 365,
    qs=(0.25, 0.5, 0.75, 1.0, 2.0, 3.0, 4.0),
    step: int = 1,
    inertial: InertialRange | None = None,
) -> GeneralizedHurstTrack:
    """Rolling generalized Hurst exponents for each q (q=2 always included)."""
    n = series.n
    if step < 1:
        raise InvalidConfig(f"step must be >= 1, got {step}")
    if window > n:
        raise WindowExceedsSeries(f"window {window} exceeds series length {n}")
    rng = inertial if inertial is not None else InertialRange.default_for(window)
    q_list = tuple(sorted(set(float(q) for q in qs) | {2.0}))
    if q_list[0] <= 0:
        raise InvalidMomentOrder(f"moment orders must be > 0, got {q_list[0]}")
    prefix = prefix_sums(series.values)
    centers = []
    raw = {q: [] for q in q_list}
    counts = window - 2 * rng.scales() + 1
    for k in range(0, n - window + 1, step):
        scales, per_q = _window_q_values(prefix, k, window, rng, q_list)
        centers.append(k + (window - 1) / 2.0)
        for q in q_list:
            spec = QSpectrum(q, scales, per_q[q], counts, window)
            _, p, _ = _robust_fit(spec)
            raw[q].append((p - 1.0) / 2.0)
    raw = {q: np.array(v) for q, v in raw.items()}
    ref = float(np.mean(raw[2.0]))
    offsets = {q: ref - float(np.mean(raw[q])) for q in q_list}
    return GeneralizedHurstTrack(
        q_list, np.array(centers), raw, offsets, window, step,
        series.start_date(), series.label,
    )
