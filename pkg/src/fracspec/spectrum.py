"""Haar scale spectra of log-price windows.

A window a(0..M-1) is analyzed through continuous-transform Haar detail
coefficients at integer spans j,

    d_j(i) = (1/sqrt(2j)) * sum_{l=0}^{j-1} [a(l+i) - a(l+i+j)],
    i = 0..N_j-1,  N_j = M - 2j + 1,

whose mean square over i is the scale spectrum S_j.  For observations
that are local averages of a fractional Brownian motion with Hurst
exponent H and volatility sigma (unit sampling step), the spectrum
follows the exact power law

    E[S_j] = sigma^2 * spectral_scaling(H) * (2j)^(2H+1),

which is what the estimators in this package invert.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInertialRange, InvalidMomentOrder, SeriesTooShort


@dataclass(frozen=True)
class InertialRange:
    """Scale range [j_i, j_e] over which power laws are fitted."""

    j_i: int
    j_e: int

    def __post_init__(self):
        if not (1 <= self.j_i < self.j_e):
            raise InvalidInertialRange(f"need 1 <= j_i < j_e, got [{self.j_i}, {self.j_e}]")

    def validate_for(self, window: int) -> "InertialRange":
        if self.j_e > window // 2:
            raise InvalidInertialRange(
                f"j_e={self.j_e} exceeds floor(M/2)={window // 2} for window {window}"
            )
        return self

    def scales(self) -> np.ndarray:
        return np.arange(self.j_i, self.j_e + 1)

    @staticmethod
    def default_for(window: int) -> "InertialRange":
        """All scales except the first: j_i=2, j_e=floor(M/2).

        Span 1 reacts strongest to per-observation noise, so default
        fits leave it out; pass an explicit range to include it.
        """
        if window < 6:
            raise SeriesTooShort(f"window {window} < 6 cannot hold scales 2..{window // 2}")
        return InertialRange(2, window // 2)


@dataclass
class ScaleSpectrum:
    """Mean-square detail energies S_j over an inertial range."""

    scales: np.ndarray        # scale indices j
    values: np.ndarray        # S_j, squared log-price units
    counts: np.ndarray        # N_j = M - 2j + 1
    window_size: int
    window_center: float = 0.0  # sample offset of the window midpoint


@dataclass
class QSpectrum:
    """Generalized q-moment spectrum S_j(q) = [mean |d_j|^q]^(2/q)."""

    q: float
    scales: np.ndarray
    values: np.ndarray
    counts: np.ndarray
    window_size: int
    window_center: float = 0.0


def prefix_sums(values) -> np.ndarray:
    """Zero-padded cumulative sums; block sums become two lookups."""
    a = np.asarray(values, dtype=float)
    out = np.empty(len(a) + 1)
    out[0] = 0.0
    np.cumsum(a, out=out[1:])
    return out


def details_from_prefix(prefix: np.ndarray, start: int, window: int, j: int) -> np.ndarray:
    """Detail coefficients of values[start:start+window] at span j."""
    nj = window - 2 * j + 1
    base = prefix[start : start + nj]
    mid = prefix[start + j : start + j + nj]
    far = prefix[start + 2 * j : start + 2 * j + nj]
    return (2.0 * mid - base - far) / np.sqrt(2.0 * j)


def detail_coeffs(values, j: int) -> np.ndarray:
    """Haar detail coefficients d_j(i) for i = 0..M-2j.

    O(1) per coefficient after an O(M) prefix-sum setup.
    """
    a = np.asarray(values, dtype=float)
    m = len(a)
    if not 1 <= j <= m // 2:
        raise InvalidInertialRange(f"scale j={j} outside 1..floor(M/2)={m // 2}")
    return details_from_prefix(prefix_sums(a), 0, m, j)


def approx_coeffs(values, block: int) -> np.ndarray:
    """Non-overlapping block means over blocks of the given length.

    block=1 returns the series itself; floor(N/block) values otherwise.
    """
    a = np.asarray(values, dtype=float)
    if block < 1:
        raise InvalidInertialRange(f"block length must be >= 1, got {block}")
    if block > len(a):
        raise SeriesTooShort(f"block {block} exceeds series length {len(a)}")
    nb = len(a) // block
    return a[: nb * block].reshape(nb, block).mean(axis=1)


def _mean_abs_power(d: np.ndarray, q: float) -> float:
    # q == 2 avoids libm pow so the q-spectrum reduction is bit-identical
    if q == 2:
        return float(np.mean(d * d))
    return float(np.mean(np.abs(d) ** q))


def spectrum_values(prefix: np.ndarray, start: int, window: int, rng: InertialRange):
    """(scales, S_j, N_j) for a window addressed inside a prefix-sum array."""
    rng.validate_for(window)
    scales = rng.scales()
    values = np.empty(len(scales))
    counts = np.empty(len(scales), dtype=int)
    for k, j in enumerate(scales):
        d = details_from_prefix(prefix, start, window, int(j))
        values[k] = _mean_abs_power(d, 2)
        counts[k] = len(d)
    return scales, values, counts


def scale_spectrum(values, rng: InertialRange | None = None, window_center: float | None = None) -> ScaleSpectrum:
    """Second-moment scale spectrum S_j = (1/N_j) sum_i d_j(i)^2."""
    a = np.asarray(values, dtype=float)
    m = len(a)
    if rng is None:
        rng = InertialRange.default_for(m)
    scales, vals, counts = spectrum_values(prefix_sums(a), 0, m, rng)
    center = (m - 1) / 2.0 if window_center is None else window_center
    return ScaleSpectrum(scales, vals, counts, m, center)


def q_spectrum(values, q: float, rng: InertialRange | None = None, window_center: float | None = None) -> QSpectrum:
    """Generalized spectrum S_j(q); q=2 coincides with scale_spectrum."""
    if q <= 0:
        raise InvalidMomentOrder(f"moment order must be > 0, got {q}")
    a = np.asarray(values, dtype=float)
    m = len(a)
    if rng is None:
        rng = InertialRange.default_for(m)
    rng.validate_for(m)
    prefix = prefix_sums(a)
    scales = rng.scales()
    vals = np.empty(len(scales))
    counts = np.empty(len(scales), dtype=int)
    for k, j in enumerate(scales):
        d = details_from_prefix(prefix, 0, m, int(j))
        mean_q = _mean_abs_power(d, q)
        vals[k] = mean_q if q == 2 else mean_q ** (2.0 / q)
        counts[k] = len(d)
    center = (m - 1) / 2.0 if window_center is None else window_center
    return QSpectrum(q, scales, vals, counts, m, center)


def spectral_scaling(h):
    """Scaling prefactor (1 - 2^(-2H)) / ((2H+2)(2H+1)) of the model spectrum."""
    h = np.asarray(h, dtype=float)
    out = (1.0 - 2.0 ** (-2.0 * h)) / ((2.0 * h + 2.0) * (2.0 * h + 1.0))
    return out.item() if out.ndim == 0 else out


def model_spectrum(h, s, j):
    """Expected S_j for averaged fractional Brownian observations.

    sigma^2 * spectral_scaling(H) * (2j)^(2H+1); exact at every span j,
    so log2 E[S_j] is affine in log2(2j) with slope 2H+1.
    """
    j = np.asarray(j, dtype=float)
    out = s * s * spectral_scaling(h) * (2.0 * j) ** (2.0 * h + 1.0)
    return out.item() if out.ndim == 0 else out


def consecutive_return_corr(h: float) -> float:
    """Correlation of consecutive returns, 2^(2H-1) - 1; zero at H=1/2."""
    return 2.0 ** (2.0 * h - 1.0) - 1.0
