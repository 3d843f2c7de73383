"""Fractional and multi-fractional Brownian motion generators.

Ground truth for estimator validation.  Paths are exact in law: pairwise
covariances on the sampled grid match the closed form

    E[B(t) B(u)] = (s^2 / 2) (|t|^2h + |u|^2h - |t-u|^2h)

either through a Cholesky factorization of the covariance matrix (small
n) or through circulant embedding of the stationary increment process
followed by a cumulative sum (large n).  Multi-fractional paths use a
locally-stationary approximation: coherent constant-H fields driven by
one shared Gaussian driver, blended by interpolation in H; exact when
the Hurst function is constant, tangent to fBm on short windows
otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .errors import InvalidPathSpec, PathTooLong
from .ingest import LogPriceSeries

CHOLESKY_CAP = 4096
EPOCH = date(1970, 1, 1)


@dataclass(frozen=True)
class FbmSpec:
    """Constant-parameter fractional Brownian motion on a uniform grid."""

    hurst: float
    vol: float = 1.0
    n: int = 2
    dt: float = 1.0
    seed: int | tuple[int, ...] = 0

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise InvalidPathSpec(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.vol <= 0:
            raise InvalidPathSpec(f"vol must be positive, got {self.vol}")
        if self.n < 2:
            raise InvalidPathSpec(f"need n >= 2 samples, got {self.n}")
        if self.dt <= 0:
            raise InvalidPathSpec(f"dt must be positive, got {self.dt}")


@dataclass(frozen=True)
class MbmSpec:
    """Time-varying (H_t, sigma_t) Brownian motion.

    hurst_fn and vol_fn are evaluated on the sampled grid and must stay
    inside (0, 1) and (0, inf) there.  t0 documents the characteristic
    variation time of the parameter functions; it is bookkeeping only
    and is not enforced.
    """

    hurst_fn: Callable[[np.ndarray], np.ndarray]
    vol_fn: Callable[[np.ndarray], np.ndarray]
    n: int = 2
    dt: float = 1.0
    seed: int | tuple[int, ...] = 0
    t0: float | None = None
    knot_spacing: float = 0.05

    def __post_init__(self):
        if self.n < 2:
            raise InvalidPathSpec(f"need n >= 2 samples, got {self.n}")
        if self.dt <= 0:
            raise InvalidPathSpec(f"dt must be positive, got {self.dt}")
        if self.knot_spacing <= 0:
            raise InvalidPathSpec("knot_spacing must be positive")


@dataclass
class SyntheticPath:
    """Sampled path pinned at the origin, with its generating spec."""

    values: np.ndarray
    truth: Union[FbmSpec, MbmSpec]
    dt: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values[0] != 0.0:
            raise InvalidPathSpec("path must start at 0 (process pinned at origin)")

    @property
    def n(self) -> int:
        return len(self.values)

    def times(self) -> np.ndarray:
        return np.arange(self.n) * self.dt


def fbm_covariance(t, u, spec: FbmSpec):
    """Closed-form covariance of fBm at times t and u."""
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    h2 = 2.0 * spec.hurst
    out = 0.5 * spec.vol**2 * (
        np.abs(t) ** h2 + np.abs(u) ** h2 - np.abs(t - u) ** h2
    )
    return out.item() if out.ndim == 0 else out


# -- exact sampling machinery -------------------------------------------------

@lru_cache(maxsize=3)
def _chol_factor(hurst: float, n: int, dt: float) -> np.ndarray:
    # unit-vol covariance over t_1..t_{n-1}; t_0 = 0 is pinned and excluded
    t = np.arange(1, n) * dt
    h2 = 2.0 * hurst
    tt = t[:, None]
    cov = 0.5 * (tt**h2 + t[None, :] ** h2 - np.abs(tt - t[None, :]) ** h2)
    return np.linalg.cholesky(cov)


def _fgn_autocov(hurst: float, lags: np.ndarray) -> np.ndarray:
    k = lags.astype(float)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2.0 * np.abs(k) ** h2 + np.abs(k - 1) ** h2)


@lru_cache(maxsize=16)
def _embedding_sqrt_eigs(hurst: float, n_inc: int) -> np.ndarray:
    # circulant first row: autocovariance out to lag n_inc, then mirrored
    gamma = _fgn_autocov(hurst, np.arange(n_inc + 1))
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eigs = np.fft.fft(row).real
    if eigs.min() < -1e-9:
        raise InvalidPathSpec(
            f"circulant embedding not nonnegative definite (h={hurst}, n={n_inc})"
        )
    return np.sqrt(np.clip(eigs, 0.0, None))


def _make_driver(rng: np.random.Generator, n: int, method: str):
    if method == "cholesky":
        return rng.standard_normal(n - 1)
    # hermitian complex driver shared by every Hurst value
    n_inc = n - 1
    m = 2 * n_inc
    g = rng.standard_normal(m)
    z = np.empty(m, dtype=complex)
    z[0] = g[0]
    z[n_inc] = g[1]
    if n_inc > 1:
        u = g[2 : 1 + n_inc]
        v = g[1 + n_inc :]
        z[1:n_inc] = (u + 1j * v) / np.sqrt(2.0)
        z[n_inc + 1 :] = np.conj(z[1:n_inc][::-1])
    return z


def _unit_fbm(driver, hurst: float, n: int, dt: float, method: str) -> np.ndarray:
    if method == "cholesky":
        inner = _chol_factor(hurst, n, dt) @ driver
        return np.concatenate([[0.0], inner])
    n_inc = n - 1
    m = 2 * n_inc
    spectral = _embedding_sqrt_eigs(hurst, n_inc) * driver
    fgn = np.fft.ifft(spectral).real[:n_inc] * np.sqrt(m)
    path = np.empty(n)
    path[0] = 0.0
    np.cumsum(fgn * dt**hurst, out=path[1:])
    return path


def _pick_method(method: str, n: int, cap: int) -> str:
    if method == "auto":
        return "cholesky" if n <= cap else "davies-harte"
    if method not in ("cholesky", "davies-harte"):
        raise InvalidPathSpec(f"unknown sampling method {method!r}")
    if method == "cholesky" and n > cap:
        raise PathTooLong(f"n={n} exceeds the cholesky cap {cap}")
    return method


def sample_fbm(spec: FbmSpec, method: str = "auto", cholesky_cap: int = CHOLESKY_CAP) -> SyntheticPath:
    """Exact fBm path on the grid k*dt, k=0..n-1; deterministic per seed."""
    method = _pick_method(method, spec.n, cholesky_cap)
    rng = np.random.default_rng(spec.seed)
    driver = _make_driver(rng, spec.n, method)
    values = spec.vol * _unit_fbm(driver, spec.hurst, spec.n, spec.dt, method)
    return SyntheticPath(values, spec, spec.dt)


def _hurst_knots(hmin: float, hmax: float, spacing: float) -> np.ndarray:
    if hmax - hmin < 1e-12:
        return np.array([hmin])
    count = int(np.ceil((hmax - hmin) / spacing)) + 1
    return np.linspace(hmin, hmax, count)


def sample_mbm(spec: MbmSpec, method: str = "auto", cholesky_cap: int = CHOLESKY_CAP) -> SyntheticPath:
    """Locally-stationary mBm path.

    On windows short against the variation time of (H_t, sigma_t) the
    path is statistically indistinguishable from fBm with the parameters
    frozen at the window center.  With constant parameter functions the
    construction reduces, sample for sample, to sample_fbm with the same
    seed.
    """
    t = np.arange(spec.n) * spec.dt
    hs = np.asarray(spec.hurst_fn(t), dtype=float)
    sigmas = np.asarray(spec.vol_fn(t), dtype=float)
    if hs.shape != t.shape or sigmas.shape != t.shape:
        raise InvalidPathSpec("hurst_fn/vol_fn must map the time grid elementwise")
    if np.any(hs <= 0.0) or np.any(hs >= 1.0):
        raise InvalidPathSpec("hurst_fn leaves (0, 1) on the sampled grid")
    if np.any(sigmas <= 0.0):
        raise InvalidPathSpec("vol_fn must stay positive on the sampled grid")

    method = _pick_method(method, spec.n, cholesky_cap)
    rng = np.random.default_rng(spec.seed)
    driver = _make_driver(rng, spec.n, method)

    knots = _hurst_knots(float(hs.min()), float(hs.max()), spec.knot_spacing)
    if len(knots) == 1:
        blended = _unit_fbm(driver, float(knots[0]), spec.n, spec.dt, method)
    else:
        fields = np.stack(
            [_unit_fbm(driver, float(h), spec.n, spec.dt, method) for h in knots]
        )
        idx = np.clip(np.searchsorted(knots, hs, side="right") - 1, 0, len(knots) - 2)
        span = knots[idx + 1] - knots[idx]
        w_hi = (hs - knots[idx]) / span
        cols = np.arange(spec.n)
        blended = (1.0 - w_hi) * fields[idx, cols] + w_hi * fields[idx + 1, cols]
    return SyntheticPath(sigmas * blended, spec, spec.dt)


def integrated_observations(
    path: SyntheticPath,
    refine: int = 8,
    start: date = EPOCH,
    label: str = "synthetic",
) -> LogPriceSeries:
    """Local averages of the path over blocks of `refine` samples.

    Midpoint-rule rendering of observations that are averages of the
    continuous process over intervals of length refine*dt: each sample
    stands for the midpoint of its own dt-cell, so block means are exact
    for linear paths.  The resulting series is dated daily from `start`
    and its sampling step (refine*dt in path time) is the unit step of
    every downstream estimator.
    """
    if refine < 1:
        raise InvalidPathSpec(f"refine must be >= 1, got {refine}")
    n_obs = path.n // refine
    if n_obs < 1:
        raise InvalidPathSpec(f"path of {path.n} samples too short for refine={refine}")
    obs = path.values[: n_obs * refine].reshape(n_obs, refine).mean(axis=1)
    dates = np.datetime64(start, "D") + np.arange(n_obs)
    return LogPriceSeries(dates, obs, label)


def fbm_log_prices(
    hurst: float,
    vol: float,
    n_obs: int,
    seed: int,
    refine: int = 8,
    method: str = "auto",
    label: str = "synthetic",
) -> LogPriceSeries:
    """fBm sampled at refine-fold resolution, averaged to n_obs daily values."""
    spec = FbmSpec(hurst=hurst, vol=vol, n=n_obs * refine, dt=1.0 / refine, seed=seed)
    return integrated_observations(sample_fbm(spec, method=method), refine, label=label)
