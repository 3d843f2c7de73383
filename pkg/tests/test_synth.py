import numpy as np
import pytest

from fracspec.errors import InvalidPathSpec, PathTooLong
from fracspec.estimator import rolling_estimate
from fracspec.ingest import LogPriceSeries
from fracspec.spectrum import scale_spectrum
from fracspec.synth import (
    FbmSpec,
    MbmSpec,
    SyntheticPath,
    fbm_covariance,
    fbm_log_prices,
    integrated_observations,
    sample_fbm,
    sample_mbm,
)


def test_covariance_examples():
    for h in (0.2, 0.5, 0.8):
        assert fbm_covariance(1, 1, FbmSpec(h, 1.0, 4)) == pytest.approx(1.0)
    assert fbm_covariance(1, 2, FbmSpec(0.5, 1.0, 4)) == pytest.approx(1.0)
    expected = 2 * (1 + 3**1.5 - 2**1.5)
    assert fbm_covariance(1, 3, FbmSpec(0.75, 2.0, 4)) == pytest.approx(expected, rel=1e-14)


def test_spec_validation():
    with pytest.raises(InvalidPathSpec):
        FbmSpec(hurst=0.0, n=10)
    with pytest.raises(InvalidPathSpec):
        FbmSpec(hurst=1.0, n=10)
    with pytest.raises(InvalidPathSpec):
        FbmSpec(hurst=0.5, vol=0.0, n=10)
    with pytest.raises(InvalidPathSpec):
        FbmSpec(hurst=0.5, n=1)


def test_path_pinned_and_deterministic():
    spec = FbmSpec(0.7, 2.0, 300, 1.0, 42)
    a = sample_fbm(spec)
    b = sample_fbm(spec)
    assert a.values[0] == 0.0
    assert np.array_equal(a.values, b.values)
    c = sample_fbm(FbmSpec(0.7, 2.0, 300, 1.0, 43))
    assert not np.array_equal(a.values, c.values)


def test_cholesky_cap():
    with pytest.raises(PathTooLong):
        sample_fbm(FbmSpec(0.5, 1.0, 300), method="cholesky", cholesky_cap=200)
    p = sample_fbm(FbmSpec(0.5, 1.0, 300), method="auto", cholesky_cap=200)
    assert p.values[0] == 0.0 and len(p.values) == 300


def test_brownian_increments_iid():
    p = sample_fbm(FbmSpec(0.5, 1.0, 20_000, 0.25, 7))
    inc = np.diff(p.values)
    assert np.var(inc) == pytest.approx(0.25, rel=0.05)
    lag1 = np.corrcoef(inc[:-1], inc[1:])[0, 1]
    assert abs(lag1) < 0.03


@pytest.mark.parametrize("method", ["cholesky", "davies-harte"])
def test_empirical_covariance_matches_closed_form(method):
    # entrywise agreement within 4 standard errors over 10^4 paths
    n, paths, h = 6, 10_000, 0.7
    spec = FbmSpec(h, 1.0, n, 1.0, 0)
    acc = np.zeros((n, n))
    for t in range(paths):
        v = sample_fbm(FbmSpec(h, 1.0, n, 1.0, (601, t)), method=method).values
        acc += np.outer(v, v)
    emp = acc / paths
    t_grid = np.arange(n, dtype=float)
    theo = fbm_covariance(t_grid[:, None], t_grid[None, :], spec)
    se = np.sqrt((np.outer(np.diag(theo), np.diag(theo)) + theo**2) / paths)
    se[se == 0] = np.inf  # pinned row/column is exactly zero
    assert np.all(np.abs(emp - theo) <= 4 * se)
    assert np.all(np.abs(emp[0]) == 0)


def test_point_covariance_example():
    # sample covariance at (t=1, u=2), h=0.7 within 3 SE of the closed form
    paths = 10_000
    vals = np.array(
        [sample_fbm(FbmSpec(0.7, 1.0, 3, 1.0, (603, t))).values[1:] for t in range(paths)]
    )
    emp = np.mean(vals[:, 0] * vals[:, 1])
    spec = FbmSpec(0.7, 1.0, 3)
    theo = fbm_covariance(1, 2, spec)
    se = np.sqrt((fbm_covariance(1, 1, spec) * fbm_covariance(2, 2, spec) + theo**2) / paths)
    assert abs(emp - theo) <= 3 * se


def test_self_similarity_of_covariance():
    # rescaling time by c and values by c^-h preserves the covariance
    spec = FbmSpec(0.65, 1.3, 4)
    t = np.linspace(0.5, 9, 12)
    u = np.linspace(0.1, 7, 12)
    for c in (2.0, 5.5):
        lhs = fbm_covariance(c * t[:, None], c * u[None, :], spec) * c ** (-2 * 0.65)
        rhs = fbm_covariance(t[:, None], u[None, :], spec)
        assert np.allclose(lhs, rhs, rtol=1e-12)


def test_sampled_self_similarity():
    # halving dt scales the sampled path law by 2^-h: check via variances
    h = 0.75
    a = sample_fbm(FbmSpec(h, 1.0, 200, 1.0, 11)).values
    b = sample_fbm(FbmSpec(h, 1.0, 200, 2.0, 11)).values
    assert np.allclose(b, 2.0**h * a, rtol=1e-10)


def test_mbm_constant_equals_fbm_exactly():
    for n, method in ((400, "cholesky"), (400, "davies-harte")):
        f = sample_fbm(FbmSpec(0.62, 1.7, n, 1.0, 77), method=method)
        m = sample_mbm(
            MbmSpec(
                hurst_fn=lambda t: np.full_like(t, 0.62),
                vol_fn=lambda t: np.full_like(t, 1.7),
                n=n, dt=1.0, seed=77,
            ),
            method=method,
        )
        assert np.array_equal(f.values, m.values)


def test_mbm_grid_validation():
    bad = MbmSpec(
        hurst_fn=lambda t: 0.5 + 0.6 * t / t.max(),
        vol_fn=lambda t: np.ones_like(t),
        n=50, dt=1.0, seed=1,
    )
    with pytest.raises(InvalidPathSpec):
        sample_mbm(bad)


def test_mbm_vol_scaling_is_exact():
    base = MbmSpec(lambda t: np.full_like(t, 0.6), lambda t: np.ones_like(t), 300, 1.0, 5)
    doubled = MbmSpec(lambda t: np.full_like(t, 0.6), lambda t: np.full_like(t, 2.0), 300, 1.0, 5)
    a = sample_mbm(base).values
    b = sample_mbm(doubled).values
    assert np.allclose(b, 2 * a, rtol=1e-14)


def test_mbm_step_recovered_by_rolling_estimator():
    # H: 0.6 then 0.4; windows clear of the step see their own plateau
    n_obs, refine = 1200, 4
    n, dt = n_obs * refine, 1.0 / refine
    early, late = [], []
    for t in range(12):
        spec = MbmSpec(
            hurst_fn=lambda tt: np.where(tt < n * dt / 2, 0.6, 0.4),
            vol_fn=lambda tt: np.ones_like(tt),
            n=n, dt=dt, seed=(43, t),
        )
        lp = integrated_observations(sample_mbm(spec), refine)
        track = rolling_estimate(lp, window=365, step=60)
        centers = track.centers
        early.append(track.hurst[centers + 182.5 < n_obs / 2 - 40].mean())
        late.append(track.hurst[centers - 182.5 > n_obs / 2 + 40].mean())
    assert abs(np.mean(early) - 0.6) < 0.06
    assert abs(np.mean(late) - 0.4) < 0.06


def test_integrated_observations_constant_and_linear():
    obs = integrated_observations(SyntheticPath(np.zeros(64), FbmSpec(0.5, 1, 64), 1.0), 8)
    assert np.all(obs.values == 0)

    lin = np.arange(64, dtype=float) * 0.125  # path value = time on a dt=0.125 grid
    path = SyntheticPath(lin, FbmSpec(0.5, 1.0, 64, 0.125), 0.125)
    obs = integrated_observations(path, 8)
    # mean of 8 midpoint samples of a linear function = value at block center
    expected = (np.arange(8) * 8 + 3.5) * 0.125
    assert np.allclose(obs.values, expected, rtol=1e-14)


def test_integrated_observations_validation():
    path = sample_fbm(FbmSpec(0.5, 1.0, 16, 1.0, 0))
    with pytest.raises(InvalidPathSpec):
        integrated_observations(path, 0)
    with pytest.raises(InvalidPathSpec):
        integrated_observations(path, 32)
    obs = integrated_observations(path, 5)  # trailing remainder dropped
    assert obs.n == 3


def test_fbm_log_prices_shape():
    lp = fbm_log_prices(0.6, 1.0, 100, seed=3)
    assert isinstance(lp, LogPriceSeries)
    assert lp.n == 100
    assert str(lp.dates[0]) == "1970-01-01"


def test_brownian_observation_spectrum_mean():
    # mean S_1 over 10^4 integrated Brownian paths: 1/3 plus the known
    # midpoint-refinement excess 1/(6 r^2) at r=8
    paths, trials = 0, 10_000
    total = 0.0
    from fracspec.spectrum import InertialRange

    rng_j1 = InertialRange(1, 2)
    for t in range(trials):
        vals = fbm_log_prices(0.5, 1.0, 64, seed=(2, t)).values
        total += scale_spectrum(vals, rng_j1).values[0]
        paths += 1
    mean = total / paths
    expected = 1 / 3 + 1 / (6 * 64)
    assert mean == pytest.approx(expected, rel=0.01)
    assert mean == pytest.approx(1 / 3, rel=0.015)
