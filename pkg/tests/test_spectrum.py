import numpy as np
import pytest

from conftest import naive_details
from fracspec.errors import InvalidInertialRange, InvalidMomentOrder, SeriesTooShort
from fracspec.spectrum import (
    InertialRange,
    approx_coeffs,
    consecutive_return_corr,
    detail_coeffs,
    model_spectrum,
    q_spectrum,
    scale_spectrum,
    spectral_scaling,
)
from fracspec.synth import fbm_log_prices


def test_details_match_naive_loop(rng):
    for _ in range(60):
        m = rng.integers(6, 64)
        a = rng.normal(0, 3, m)
        j = int(rng.integers(1, m // 2 + 1))
        assert np.allclose(detail_coeffs(a, j), naive_details(a, j), atol=1e-12)


def test_details_constant_window():
    # prefix-sum cancellation leaves only rounding at the scale of the sums
    assert np.allclose(detail_coeffs(np.full(20, 7.3), 4), 0.0, atol=1e-12)
    assert np.all(detail_coeffs(np.full(20, 2.0), 4) == 0.0)


def test_details_linear_ramp():
    a = np.arange(50, dtype=float)
    for j in (1, 2, 5, 12):
        d = detail_coeffs(a, j)
        assert np.allclose(d, -(j**1.5) / np.sqrt(2), rtol=1e-13)


def test_details_alternating_example():
    d = detail_coeffs([0.0, 1.0, 0.0, 1.0], 1)
    s = 1 / np.sqrt(2)
    assert np.allclose(d, [-s, s, -s])


def test_detail_scale_bounds():
    with pytest.raises(InvalidInertialRange):
        detail_coeffs(np.arange(10), 6)
    with pytest.raises(InvalidInertialRange):
        detail_coeffs(np.arange(10), 0)


def test_approx_coeffs():
    a = np.array([1.0, 2.0, 3.0, 4.0])
    assert approx_coeffs(a, 1).tolist() == a.tolist()
    assert approx_coeffs(a, 2).tolist() == [1.5, 3.5]
    assert np.all(approx_coeffs(np.full(9, 2.5), 4) == 2.5)
    with pytest.raises(SeriesTooShort):
        approx_coeffs(a, 5)


def test_ramp_spectrum_identity():
    a = np.arange(80, dtype=float)
    sp = scale_spectrum(a)
    assert np.array_equal(sp.scales, np.arange(2, 41))
    assert np.allclose(sp.values, sp.scales.astype(float) ** 3 / 2, rtol=1e-12)
    assert np.array_equal(sp.counts, 80 - 2 * sp.scales + 1)


def test_q_spectrum_reduces_to_scale_spectrum(rng):
    a = rng.normal(0, 1, 100)
    s2 = scale_spectrum(a)
    q2 = q_spectrum(a, 2.0)
    assert np.array_equal(s2.values, q2.values)


def test_q_spectrum_ramp_q_independent():
    a = np.arange(60, dtype=float)
    for q in (0.25, 1.0, 3.0):
        sp = q_spectrum(a, q)
        assert np.allclose(sp.values, sp.scales.astype(float) ** 3 / 2, rtol=1e-10)


def test_q_spectrum_rejects_bad_order():
    with pytest.raises(InvalidMomentOrder):
        q_spectrum(np.arange(20), 0.0)
    with pytest.raises(InvalidMomentOrder):
        q_spectrum(np.arange(20), -1.0)


def test_shift_invariance(rng):
    a = rng.normal(0, 1, 64)
    for q in (2.0, 1.0):
        s1 = q_spectrum(a, q).values
        s2 = q_spectrum(a + 117.0, q).values
        assert np.allclose(s1, s2, rtol=1e-9)


def test_scaling_by_lambda(rng):
    a = rng.normal(0, 1, 64)
    lam = 3.7
    assert np.allclose(
        scale_spectrum(lam * a).values, lam**2 * scale_spectrum(a).values, rtol=1e-12
    )
    for q in (0.5, 3.0):
        assert np.allclose(
            q_spectrum(lam * a, q).values, lam**2 * q_spectrum(a, q).values, rtol=1e-12
        )


def test_spectral_scaling_value():
    assert spectral_scaling(0.5) == pytest.approx(1 / 12, abs=1e-15)


def test_model_spectrum_brownian_unit():
    assert model_spectrum(0.5, 1.0, 1) == pytest.approx(1 / 3, abs=1e-15)


def test_model_spectrum_loglinear():
    j = np.arange(1, 200)
    y = np.log2(model_spectrum(0.63, 2.5, j))
    x = np.log2(2.0 * j)
    slope = np.diff(y) / np.diff(x)
    assert np.allclose(slope, 2 * 0.63 + 1, rtol=1e-10)


def test_consecutive_return_corr():
    assert consecutive_return_corr(0.5) == 0
    assert consecutive_return_corr(0.6) == pytest.approx(2**0.2 - 1)
    assert consecutive_return_corr(0.6) == pytest.approx(0.1487, abs=5e-5)
    assert consecutive_return_corr(0.4) == pytest.approx(2**-0.2 - 1)
    assert consecutive_return_corr(0.4) == pytest.approx(-0.1294, abs=5e-5)


def test_inertial_range_validation():
    with pytest.raises(InvalidInertialRange):
        InertialRange(0, 5)
    with pytest.raises(InvalidInertialRange):
        InertialRange(5, 5)
    with pytest.raises(InvalidInertialRange):
        InertialRange(2, 40).validate_for(60)
    assert InertialRange.default_for(365).j_e == 182
    with pytest.raises(SeriesTooShort):
        InertialRange.default_for(5)


def test_fbm_ensemble_matches_model_spectrum():
    # mean S_j over many paths within 5% of the closed form at j in {1,2,4,8,16}
    paths = 10_000
    scales = np.array([1, 2, 4, 8, 16])
    acc = np.zeros(len(scales))
    for t in range(paths):
        vals = fbm_log_prices(0.6, 1.0, 512, seed=(907, t), method="davies-harte").values
        for k, j in enumerate(scales):
            d = detail_coeffs(vals, int(j))
            acc[k] += np.mean(d * d)
    ratio = acc / paths / model_spectrum(0.6, 1.0, scales)
    assert np.all(ratio > 0.95) and np.all(ratio < 1.05), ratio
