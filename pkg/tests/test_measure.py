import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from g2haar.measure import (
    BLOCK_SIZE,
    CHANNEL_KINDS,
    NonFiniteIntegrandError,
    TEST_FUNCTIONS,
    analytic_volume,
    channel_cdf,
    density_vs_metric,
    g2_density,
    haar_coordinates,
    inverse_channel_cdf,
    inverse_sin5_cdf,
    invariance_suite,
    mc_integrate,
    moments,
    numeric_volume,
    sample_haar,
    sin5_cdf,
    su3_density,
)
from g2haar.parametrization import g2_element, range_arrays

R3 = math.sqrt(3)


def test_density_examples():
    q = math.pi / 4
    assert su3_density([0, q, 0, q, 0, 0, q, 0]) == pytest.approx(R3 / 4, rel=1e-14)
    x = np.array([0, q, 0, 0, q, math.pi / 2, 0, q, 0, q, 0, 0, q, 0])
    assert g2_density(x) == pytest.approx(27 * R3 / 512, rel=1e-14)
    x[5] = 0.0
    assert g2_density(x) == 0.0
    assert su3_density(np.zeros(8)) == 0.0


def test_densities_nonnegative_in_range():
    lo, hi = range_arrays()
    x = lo + (hi - lo) * np.random.default_rng(0).uniform(size=(10000, 14))
    assert (g2_density(x) >= 0).all()


def _sympy_volumes():
    t = sp.symbols("t")
    pi = sp.pi
    s5 = sp.integrate(sp.sin(t) ** 5, (t, 0, pi))
    s3c = sp.integrate(sp.sin(t) ** 3 * sp.cos(t), (t, 0, pi / 2))
    s2 = sp.integrate(sp.sin(2 * t), (t, 0, pi / 2))
    # gamma: 2pi, sin2, pi, sin3cos, 2pi, pi, sin2, pi
    v_su3 = sp.sqrt(3) * (2 * pi) * s2 * pi * s3c * (2 * pi) * pi * s2 * pi
    # alpha: pi, sin2, 2pi, 2pi, sin3cos, sin5
    v_g2 = sp.Rational(27, 32) * pi * s2 * (2 * pi) * (2 * pi) * s3c * s5 * v_su3
    return sp.simplify(v_su3), sp.simplify(v_g2 / v_su3)


def test_volumes_match_exact_integrals():
    v_su3, ratio = _sympy_volumes()
    assert sp.simplify(v_su3 - sp.sqrt(3) * sp.pi**5) == 0
    assert sp.simplify(ratio - sp.Rational(9, 10) * sp.pi**3) == 0
    vol = analytic_volume()
    assert vol["V_SU3"] == pytest.approx(float(v_su3), rel=1e-12)
    assert vol["ratio"] == pytest.approx(float(ratio), rel=1e-12)


def test_tensor_quadrature_matches_product():
    vol = analytic_volume()
    assert numeric_volume() == pytest.approx(vol["V_G2"], rel=1e-10)
    assert numeric_volume(su3_density, coords=slice(6, 14)) == pytest.approx(vol["V_SU3"], rel=1e-10)


def test_inverse_cdf_examples():
    assert inverse_channel_cdf("sin2x", 0.5, 0, math.pi / 2) == pytest.approx(math.pi / 4, abs=1e-15)
    assert inverse_channel_cdf("sin3cos", 0.0625, 0, math.pi / 2) == pytest.approx(math.pi / 6, abs=1e-15)
    assert inverse_sin5_cdf(0.5) == pytest.approx(math.pi / 2, abs=1e-12)
    # F ~ x^6 near the ends, so only the CDF value is pinned down there
    assert sin5_cdf(inverse_sin5_cdf(0.0)) <= 1e-15
    assert 1.0 - sin5_cdf(inverse_sin5_cdf(1.0)) <= 1e-15


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6))
def test_inverse_sin5_roundtrip(u):
    assert sin5_cdf(inverse_sin5_cdf(u)) == pytest.approx(u, abs=1e-12)


def _quadrature_cdf(kind, lo, hi):
    # independent CDF: cumulative trapezoid on a fine grid
    x = np.linspace(lo, hi, 200001)
    y = {"uniform": np.ones_like(x), "sin2x": np.sin(2 * x),
         "sin3cos": np.sin(x) ** 3 * np.cos(x), "sin5": np.sin(x) ** 5}[kind]
    c = integrate.cumulative_trapezoid(y, x, initial=0.0)
    c /= c[-1]
    return lambda v: np.interp(v, x, c)


def test_channel_cdf_matches_quadrature():
    lo, hi = range_arrays()
    for k, kind in enumerate(CHANNEL_KINDS):
        grid = np.linspace(lo[k], hi[k], 101)
        np.testing.assert_allclose(channel_cdf(kind, grid, lo[k], hi[k]),
                                   _quadrature_cdf(kind, lo[k], hi[k])(grid), atol=1e-8)


def test_per_channel_ks():
    lo, hi = range_arrays()
    x = haar_coordinates(100_000, seed=3)
    for k, kind in enumerate(CHANNEL_KINDS):
        res = stats.kstest(x[:, k], _quadrature_cdf(kind, lo[k], hi[k]))
        # 1% family-wise over 14 channels
        assert res.pvalue > 0.01 / len(CHANNEL_KINDS), (k, kind, res)


def test_sampler_is_index_addressable():
    x = haar_coordinates(3 * BLOCK_SIZE, seed=9)
    np.testing.assert_array_equal(haar_coordinates(100, seed=9, start=BLOCK_SIZE - 50),
                                  x[BLOCK_SIZE - 50:BLOCK_SIZE + 50])
    assert not np.array_equal(haar_coordinates(10, seed=10), x[:10])
    s = sample_haar(5, seed=9)
    np.testing.assert_array_equal(s[2].coords.as_array(), x[2])
    assert s[2].density == pytest.approx(float(g2_density(x[2])), rel=1e-14)


def test_mc_constant_function():
    est = mc_integrate(TEST_FUNCTIONS["one"], 1000, seed=1)
    assert est.mean == 1.0 and est.stderr == 0.0 and est.n == 1000
    assert est.z(1.0) == 0.0


def test_mc_bit_identical_across_workers():
    n = 2 * BLOCK_SIZE + 123
    a = mc_integrate(TEST_FUNCTIONS["trace_squared"], n, seed=5, workers=1)
    b = mc_integrate(TEST_FUNCTIONS["trace_squared"], n, seed=5, workers=3)
    assert a == b


def test_mc_nonfinite_raises():
    with pytest.raises(NonFiniteIntegrandError):
        mc_integrate(lambda g: np.full(g.shape[0], np.nan), 10, seed=0)


def test_mc_rejects_single_sample():
    with pytest.raises(ValueError):
        mc_integrate(TEST_FUNCTIONS["trace"], 1, seed=0)


def test_invariance_with_identity_translation_is_exact():
    res = invariance_suite(n=2000, seed=1, translations=[np.eye(14)])
    assert all(r["mean_diff"] == 0.0 and r["z"] == 0.0 for r in res["rows"])
    assert res["pass"]


def test_moments_agree_with_importance_sampling_oracle():
    # independent route: uniform coordinates weighted by the density
    lo, hi = range_arrays()
    rng = np.random.default_rng(12)
    x = lo + (hi - lo) * rng.uniform(size=(40_000, 14))
    w = g2_density(x)
    w = w / w.sum()
    tr = np.trace(g2_element(x), axis1=-2, axis2=-1)
    oracle1, oracle2 = float(w @ tr), float(w @ tr**2)
    res = moments(20_000, seed=2)
    assert abs(res["trace"].mean - oracle1) < 0.1
    assert abs(res["trace_squared"].mean - oracle2) < 0.2
    assert abs(res["z_trace"]) < 4 and abs(res["z_trace_squared"]) < 4


def test_density_vs_metric_constant():
    res = density_vs_metric(points=10, seed=0)
    assert res["ratio_spread"] <= 1e-4
    assert res["ratio_mean"] == pytest.approx(0.5, rel=1e-6)
    assert not res["constant_is_one"]
