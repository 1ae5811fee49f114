import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from g2haar.algebra import build_backend, project
from g2haar.parametrization import (
    EulerCoordinatesG2,
    exp_generator,
    g2_element,
    group_element_residuals,
    in_range,
    parameter_ranges,
    range_arrays,
    sigma,
    su3_element,
)

BACKENDS = ("adjoint", "octonion7")


def random_coords(rng, n):
    lo, hi = range_arrays()
    return lo + (hi - lo) * rng.uniform(size=(n, 14))


@pytest.mark.parametrize("kind", BACKENDS)
def test_exp_matches_scipy_expm(kind):
    b = build_backend(kind)
    rng = np.random.default_rng(0)
    bound = 4 * math.pi * max(np.abs(b.generators).max(axis=(1, 2)))
    for i in range(1, 15):
        for t in rng.uniform(-bound, bound, 5):
            np.testing.assert_allclose(exp_generator(i, t, b), expm(t * b.generators[i - 1]), atol=1e-12)


@pytest.mark.parametrize("kind", BACKENDS)
def test_exp_one_parameter_subgroup(kind):
    b = build_backend(kind)
    eye = np.eye(b.dim)
    np.testing.assert_allclose(exp_generator(3, 0.0, b), eye, atol=1e-14)
    for i in range(1, 15):
        np.testing.assert_allclose(exp_generator(i, 1.7, b) @ exp_generator(i, -1.7, b), eye, atol=1e-12)


def test_exp_batched_shape():
    t = np.linspace(0, 1, 6).reshape(2, 3)
    assert exp_generator(5, t).shape == (2, 3, 14, 14)


@pytest.mark.parametrize("kind", BACKENDS)
def test_conjugation_by_c3_maps_c2_to_c1(kind):
    b = build_backend(kind)
    g = exp_generator(3, math.pi / 4, b)
    coords, res = project(g.T @ b.generators[1] @ g, b)
    e1 = np.zeros(14)
    e1[0] = 1.0
    np.testing.assert_allclose(coords, e1, atol=1e-12)


@pytest.mark.parametrize("kind", BACKENDS)
def test_identity_at_origin(kind):
    b = build_backend(kind)
    eye = np.eye(b.dim)
    np.testing.assert_allclose(g2_element(EulerCoordinatesG2.zeros(), b), eye, atol=1e-13)
    np.testing.assert_allclose(su3_element(np.zeros(8), b), eye, atol=1e-13)
    np.testing.assert_allclose(sigma(np.zeros(6), b), eye, atol=1e-13)


def test_sigma_first_three_factors():
    a = np.array([0.3, 1.1, 2.0, 0, 0, 0])
    expected = exp_generator(3, 0.3) @ exp_generator(2, 1.1) @ exp_generator(3, 2.0)
    np.testing.assert_allclose(sigma(a), expected, atol=1e-13)


def test_sigma_last_factor_is_c9():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a = rng.uniform(0, 3, 6)
        a2 = a.copy()
        a2[5] = rng.uniform(0, 3)
        lhs = np.linalg.inv(sigma(a2)) @ sigma(a)
        np.testing.assert_allclose(lhs, exp_generator(9, math.sqrt(3) / 2 * (a[5] - a2[5])), atol=1e-12)


def test_sigma_coefficients_against_expm():
    b = build_backend("adjoint")
    C = b.generators
    a = np.array([0.4, 0.9, 1.3, 2.2, 0.6, 1.9])
    r3 = math.sqrt(3)
    expected = (expm(a[0] * C[2]) @ expm(a[1] * C[1]) @ expm(a[2] * C[2])
                @ expm(r3 / 2 * a[3] * C[7]) @ expm(a[4] * C[4]) @ expm(r3 / 2 * a[5] * C[8]))
    np.testing.assert_allclose(sigma(a), expected, atol=1e-12)
    g = np.array([0.1, 0.5, 1.2, 0.7, 3.0, 2.5, 0.3, 2.9])
    expected = (expm(g[0] * C[2]) @ expm(g[1] * C[1]) @ expm(g[2] * C[2]) @ expm(g[3] * C[4])
                @ expm(r3 * g[4] * C[7]) @ expm(g[5] * C[2]) @ expm(g[6] * C[1]) @ expm(g[7] * C[2]))
    np.testing.assert_allclose(su3_element(g), expected, atol=1e-12)


def _su3_block_residual(m):
    # adjoint action must keep span(e1..e8) invariant
    return float(np.abs(m[..., 8:, :8]).max())


def test_su3_keeps_its_subalgebra():
    rng = np.random.default_rng(2)
    lo, hi = range_arrays()
    gam = lo[6:] + (hi[6:] - lo[6:]) * rng.uniform(size=(100, 8))
    m = su3_element(gam)
    assert _su3_block_residual(m) <= 1e-8
    b = build_backend("octonion7")
    g7 = su3_element(gam, b)
    for i in range(8):
        conj = np.einsum("nji,jk,nkl->nil", g7, b.generators[i], g7)
        coords, res = project(conj, b)
        assert res <= 1e-8
        assert np.abs(coords[:, 8:]).max() <= 1e-8
    prod = m[:50] @ m[50:]
    assert _su3_block_residual(prod) <= 1e-8


@pytest.mark.parametrize("kind", BACKENDS)
def test_group_element_invariants_at_random_points(kind):
    rng = np.random.default_rng(3)
    x = random_coords(rng, 1000)
    res = group_element_residuals(g2_element(x, kind), kind)
    assert res["orthogonality"] <= 1e-10
    assert res["determinant"] <= 1e-8
    assert res["algebra"] <= 1e-8


@settings(max_examples=30, deadline=None)
@given(arrays(float, 14, elements=st.floats(-20, 20)))
def test_out_of_range_coordinates_still_give_group_elements(x):
    res = group_element_residuals(g2_element(x))
    assert res["orthogonality"] <= 1e-10 and res["determinant"] <= 1e-8


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 14), st.floats(-10, 10)), min_size=1, max_size=12))
def test_products_of_exponentials_stay_in_group(factors):
    for kind in BACKENDS:
        m = np.eye(build_backend(kind).dim)
        for i, t in factors:
            m = m @ exp_generator(i, t, kind)
        res = group_element_residuals(m, kind)
        assert max(res.values()) <= 1e-8


@pytest.mark.parametrize("j", [1, 2, 3])
def test_c9_commutes_with_c1_c2_c3(j):
    for kind in BACKENDS:
        a = exp_generator(j, 0.83, kind) @ exp_generator(9, 1.9, kind)
        b = exp_generator(9, 1.9, kind) @ exp_generator(j, 0.83, kind)
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_parameter_ranges():
    r = parameter_ranges()
    assert len(r) == 14
    assert r["alpha2"] == (0.0, math.pi / 2)
    assert r["gamma5"] == (0.0, 2 * math.pi)
    assert r["alpha6"] == (0.0, math.pi)
    assert r["gamma1"] == (0.0, 2 * math.pi)


def test_coordinates_type():
    c = EulerCoordinatesG2.from_array(np.arange(14) * 0.1)
    assert c.in_range()
    np.testing.assert_array_equal(c.as_array(), np.arange(14) * 0.1)
    assert not EulerCoordinatesG2(np.full(6, -0.1), np.zeros(8)).in_range()
    assert in_range(np.zeros((3, 14))).all()
    with pytest.raises(ValueError):
        EulerCoordinatesG2(np.zeros(5), np.zeros(8))
