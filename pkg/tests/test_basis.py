"""Basis families: values, derivatives, link matrices, sup factors."""

import math

import numpy as np
import pytest

from derivfit.basis import (BasisSpec, Family, admissible_dims, delta_matrix,
                            eval_basis, eval_basis_derivative, l_factor,
                            l_prime_factor, parse_family)

ALL_FAMILIES = [Family.TRIG_ODD, Family.HALF_TRIG, Family.LAGUERRE,
                Family.HERMITE, Family.LEGENDRE]
ORTHONORMAL = [Family.TRIG_ODD, Family.LAGUERRE, Family.HERMITE, Family.LEGENDRE]


def make_spec(family, m, interval=(0.25, 1.75)):
    if family is Family.HALF_TRIG:
        return BasisSpec(family, m, interval)
    if family is Family.TRIG_ODD and m % 2 == 0:
        m += 1
    return BasisSpec(family, m)


def panel_gauss(lo, hi, panels=64, order=12):
    """Composite Gauss-Legendre rule (independent quadrature oracle)."""
    base_x, base_w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * base_x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * base_w)
    return np.concatenate(nodes), np.concatenate(weights)


def quad_domain(spec):
    if spec.family is Family.HALF_TRIG:
        return spec.interval
    if spec.family is Family.LAGUERRE:
        return 0.0, 2.0 * spec.m + 40.0
    if spec.family is Family.HERMITE:
        cut = math.sqrt(2.0 * spec.m + 3.0) + 10.0
        return -cut, cut
    return spec.support


def interior_points(spec, rng, size):
    lo, hi = quad_domain(spec)
    pts = rng.uniform(lo, hi, size)
    return np.clip(pts, lo + 1e-3, hi - 1e-3)


# ---------------------------------------------------------------------------
# Point values from the defining formulas
# ---------------------------------------------------------------------------

def test_trig_values_at_zero():
    vals = eval_basis(BasisSpec(Family.TRIG_ODD, 3), 0.0)
    np.testing.assert_allclose(vals, [1.0, math.sqrt(2), 0.0], atol=1e-15)


def test_laguerre_values_at_zero():
    vals = eval_basis(BasisSpec(Family.LAGUERRE, 2), 0.0)
    np.testing.assert_allclose(vals, [math.sqrt(2), math.sqrt(2)], rtol=1e-14)


def test_legendre_values_at_zero():
    vals = eval_basis(BasisSpec(Family.LEGENDRE, 2), 0.0)
    np.testing.assert_allclose(vals, [1 / math.sqrt(2), 0.0], atol=1e-15)


def test_hermite_value_at_zero():
    vals = eval_basis(BasisSpec(Family.HERMITE, 1), 0.0)
    np.testing.assert_allclose(vals, [math.pi ** -0.25], rtol=1e-14)


def test_outside_support_is_zero_vector():
    for family in ALL_FAMILIES:
        spec = make_spec(family, 5)
        lo, hi = spec.support
        for x in ([lo - 0.5] if math.isfinite(lo) else []) + \
                 ([hi + 0.5] if math.isfinite(hi) else []):
            assert np.all(eval_basis(spec, x) == 0.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        BasisSpec(Family.HERMITE, 0)
    with pytest.raises(ValueError):
        BasisSpec(Family.TRIG_ODD, 4)
    with pytest.raises(ValueError):
        BasisSpec(Family.HALF_TRIG, 3)           # missing interval
    with pytest.raises(ValueError):
        BasisSpec(Family.HALF_TRIG, 3, (2.0, 1.0))
    with pytest.raises(ValueError):
        BasisSpec(Family.LEGENDRE, 3, (0.0, 1.0))  # fixed support


def test_derivative_overflow_p():
    assert BasisSpec(Family.LAGUERRE, 4).p == 0
    assert BasisSpec(Family.LEGENDRE, 4).p == 0
    assert BasisSpec(Family.TRIG_ODD, 5).p == 0
    assert BasisSpec(Family.HERMITE, 4).p == 1
    assert BasisSpec(Family.HALF_TRIG, 5, (0, 1)).p == 0
    assert BasisSpec(Family.HALF_TRIG, 4, (0, 1)).p == 1


def test_admissible_dims_parity():
    assert admissible_dims(Family.TRIG_ODD, 6) == [1, 3, 5]
    assert admissible_dims(Family.HALF_TRIG, 4) == [1, 2, 3, 4]


def test_parse_family_aliases():
    assert parse_family("Hermite") is Family.HERMITE
    assert parse_family("half-trig") is Family.HALF_TRIG
    with pytest.raises(ValueError):
        parse_family("fourier")


# ---------------------------------------------------------------------------
# Derivatives
# ---------------------------------------------------------------------------

def test_laguerre_derivative_at_zero():
    vals = eval_basis_derivative(BasisSpec(Family.LAGUERRE, 1), 0.0)
    np.testing.assert_allclose(vals, [-math.sqrt(2)], rtol=1e-14)


def test_hermite_derivative_at_zero():
    vals = eval_basis_derivative(BasisSpec(Family.HERMITE, 1), 0.0)
    np.testing.assert_allclose(vals, [0.0], atol=1e-15)


def test_trig_derivative_at_zero():
    vals = eval_basis_derivative(BasisSpec(Family.TRIG_ODD, 3), 0.0)
    np.testing.assert_allclose(vals, [0.0, 0.0, 2 * math.pi * math.sqrt(2)], atol=1e-12)


def test_derivative_outside_support_raises():
    with pytest.raises(ValueError):
        eval_basis_derivative(BasisSpec(Family.LAGUERRE, 3), -0.1)
    with pytest.raises(ValueError):
        eval_basis_derivative(BasisSpec(Family.LEGENDRE, 3), 1.5)


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_derivative_matches_finite_differences(family):
    spec = make_spec(family, 12)
    rng = np.random.default_rng(42)
    pts = interior_points(spec, rng, 200)
    h = 1e-5
    lo, hi = spec.support
    pts = pts[(pts - h > lo) & (pts + h < hi)]
    fd = (eval_basis(spec, pts + h) - eval_basis(spec, pts - h)) / (2 * h)
    exact = eval_basis_derivative(spec, pts)
    scale = np.abs(exact).max() + 1.0
    assert np.abs(fd - exact).max() <= 1e-6 * scale


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_link_matrix_exactness(family):
    for m in (1, 2, 3, 7, 18, 30):
        spec = make_spec(family, m)
        ext = spec.extended()
        delta = delta_matrix(spec).entries
        rng = np.random.default_rng(m)
        pts = interior_points(spec, rng, 1000)
        derivs = eval_basis_derivative(spec, pts)
        linked = eval_basis(ext, pts) @ delta.T
        bound = 1e-9 * (1.0 + np.abs(linked).max())
        assert np.abs(derivs - linked).max() <= bound


def test_delta_laguerre_m2():
    delta = delta_matrix(BasisSpec(Family.LAGUERRE, 2)).entries
    np.testing.assert_allclose(delta, [[-1.0, 0.0], [-2.0, -1.0]], atol=1e-15)


def test_delta_hermite_m2():
    delta = delta_matrix(BasisSpec(Family.HERMITE, 2)).entries
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(delta, [[0.0, -s, 0.0], [s, 0.0, -1.0]], rtol=1e-14)


def test_delta_trig_m3():
    delta = delta_matrix(BasisSpec(Family.TRIG_ODD, 3)).entries
    w = 2 * math.pi
    np.testing.assert_allclose(delta, [[0, 0, 0], [0, 0, -w], [0, w, 0]], atol=1e-14)


def test_delta_legendre_m2():
    delta = delta_matrix(BasisSpec(Family.LEGENDRE, 2)).entries
    np.testing.assert_allclose(delta, [[0.0, 0.0], [math.sqrt(3), 0.0]], rtol=1e-14)


def test_delta_trig_antisymmetric_blocks():
    for m in (3, 5, 9):
        delta = delta_matrix(BasisSpec(Family.TRIG_ODD, m)).entries
        assert np.all(delta[0] == 0.0)
        assert np.all(delta[:, 0] == 0.0)
        np.testing.assert_allclose(delta, -delta.T, atol=1e-14)
        for j in range(1, (m - 1) // 2 + 1):
            block = delta[2 * j - 1:2 * j + 1, 2 * j - 1:2 * j + 1]
            w = 2 * math.pi * j
            np.testing.assert_allclose(block, [[0, -w], [w, 0]], atol=1e-14)


def test_delta_triangular_structure():
    dl = delta_matrix(BasisSpec(Family.LAGUERRE, 6)).entries
    assert np.all(np.triu(dl, k=1) == 0.0)
    dg = delta_matrix(BasisSpec(Family.LEGENDRE, 6)).entries
    assert np.all(np.triu(dg, k=0) == 0.0)  # zero diagonal too


# ---------------------------------------------------------------------------
# Orthonormality and sup bounds
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("family", ORTHONORMAL)
def test_orthonormality(family):
    spec = make_spec(family, 20)
    if family is Family.TRIG_ODD:
        spec = BasisSpec(family, 21)
    lo, hi = quad_domain(spec)
    nodes, weights = panel_gauss(lo, hi, panels=192, order=12)
    vals = eval_basis(spec, nodes)
    gram = vals.T @ (weights[:, None] * vals)
    assert np.abs(gram - np.eye(spec.m)).max() <= 1e-6


def test_half_trig_unit_norms_and_subblocks():
    spec = BasisSpec(Family.HALF_TRIG, 21, (-1.3, 2.2))
    nodes, weights = panel_gauss(*spec.interval, panels=192, order=12)
    vals = eval_basis(spec, nodes)
    gram = vals.T @ (weights[:, None] * vals)
    np.testing.assert_allclose(np.diag(gram), np.ones(21), atol=1e-9)
    sin_idx = list(range(1, 21, 2))
    cos_idx = [0] + list(range(2, 21, 2))  # constant + cosines
    for idx in (sin_idx, cos_idx):
        sub = gram[np.ix_(idx, idx)]
        assert np.abs(sub - np.eye(len(idx))).max() <= 1e-9
    # the full dictionary is not orthogonal: sin(pi u) vs cos(2pi u)
    assert abs(gram[1, 4]) > 0.1


def test_hermite_uniform_bound():
    spec = BasisSpec(Family.HERMITE, 30)
    pts = np.linspace(-12, 12, 20001)
    assert np.abs(eval_basis(spec, pts)).max() <= math.pi ** -0.25 + 1e-12


def test_laguerre_uniform_bound():
    spec = BasisSpec(Family.LAGUERRE, 30)
    pts = np.linspace(0, 120, 40001)
    assert np.abs(eval_basis(spec, pts)).max() <= math.sqrt(2) + 1e-12


def test_l_factor_closed_forms():
    assert l_factor(BasisSpec(Family.TRIG_ODD, 5)) == 5.0
    assert l_factor(BasisSpec(Family.LAGUERRE, 3)) == 6.0
    assert l_factor(BasisSpec(Family.LEGENDRE, 4)) == 8.0
    assert l_factor(BasisSpec(Family.HALF_TRIG, 5, (0.0, 2.0))) == 2.5
    assert l_factor(BasisSpec(Family.HALF_TRIG, 4, (0.0, 1.0))) == 5.0


def test_l_factor_hermite_numeric_below_analytic():
    for m in (1, 4, 9, 25):
        spec = BasisSpec(Family.HERMITE, m)
        numeric = l_factor(spec)
        analytic = l_factor(spec, analytic=True)
        assert 0 < numeric <= analytic + 1e-12
        # grows like sqrt(m): K stays in a narrow band
        assert 0.4 <= numeric / math.sqrt(m) <= 0.6


def test_l_factor_trig_is_exact_sum():
    # complete pairs make the squared sum constant in x
    spec = BasisSpec(Family.TRIG_ODD, 7)
    pts = np.linspace(0, 1, 101)
    sums = (eval_basis(spec, pts) ** 2).sum(axis=1)
    np.testing.assert_allclose(sums, 7.0, rtol=1e-12)


def test_l_prime_factor_trig_m1_zero():
    assert l_prime_factor(BasisSpec(Family.TRIG_ODD, 1), np.linspace(0, 1, 11)) == 0.0


def test_l_prime_factor_trig_m3():
    grid = np.linspace(0, 1, 4001)
    val = l_prime_factor(BasisSpec(Family.TRIG_ODD, 3), grid)
    assert abs(val - 8 * math.pi ** 2) <= 1e-3 * 8 * math.pi ** 2


def test_l_prime_factor_hermite_grid_max_oracle():
    spec = BasisSpec(Family.HERMITE, 2)
    coarse = np.linspace(-6, 6, 2001)
    fine = np.linspace(-6, 6, 4001)
    val = l_prime_factor(spec, coarse)
    oracle = (eval_basis_derivative(spec, fine) ** 2).sum(axis=1).max()
    assert val >= oracle - 1e-4
    with pytest.raises(ValueError):
        l_prime_factor(spec, np.array([]))
