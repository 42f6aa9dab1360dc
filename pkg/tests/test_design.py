"""Design matrices, norms, stability gates, trimming."""

import math

import numpy as np
import pytest

from derivfit.basis import BasisSpec, Family, delta_matrix
from derivfit.design import (STABILITY_C, Sample, build_design, default_d_constant,
                             empirical_inner, empirical_norm, frobenius_norm,
                             operator_norm, stability_check, trim_interval)


def test_sample_validation():
    with pytest.raises(ValueError):
        Sample(x=np.array([1.0, 2.0]), y=np.array([1.0]))
    with pytest.raises(ValueError):
        Sample(x=np.array([]), y=np.array([]))
    with pytest.raises(ValueError):
        Sample(x=np.array([np.nan]), y=np.array([1.0]))
    with pytest.raises(ValueError):
        Sample(x=np.array([1.0]), y=np.array([np.inf]))


def test_build_design_single_point_constant():
    sample = Sample(x=np.array([0.5]), y=np.array([2.0]))
    design = build_design(sample, BasisSpec(Family.TRIG_ODD, 1))
    np.testing.assert_allclose(design.phi, [[1.0]])
    np.testing.assert_allclose(design.psi_hat, [[1.0]])


def test_build_design_constant_gram_any_n():
    rng = np.random.default_rng(0)
    sample = Sample(x=rng.uniform(0, 1, 2), y=np.zeros(2))
    design = build_design(sample, BasisSpec(Family.TRIG_ODD, 1))
    np.testing.assert_allclose(design.psi_hat, [[1.0]])


def test_gram_concentration_uniform_trig():
    rng = np.random.default_rng(7)
    n = 500
    sample = Sample(x=rng.uniform(0, 1, n), y=np.zeros(n))
    design = build_design(sample, BasisSpec(Family.TRIG_ODD, 5))
    assert np.abs(design.psi_hat - np.eye(5)).max() <= 5 / math.sqrt(n)


def test_gram_exactly_symmetric():
    rng = np.random.default_rng(3)
    sample = Sample(x=rng.standard_normal(200), y=np.zeros(200))
    design = build_design(sample, BasisSpec(Family.HERMITE, 8))
    assert np.abs(design.psi_hat - design.psi_hat.T).max() == 0.0


@pytest.mark.parametrize("family,xgen", [
    (Family.TRIG_ODD, lambda rng, n: rng.uniform(0, 1, n)),
    (Family.HALF_TRIG, lambda rng, n: rng.uniform(-0.5, 1.5, n)),
    (Family.LAGUERRE, lambda rng, n: rng.exponential(1.0, n)),
    (Family.HERMITE, lambda rng, n: rng.standard_normal(n)),
    (Family.LEGENDRE, lambda rng, n: rng.uniform(-1, 1, n)),
])
def test_phi_prime_consistency_with_link(family, xgen):
    rng = np.random.default_rng(11)
    sample = Sample(x=xgen(rng, 300), y=np.zeros(300))
    m = 7 if family is Family.TRIG_ODD else 8
    spec = (BasisSpec(family, m, (-0.5, 1.5)) if family is Family.HALF_TRIG
            else BasisSpec(family, m))
    design = build_design(sample, spec)
    design_ext = build_design(sample, spec.extended())
    delta = delta_matrix(spec).entries
    linked = design_ext.phi @ delta.T
    scale = 1.0 + np.abs(linked).max()
    assert np.abs(design.phi_prime - linked).max() <= 1e-9 * scale


def test_operator_and_frobenius_norms():
    assert operator_norm(np.eye(3)) == pytest.approx(1.0)
    assert frobenius_norm(np.eye(3)) == pytest.approx(math.sqrt(3))
    d = np.diag([2.0, 1.0])
    assert operator_norm(d) == pytest.approx(2.0)
    assert frobenius_norm(d) == pytest.approx(math.sqrt(5))


def test_trace_product_inequality():
    rng = np.random.default_rng(5)
    for _ in range(10):
        a = rng.standard_normal((6, 6))
        b = rng.standard_normal((6, 6))
        a = a @ a.T
        b = b @ b.T
        lhs = np.trace(a @ b)
        rhs = operator_norm(a) * np.trace(b)
        assert lhs <= rhs + 1e-9 * abs(rhs)


def test_empirical_norm_and_inner():
    assert empirical_norm([1.0, 1.0, 1.0, 1.0]) == pytest.approx(1.0)
    assert empirical_inner([1.0, -1.0], [1.0, 1.0]) == pytest.approx(0.0)
    rng = np.random.default_rng(9)
    u, v = rng.standard_normal(50), rng.standard_normal(50)
    lhs = empirical_norm(u + v) ** 2
    rhs = empirical_norm(u) ** 2 + 2 * empirical_inner(u, v) + empirical_norm(v) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-12)
    with pytest.raises(ValueError):
        empirical_inner([1.0], [1.0, 2.0])


def test_stability_identity_gram_passes():
    rng = np.random.default_rng(1)
    n = 1000
    sample = Sample(x=rng.uniform(0, 1, n), y=np.zeros(n))
    design = build_design(sample, BasisSpec(Family.TRIG_ODD, 3))
    verdict = stability_check(design, n)
    assert verdict.in_lambda and verdict.in_collection
    assert verdict.l_factor == 3.0
    # frozen constant value
    assert STABILITY_C == pytest.approx(0.0240439, abs=1e-7)


def test_stability_singular_gram_fails_both():
    # two points cannot identify three coefficients
    sample = Sample(x=np.array([0.1, 0.2]), y=np.zeros(2))
    design = build_design(sample, BasisSpec(Family.TRIG_ODD, 3))
    verdict = stability_check(design, 2)
    assert not verdict.in_lambda and not verdict.in_collection
    assert math.isinf(verdict.op_norm_psi_inv)


@pytest.mark.parametrize("family", [Family.HERMITE, Family.HALF_TRIG])
def test_stability_membership_monotone_in_m(family):
    rng = np.random.default_rng(123)
    n = 250
    sample = Sample(x=rng.standard_normal(n), y=np.zeros(n))
    d_const = default_d_constant(sample.x, n)
    flags_lambda, flags_coll = [], []
    for m in range(1, 22):
        spec = (BasisSpec(family, m, (-2.0, 2.0)) if family is Family.HALF_TRIG
                else BasisSpec(family, m))
        design = build_design(sample, spec.extended())
        verdict = stability_check(design, n, d_const)
        flags_lambda.append(verdict.in_lambda)
        flags_coll.append(verdict.in_collection)
    assert flags_coll[0]  # m=1 is in the collection with the default constant
    for flags in (flags_lambda, flags_coll):
        seen_false = False
        for flag in flags:
            if seen_false:
                assert not flag
            seen_false = seen_false or not flag


def test_variance_trace_monotone():
    rng = np.random.default_rng(77)
    n = 800
    sample = Sample(x=rng.standard_normal(n), y=np.zeros(n))
    traces = []
    for m in range(1, 11):
        design = build_design(sample, BasisSpec(Family.HERMITE, m))
        psi_prime = design.phi_prime.T @ design.phi_prime / n
        w = design.whitener()
        traces.append(np.trace(w @ psi_prime @ w))
    diffs = np.diff(traces)
    assert np.all(diffs >= -1e-9 * np.maximum(1.0, np.abs(traces[:-1])))


def test_trim_interval_linear_interpolation_rule():
    sample = Sample(x=np.arange(1.0, 101.0), y=np.zeros(100))
    lo, hi = trim_interval(sample)
    assert lo == pytest.approx(3.97)
    assert hi == pytest.approx(97.03)


def test_trim_interval_constant_and_permutation():
    sample = Sample(x=np.full(10, 2.5), y=np.zeros(10))
    assert trim_interval(sample) == (2.5, 2.5)
    rng = np.random.default_rng(5)
    x = rng.standard_normal(101)
    s1 = Sample(x=x, y=np.zeros(101))
    s2 = Sample(x=x[rng.permutation(101)], y=np.zeros(101))
    assert trim_interval(s1) == trim_interval(s2)
