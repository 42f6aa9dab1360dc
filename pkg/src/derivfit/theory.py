"""Quadrature-backed theoretical quantities used as independent test oracles.

Everything here is computed from integrals, never from the empirical
machinery it is meant to check: projection coefficients of a function on
a basis, the population Gram under a design density, the density-weighted
link matrices, the projection/derivative commutation gap with its
per-family closed forms, and the population penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import quad

from .basis import (BasisSpec, Family, delta_matrix, eval_basis,
                    eval_basis_derivative)
from .errors import QuadratureError

_QUAD_LIMIT = 400


def integration_bounds(spec: BasisSpec, margin: float = 8.0) -> tuple[float, float]:
    """Finite bounds for Lebesgue inner products with the basis.

    Compact supports are returned as-is; the half-trigonometric family
    integrates over its rescaling interval (its reference inner product).
    For the exponential-weight families the bound covers the oscillatory
    region of the highest element plus a margin where the weight has
    decayed below 1e-16.
    """
    if spec.family is Family.HALF_TRIG:
        return spec.interval  # type: ignore[return-value]
    lo, hi = spec.support
    if spec.is_compact:
        return lo, hi
    if spec.family is Family.LAGUERRE:
        return 0.0, 2.0 * spec.m + 30.0 + margin
    cut = math.sqrt(2.0 * spec.m + 3.0) + margin
    return -cut, cut


def _quad(fn, lo, hi, tol) -> float:
    val, err = quad(fn, lo, hi, epsabs=tol, epsrel=1e-10, limit=_QUAD_LIMIT)
    if err > max(100.0 * tol, 1e-8 * abs(val)):
        raise QuadratureError(
            f"quadrature error estimate {err:.2e} exceeds tolerance on [{lo}, {hi}]")
    return val


@dataclass(frozen=True)
class DensitySpec:
    """A design density: callable, support, and a bound on its sup."""

    evaluator: object
    support: tuple[float, float]
    sup_bound: float

    def __post_init__(self):
        lo, hi = self.support
        mass = _quad(self.evaluator, lo, hi, 1e-8)
        if abs(mass - 1.0) > 1e-6:
            raise ValueError(f"density integrates to {mass:.8f}, not 1")

    def __call__(self, x):
        return self.evaluator(x)


@dataclass(frozen=True)
class TheoreticalGram:
    """Population Gram: entries are the f-weighted products of basis elements."""

    psi: np.ndarray
    spec: BasisSpec
    density: DensitySpec

    def leading_block(self, m: int) -> np.ndarray:
        return self.psi[:m, :m]


def projection_coefficients(b, spec: BasisSpec, j_max: int,
                            tol: float = 1e-9) -> np.ndarray:
    """Inner products of b with the first j_max basis elements (Lebesgue weight)."""
    lo, hi = integration_bounds(spec.with_m(max(j_max, 1)))
    out = np.empty(j_max)
    probe = spec.with_m(j_max)
    for j in range(j_max):
        out[j] = _quad(lambda x: b(x) * eval_basis(probe, x)[j], lo, hi, tol)
    return out


def derivative_coefficients(b, spec: BasisSpec, j_max: int, b_prime=None,
                            tol: float = 1e-9) -> np.ndarray:
    """Inner products of b' with the basis elements.

    With b_prime given they are integrated directly; otherwise integration
    by parts is used (the caller asserts the boundary terms vanish) and
    the integrand is b times the basis derivatives.
    """
    lo, hi = integration_bounds(spec.with_m(max(j_max, 1)))
    probe = spec.with_m(j_max)
    out = np.empty(j_max)
    for j in range(j_max):
        if b_prime is not None:
            out[j] = _quad(lambda x: b_prime(x) * eval_basis(probe, x)[j], lo, hi, tol)
        else:
            out[j] = -_quad(lambda x: b(x) * eval_basis_derivative(probe, x)[j],
                            lo, hi, tol)
    return out


def theoretical_gram(spec: BasisSpec, density: DensitySpec,
                     tol: float = 1e-8) -> TheoreticalGram:
    """Entrywise quadrature of phi_j phi_k f: the expectation of the
    empirical Gram under the design density."""
    dlo, dhi = density.support
    if spec.family is Family.HALF_TRIG:
        # periodic extension contributes wherever the density lives
        lo, hi = dlo, dhi
    else:
        blo, bhi = integration_bounds(spec)
        lo, hi = max(blo, dlo), min(bhi, dhi)
    if not lo < hi:
        raise ValueError("density support does not meet the basis support")
    m = spec.m
    psi = np.empty((m, m))
    for j in range(m):
        for k in range(j + 1):
            psi[j, k] = psi[k, j] = _quad(
                lambda x, j=j, k=k: (v := eval_basis(spec, x))[j] * v[k] * density(x),
                lo, hi, tol)
    return TheoreticalGram(psi=psi, spec=spec, density=density)


def _psd_power(mat: np.ndarray, power: float) -> np.ndarray:
    """Symmetric PSD matrix power through the eigendecomposition."""
    lam, u = scipy.linalg.eigh(mat)
    if lam[0] <= 1e-12 * max(lam[-1], 0.0):
        raise ValueError("matrix is not numerically positive definite")
    return (u * lam ** power) @ u.T


def weighted_delta(spec: BasisSpec, gram: TheoreticalGram, which: int) -> np.ndarray:
    """Density-weighted link matrix, variant 1 or 2.

    gram must be the population Gram at the extended dimension m+p; the
    m-dimensional Gram is its leading block.  Variant 1 is
    Psi_{m+p}^{1/2} Delta^T Psi_m^{-1/2}; variant 2 swaps the powers.
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    m, p = spec.m, spec.p
    if gram.psi.shape[0] != m + p:
        raise ValueError(f"gram has dimension {gram.psi.shape[0]}, expected {m + p}")
    delta_t = delta_matrix(spec).entries.T
    psi_m = gram.leading_block(m)
    psi_ext = gram.psi
    if which == 1:
        return _psd_power(psi_ext, 0.5) @ delta_t @ _psd_power(psi_m, -0.5)
    return _psd_power(psi_ext, -0.5) @ delta_t @ _psd_power(psi_m, 0.5)


def theoretical_penalty(spec: BasisSpec, gram: TheoreticalGram,
                        sigma2: float, n: int) -> float:
    """Population penalty: (sigma^2 m / n) times the squared operator norm
    of the variant-1 weighted link matrix."""
    d1 = weighted_delta(spec, gram, which=1)
    lam = scipy.linalg.eigvalsh(d1.T @ d1)
    return sigma2 * spec.m / n * max(lam[-1], 0.0)


# ---------------------------------------------------------------------------
# Projection/derivative commutation gap
# ---------------------------------------------------------------------------

def _legendre_gap_closed(c: np.ndarray, m: int) -> float:
    """Even-dimension Legendre closed form, assembled from the family's
    derivative expansion and integration by parts.

    c holds the coefficients of b on the first m elements (0-based).
    """
    p = m // 2
    c_odd = c[1:m:2]    # indices 1, 3, ..., m-1  -> elements g_{2k+1}
    c_even = c[0:m:2]   # indices 0, 2, ..., m-2  -> elements g_{2k}
    w_odd = np.sqrt(4.0 * np.arange(p) + 3.0)
    w_even = np.sqrt(4.0 * np.arange(p) + 1.0)
    total = 0.0
    # components on even elements g_{2i}
    for i in range(p):
        high = float((w_odd[i:] * c_odd[i:]).sum())
        low = float((w_odd[:i] * c_odd[:i]).sum())
        total += (4 * i + 1) * (high + low) ** 2
    # components on odd elements g_{2i+1}, i < p-1
    w5 = np.sqrt(4.0 * np.arange(p - 1) + 5.0)
    for i in range(p - 1):
        high = float((w5[i:] * c_even[i + 1:p]).sum())
        low = float((w_even[:i + 1] * c_even[:i + 1]).sum())
        total += (4 * i + 3) * (high + low) ** 2
    # component on the top odd element g_{m-1}
    total += (4 * p - 1) * float((w_even * c_even).sum()) ** 2
    return total


def projection_gap(b, spec: BasisSpec, b_prime=None,
                   laguerre_tail_form: bool = False,
                   tol: float = 1e-9) -> tuple[float, float | None]:
    """Squared distance between (projection of b)' and projection of b'.

    Returns (numeric, closed) where numeric integrates the squared
    difference directly and closed is the family formula: zero for the
    odd trigonometric case, a two-coefficient expression for Hermite, a
    squared coefficient sum (partial or, when b(0)=0, tail form) for
    Laguerre, and the even-dimension expression for Legendre (None for
    odd Legendre dimensions).  The caller asserts the family's boundary
    condition on b.
    """
    fam = spec.family
    if fam is Family.HALF_TRIG:
        raise ValueError("the commutation gap is defined for the orthonormal families")
    m = spec.m
    c = projection_coefficients(b, spec, m + spec.p, tol=tol)
    d = derivative_coefficients(b, spec, m, b_prime=b_prime, tol=tol)
    lo, hi = integration_bounds(spec)

    def diff_sq(x):
        vals = eval_basis(spec, x)
        derivs = eval_basis_derivative(spec, x)
        return (float(c[:m] @ derivs) - float(d @ vals)) ** 2

    numeric = _quad(diff_sq, lo, hi, tol)

    closed: float | None
    if fam is Family.TRIG_ODD:
        closed = 0.0
    elif fam is Family.HERMITE:
        closed = m / 2.0 * (c[m - 1] ** 2 + c[m] ** 2)
    elif fam is Family.LAGUERRE:
        if laguerre_tail_form:
            closed = 4.0 * m * _laguerre_tail_sum(b, spec, m, tol) ** 2
        else:
            closed = 4.0 * m * float(c[:m].sum()) ** 2
    else:  # LEGENDRE
        closed = _legendre_gap_closed(c, m) if m % 2 == 0 else None
    return numeric, closed


def _laguerre_tail_sum(b, spec: BasisSpec, m: int, tol: float) -> float:
    """Sum of coefficients from index m on, extended until it converges."""
    block, k_max = 40, m + 400
    total, start = 0.0, m
    while start < k_max:
        stop = min(start + block, k_max)
        coeffs = projection_coefficients(b, spec, stop, tol=tol)[start:stop]
        total += float(coeffs.sum())
        if np.abs(coeffs[-5:]).max() < 1e-10:
            return total
        start = stop
    raise QuadratureError("Laguerre tail coefficients did not converge by index "
                          f"{k_max}; is b smooth with b(0) = 0?")
