"""Dimension selection: data-driven, oracle, and reuse strategies.

The data-driven selector compares every pair of candidate fits through
their empirical-norm distance at the sample points, penalized by a
variance proxy, and restricts candidates to the collection whose Gram
conditioning passes the squared-norm gate.  The oracle selector uses the
known target (simulation only); the reuse selector picks the dimension by
a penalized least-squares contrast on the regression fit and reuses it
for the derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import trapezoid

from .basis import BasisSpec, Family, admissible_dims, eval_basis, eval_basis_derivative
from .design import (DesignSet, Sample, default_d_constant, design_from_matrices,
                     stability_check, trim_interval)
from .errors import EmptyCollectionError, SingularGramError
from .estimators import DerivativeFit, Strategy

CRITERION_TIE_TOL = 1e-12


@dataclass(frozen=True)
class GlConfig:
    """Tuning constants for the data-driven selector.

    sigma2 may be a positive float or the string "estimate"; d_constant
    None means the sample-dependent default.  m_grid None means the
    family's admissible dimensions up to min(40, n // 10).
    """

    kappa0: float = 1.0
    kappa1: float = 1.0
    sigma2: float | str = "estimate"
    d_constant: float | None = None
    m_grid: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kappa0 <= 0 or self.kappa1 < self.kappa0:
            raise ValueError("require 0 < kappa0 <= kappa1")
        if isinstance(self.sigma2, str):
            if self.sigma2 != "estimate":
                raise ValueError(f"sigma2 must be a float or 'estimate', got {self.sigma2!r}")
        elif self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")


@dataclass(frozen=True)
class TraceRow:
    m: int
    in_collection: bool
    v_hat: float | None = None
    a_value: float | None = None


@dataclass(frozen=True)
class SelectionTrace:
    rows: tuple[TraceRow, ...]
    m_hat: int
    strategy: str

    @property
    def members(self) -> list[int]:
        return [r.m for r in self.rows if r.in_collection]


class DesignCache:
    """Shared basis evaluations for a sweep over nested dimensions.

    Column slices of one tall evaluation give every design in the sweep;
    each dimension's Gram eigendecomposition is memoized.
    """

    def __init__(self, sample: Sample, family: Family, m_hi: int,
                 interval: tuple[float, float] | None = None):
        if family is Family.HALF_TRIG and interval is None:
            interval = trim_interval(sample)
        self.sample = sample
        self.family = family
        self.interval = interval
        top = self.spec_for(m_hi).extended()
        self._phi = eval_basis(top, sample.x)
        lo, hi = top.support
        inside = (sample.x >= lo) & (sample.x <= hi)
        self._phi_prime = np.zeros_like(self._phi)
        if inside.any():
            self._phi_prime[inside] = eval_basis_derivative(top, sample.x[inside])
        self._designs: dict[int, DesignSet] = {}

    def spec_for(self, m: int) -> BasisSpec:
        if self.family is Family.HALF_TRIG:
            return BasisSpec(self.family, m, self.interval)
        return BasisSpec(self.family, m)

    def design(self, m: int) -> DesignSet:
        if m > self._phi.shape[1]:
            raise ValueError(f"dimension {m} exceeds the cache's top dimension "
                             f"{self._phi.shape[1]}")
        if m not in self._designs:
            self._designs[m] = design_from_matrices(
                self._phi[:, :m], self._phi_prime[:, :m], self.spec_for(m))
        return self._designs[m]


def default_m_grid(family: Family, n: int, m_max: int | None = None) -> tuple[int, ...]:
    """Admissible dimensions up to min(40, n // 10) (or an explicit cap)."""
    if m_max is None:
        m_max = min(40, max(1, n // 10))
    return tuple(admissible_dims(family, m_max))


def penalty_v_hat(design: DesignSet, sigma2: float, n: int) -> float:
    """Variance proxy: (sigma^2 m / n) times the top eigenvalue of the
    Gram-whitened derivative Gram."""
    if design.is_singular:
        raise SingularGramError(f"Gram matrix singular at m={design.m}")
    w = design.whitener()
    psi_prime = design.phi_prime.T @ design.phi_prime / design.n
    s = w @ psi_prime @ w
    lam = scipy.linalg.eigvalsh((s + s.T) / 2.0)
    return sigma2 * design.m / n * max(lam[-1], 0.0)


def collection_members(cache: DesignCache, m_grid, n: int,
                       d_constant: float) -> list[int]:
    """Dimensions whose extended-design conditioning passes the gate.

    Membership is checked at m+p; a singular Gram at m or m+p excludes m.
    """
    members = []
    for m in m_grid:
        ext_m = cache.spec_for(m).extended().m
        verdict = stability_check(cache.design(ext_m), n, d_constant)
        if verdict.in_collection and not cache.design(m).is_singular:
            members.append(m)
    return members


def estimate_sigma2(sample: Sample, family: Family,
                    m_grid=None, d_constant: float | None = None,
                    interval: tuple[float, float] | None = None) -> float:
    """Residual mean square at the largest collection member, corrected
    for the fitted degrees of freedom."""
    n = sample.n
    if m_grid is None:
        m_grid = default_m_grid(family, n)
    if n <= 2 * max(m_grid):
        raise ValueError(f"need n > 2*m_max = {2 * max(m_grid)}, got n = {n}")
    cache = DesignCache(sample, family, max(m_grid), interval)
    if d_constant is None:
        d_constant = default_d_constant(sample.x, n)
    members = collection_members(cache, m_grid, n, d_constant)
    if not members:
        raise EmptyCollectionError("no stable dimension to estimate the noise level from")
    m = members[-1]
    design = cache.design(m)
    theta = design.solve_psi(design.phi.T @ sample.y / n)
    resid = sample.y - design.phi @ theta
    return float(resid @ resid / n) * n / (n - m)


def _resolve_sigma2(config: GlConfig, sample: Sample, family: Family,
                    m_grid, d_constant: float,
                    interval: tuple[float, float] | None) -> float:
    if config.sigma2 == "estimate":
        return estimate_sigma2(sample, family, m_grid, d_constant, interval)
    return float(config.sigma2)


def gl_select(sample: Sample, family: Family, config: GlConfig | None = None,
              interval: tuple[float, float] | None = None
              ) -> tuple[SelectionTrace, DerivativeFit]:
    """Pick the dimension minimizing the pairwise-comparison criterion.

    For each member m, the bias proxy is the largest clipped excess of
    the empirical-norm distance to every other member's strategy-1 fit
    over the penalized variance proxy; the criterion adds kappa1 times
    the member's own penalty.  Ties within 1e-12 go to the smaller m.
    Returns the trace and the strategy-1 fit at the chosen dimension.
    """
    if config is None:
        config = GlConfig()
    n = sample.n
    m_grid = config.m_grid or default_m_grid(family, n)
    cache = DesignCache(sample, family, max(m_grid), interval)
    d_constant = (config.d_constant if config.d_constant is not None
                  else default_d_constant(sample.x, n))
    members = collection_members(cache, m_grid, n, d_constant)
    if not members:
        raise EmptyCollectionError(
            f"no dimension in {list(m_grid)} passes the collection gate "
            f"(d={d_constant:.3g}, n={n})")
    sigma2 = _resolve_sigma2(config, sample, family, m_grid, d_constant, cache.interval)

    fits: dict[int, np.ndarray] = {}
    thetas: dict[int, np.ndarray] = {}
    v_hat: dict[int, float] = {}
    for m in members:
        design = cache.design(m)
        theta = design.solve_psi(design.phi.T @ sample.y / n)
        thetas[m] = theta
        fits[m] = design.phi_prime @ theta
        v_hat[m] = penalty_v_hat(design, sigma2, n)

    a_value: dict[int, float] = {}
    for m in members:
        best = 0.0
        for m2 in members:
            if m2 <= m:
                continue  # the m-wedge fit coincides with the m2 fit
            diff = fits[m] - fits[m2]
            excess = float(diff @ diff / n) - config.kappa0 * v_hat[m2]
            if excess > best:
                best = excess
        a_value[m] = best

    m_hat, best_crit = members[0], math.inf
    for m in members:
        crit = a_value[m] + config.kappa1 * v_hat[m]
        if crit < best_crit - CRITERION_TIE_TOL:
            m_hat, best_crit = m, crit

    rows = tuple(
        TraceRow(m, m in fits, v_hat.get(m), a_value.get(m))
        for m in m_grid)
    trace = SelectionTrace(rows=rows, m_hat=m_hat, strategy="gl")
    fit = DerivativeFit(theta=thetas[m_hat], strategy=Strategy.DERIV_OF_PROJECTION,
                        spec=cache.spec_for(m_hat))
    return trace, fit


def oracle_select(sample: Sample, family: Family, m_grid, truth,
                  eval_interval: tuple[float, float],
                  fit_kind: str = "derivative",
                  interval: tuple[float, float] | None = None,
                  grid_points: int = 512) -> tuple[int, float]:
    """Dimension minimizing the true squared L2 error (simulation only).

    truth is the target function (the regression function for
    fit_kind="regression", its derivative for "derivative"); the error is
    a trapezoid-rule integral on a uniform grid over eval_interval.
    Singular dimensions are skipped; if every fit is singular a
    SingularGramError is raised.
    """
    if fit_kind not in ("derivative", "regression"):
        raise ValueError(f"fit_kind must be 'derivative' or 'regression', got {fit_kind!r}")
    cache = DesignCache(sample, family, max(m_grid), interval)
    lo, hi = eval_interval
    grid = np.linspace(lo, hi, grid_points)
    errors = _oracle_error_sweep(cache, m_grid, sample.y, grid,
                                 {fit_kind: eval_on_grid(truth, grid)})
    if not errors:
        raise SingularGramError("every candidate dimension has a singular Gram")
    best_m = min(errors, key=lambda m: (errors[m][fit_kind], m))
    return best_m, errors[best_m][fit_kind]


def eval_on_grid(fn, grid: np.ndarray) -> np.ndarray:
    """Evaluate a scalar function on a grid, vectorized when possible."""
    try:
        vals = np.asarray(fn(grid), dtype=float)
        if vals.shape == grid.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.asarray([fn(float(x)) for x in grid], dtype=float)


def _oracle_error_sweep(cache: DesignCache, m_grid, y: np.ndarray,
                        grid: np.ndarray, targets: dict[str, np.ndarray]
                        ) -> dict[int, dict[str, float]]:
    """Trapezoid-rule squared errors per dimension for each named target."""
    top = cache.spec_for(max(m_grid))
    basis_grid = eval_basis(top, grid)
    lo, hi = top.support
    inside = (grid >= lo) & (grid <= hi)
    deriv_grid = np.zeros_like(basis_grid)
    if inside.any():
        deriv_grid[inside] = eval_basis_derivative(top, grid[inside])
    out: dict[int, dict[str, float]] = {}
    for m in m_grid:
        design = cache.design(m)
        if design.is_singular:
            continue
        theta = design.solve_psi(design.phi.T @ y / design.n)
        cell: dict[str, float] = {}
        for kind, target in targets.items():
            curve = (basis_grid[:, :m] if kind == "regression"
                     else deriv_grid[:, :m]) @ theta
            cell[kind] = float(trapezoid((curve - target) ** 2, grid))
        out[m] = cell
    return out


def reuse_select(sample: Sample, family: Family, m_grid=None,
                 sigma2: float | None = None,
                 d_constant: float | None = None,
                 interval: tuple[float, float] | None = None
                 ) -> tuple[int, DerivativeFit]:
    """Select the dimension for the regression fit by penalized contrast
    (residual empirical norm plus 2 sigma^2 m / n) and reuse it for the
    derivative.  Returns (chosen m, strategy-1 derivative fit)."""
    n = sample.n
    if m_grid is None:
        m_grid = default_m_grid(family, n)
    cache = DesignCache(sample, family, max(m_grid), interval)
    if d_constant is None:
        d_constant = default_d_constant(sample.x, n)
    members = collection_members(cache, m_grid, n, d_constant)
    if not members:
        raise EmptyCollectionError("no dimension passes the collection gate")
    if sigma2 is None:
        sigma2 = estimate_sigma2(sample, family, m_grid, d_constant, cache.interval)
    best_m, best_crit = members[0], math.inf
    for m in members:
        design = cache.design(m)
        theta = design.solve_psi(design.phi.T @ sample.y / n)
        resid = sample.y - design.phi @ theta
        crit = float(resid @ resid / n) + 2.0 * sigma2 * m / n
        if crit < best_crit - CRITERION_TIE_TOL:
            best_m, best_crit = m, crit
    design = cache.design(best_m)
    theta = design.solve_psi(design.phi.T @ sample.y / n)
    fit = DerivativeFit(theta=theta, strategy=Strategy.DERIV_OF_PROJECTION,
                        spec=cache.spec_for(best_m))
    return best_m, fit
