"""Orthonormal function families and their exact derivative structure.

Five families are supported:

* ``TRIG_ODD`` on [0, 1]: the constant 1 followed by sqrt(2)cos(2*pi*j*x),
  sqrt(2)sin(2*pi*j*x) pairs; only odd dimensions are admissible.
* ``HALF_TRIG`` rescaled to a configurable [a, b]: the constant plus
  sqrt(2/(b-a))sin/cos(pi*j*(x-a)/(b-a)) pairs in the order
  (1, sin, cos, sin, cos, ...); every dimension is admissible, and the
  functions extend periodically beyond [a, b].
* ``LAGUERRE`` on [0, inf): sqrt(2)*L_j(2x)*exp(-x).
* ``HERMITE`` on the real line: normalized Hermite functions.
* ``LEGENDRE`` on [-1, 1]: normalized Legendre polynomials.

All polynomial families are evaluated through normalized three-term
recurrences with the weights folded in, so values stay O(1) up to large
degree.  Each family's derivatives lie in the span of the first m+p
elements; ``delta_matrix`` returns that exact expansion, row j holding the
coefficients of the j-th element's derivative.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class Family(enum.Enum):
    TRIG_ODD = "trig-odd"
    HALF_TRIG = "half-trig"
    LAGUERRE = "laguerre"
    HERMITE = "hermite"
    LEGENDRE = "legendre"


# Families whose derivatives stay inside the same m-dimensional span.
_P_ZERO = {Family.TRIG_ODD, Family.LAGUERRE, Family.LEGENDRE}

_FAMILY_ALIASES = {
    "trig": Family.TRIG_ODD,
    "trig-odd": Family.TRIG_ODD,
    "trigonometric": Family.TRIG_ODD,
    "half-trig": Family.HALF_TRIG,
    "halftrig": Family.HALF_TRIG,
    "half-trigonometric": Family.HALF_TRIG,
    "laguerre": Family.LAGUERRE,
    "hermite": Family.HERMITE,
    "legendre": Family.LEGENDRE,
}


def parse_family(name: str) -> Family:
    """Map a user-facing family name (CLI/config) to a Family member."""
    try:
        return _FAMILY_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown basis family {name!r}; choose from "
                         f"{sorted(set(_FAMILY_ALIASES))}") from None


@dataclass(frozen=True)
class BasisSpec:
    """A basis family together with a dimension m.

    HALF_TRIG carries its rescaling interval; the other families have a
    fixed support.  ``p`` is the derivative overflow: derivatives of the
    first m elements live in the span of the first m+p elements.
    """

    family: Family
    m: int
    interval: tuple[float, float] | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"dimension m must be >= 1, got {self.m}")
        if self.family is Family.TRIG_ODD and self.m % 2 == 0:
            raise ValueError("TRIG_ODD admits only odd dimensions")
        if self.family is Family.HALF_TRIG:
            if self.interval is None:
                raise ValueError("HALF_TRIG requires a rescaling interval (a, b)")
            a, b = self.interval
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise ValueError(f"invalid HALF_TRIG interval {self.interval}")
        elif self.interval is not None:
            raise ValueError(f"{self.family} has a fixed support; interval not allowed")

    @property
    def p(self) -> int:
        if self.family in _P_ZERO:
            return 0
        if self.family is Family.HERMITE:
            return 1
        # HALF_TRIG: odd m closes under differentiation (complete sin/cos
        # pairs); even m leaves a dangling sine whose derivative is the
        # cosine one index up.
        return 0 if self.m % 2 == 1 else 1

    @property
    def support(self) -> tuple[float, float]:
        """Where the functions live; evaluation outside gives zero.

        The half-trigonometric family extends over the whole line (its
        interval is a rescaling/normalization parameter, not a mask):
        clamping it to [a, b] makes the dictionary's own Gram
        exponentially ill-conditioned, while the periodic extension keeps
        design points beyond [a, b] informative.
        """
        if self.family is Family.TRIG_ODD:
            return (0.0, 1.0)
        if self.family is Family.LAGUERRE:
            return (0.0, math.inf)
        if self.family is Family.LEGENDRE:
            return (-1.0, 1.0)
        return (-math.inf, math.inf)

    @property
    def is_compact(self) -> bool:
        lo, hi = self.support
        return math.isfinite(lo) and math.isfinite(hi)

    def with_m(self, m: int) -> "BasisSpec":
        return BasisSpec(self.family, m, self.interval)

    def extended(self) -> "BasisSpec":
        """The spec at dimension m+p (identity when p = 0)."""
        return self if self.p == 0 else self.with_m(self.m + self.p)


def admissible_dims(family: Family, m_max: int) -> list[int]:
    """Dimensions the family admits, up to m_max."""
    if family is Family.TRIG_ODD:
        return list(range(1, m_max + 1, 2))
    return list(range(1, m_max + 1))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _as_points(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    return np.atleast_1d(arr), scalar


def eval_basis(spec: BasisSpec, x) -> np.ndarray:
    """Values (phi_1(x), ..., phi_m(x)); zero outside the support.

    Accepts a scalar (returns shape (m,)) or a 1-D array (returns (n, m)).
    """
    pts, scalar = _as_points(x)
    lo, hi = spec.support
    inside = (pts >= lo) & (pts <= hi)
    out = np.zeros((pts.size, spec.m))
    if inside.any():
        out[inside] = _eval_inside(spec, pts[inside])
    return out[0] if scalar else out


def _eval_inside(spec: BasisSpec, x: np.ndarray) -> np.ndarray:
    m = spec.m
    fam = spec.family
    if fam is Family.TRIG_ODD:
        # order: 1, sqrt2 cos(2pi x), sqrt2 sin(2pi x), sqrt2 cos(4pi x), ...
        out = np.empty((x.size, m))
        out[:, 0] = 1.0
        for col in range(1, m):
            j = (col + 1) // 2
            phase = 2.0 * np.pi * j * x
            out[:, col] = np.sqrt(2.0) * (np.cos(phase) if col % 2 == 1 else np.sin(phase))
        return out
    if fam is Family.HALF_TRIG:
        a, b = spec.interval  # type: ignore[misc]
        w = b - a
        u = (x - a) / w
        out = np.empty((x.size, m))
        out[:, 0] = 1.0 / np.sqrt(w)
        amp = np.sqrt(2.0 / w)
        for col in range(1, m):
            j = (col + 1) // 2
            phase = np.pi * j * u
            out[:, col] = amp * (np.sin(phase) if col % 2 == 1 else np.cos(phase))
        return out
    if fam is Family.LAGUERRE:
        # l_j(x) = sqrt2 L_j(2x) e^{-x}; weight folded into the start values.
        out = np.empty((x.size, m))
        e = np.exp(-x)
        out[:, 0] = np.sqrt(2.0) * e
        if m > 1:
            out[:, 1] = np.sqrt(2.0) * (1.0 - 2.0 * x) * e
        for j in range(2, m):
            out[:, j] = ((2 * j - 1 - 2.0 * x) * out[:, j - 1] - (j - 1) * out[:, j - 2]) / j
        return out
    if fam is Family.HERMITE:
        out = np.empty((x.size, m))
        out[:, 0] = np.pi ** -0.25 * np.exp(-x * x / 2.0)
        if m > 1:
            out[:, 1] = np.sqrt(2.0) * x * out[:, 0]
        for j in range(2, m):
            out[:, j] = (np.sqrt(2.0 / j) * x * out[:, j - 1]
                         - np.sqrt((j - 1) / j) * out[:, j - 2])
        return out
    # LEGENDRE
    out = np.empty((x.size, m))
    out[:, 0] = 1.0 / np.sqrt(2.0)
    if m > 1:
        out[:, 1] = np.sqrt(1.5) * x
    for j in range(2, m):
        a_j = np.sqrt((2 * j + 1) * (2 * j - 1)) / j
        c_j = (j - 1) / j * np.sqrt((2 * j + 1) / (2 * j - 3))
        out[:, j] = a_j * x * out[:, j - 1] - c_j * out[:, j - 2]
    return out


def eval_basis_derivative(spec: BasisSpec, x) -> np.ndarray:
    """Values (phi_1'(x), ..., phi_m'(x)), via the exact recursion formulas.

    x must lie in the closed support (boundary values are the one-sided
    limits of the recursions); strictly outside raises ValueError.
    """
    pts, scalar = _as_points(x)
    lo, hi = spec.support
    if ((pts < lo) | (pts > hi)).any():
        raise ValueError("derivative evaluation outside the basis support")
    out = _eval_derivative_inside(spec, pts)
    return out[0] if scalar else out


def _eval_derivative_inside(spec: BasisSpec, x: np.ndarray) -> np.ndarray:
    m = spec.m
    fam = spec.family
    if fam is Family.TRIG_ODD:
        out = np.zeros((x.size, m))
        for col in range(1, m):
            j = (col + 1) // 2
            om = 2.0 * np.pi * j
            phase = om * x
            if col % 2 == 1:   # derivative of sqrt2 cos
                out[:, col] = -np.sqrt(2.0) * om * np.sin(phase)
            else:              # derivative of sqrt2 sin
                out[:, col] = np.sqrt(2.0) * om * np.cos(phase)
        return out
    if fam is Family.HALF_TRIG:
        a, b = spec.interval  # type: ignore[misc]
        w = b - a
        u = (x - a) / w
        amp = np.sqrt(2.0 / w)
        out = np.zeros((x.size, m))
        for col in range(1, m):
            j = (col + 1) // 2
            om = np.pi * j / w
            phase = np.pi * j * u
            if col % 2 == 1:   # derivative of sin column
                out[:, col] = amp * om * np.cos(phase)
            else:              # derivative of cos column
                out[:, col] = -amp * om * np.sin(phase)
        return out
    if fam is Family.LAGUERRE:
        vals = _eval_inside(spec, x)
        out = np.empty_like(vals)
        running = np.zeros(x.size)
        for j in range(m):
            out[:, j] = -vals[:, j] - 2.0 * running
            running += vals[:, j]
        return out
    if fam is Family.HERMITE:
        vals = _eval_inside(spec.with_m(m + 1), x)
        out = np.empty((x.size, m))
        for j in range(m):
            lower = np.sqrt(j) * vals[:, j - 1] if j >= 1 else 0.0
            out[:, j] = (lower - np.sqrt(j + 1) * vals[:, j + 1]) / np.sqrt(2.0)
        return out
    # LEGENDRE: derivative of element n expands over lower elements of the
    # opposite parity; keep running weighted sums per parity.
    vals = _eval_inside(spec, x)
    out = np.zeros((x.size, m))
    sum_even = np.zeros(x.size)   # sum of sqrt(4k+1) g_{2k}
    sum_odd = np.zeros(x.size)    # sum of sqrt(4k+3) g_{2k+1}
    for n in range(1, m):
        if n % 2 == 1:
            q = (n - 1) // 2
            sum_even += np.sqrt(4 * q + 1) * vals[:, 2 * q]
            out[:, n] = np.sqrt(4 * q + 3) * sum_even
        else:
            q = (n - 2) // 2
            sum_odd += np.sqrt(4 * q + 3) * vals[:, 2 * q + 1]
            out[:, n] = np.sqrt(4 * q + 5) * sum_odd
    return out


# ---------------------------------------------------------------------------
# Derivative link matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivativeLinkMatrix:
    """Matrix whose row j expands phi_j' in (phi_1, ..., phi_{m+p})."""

    entries: np.ndarray
    family: Family
    m: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def delta_matrix(spec: BasisSpec) -> DerivativeLinkMatrix:
    """Exact expansion of the first m derivatives in the first m+p elements."""
    m, p = spec.m, spec.p
    fam = spec.family
    delta = np.zeros((m, m + p))
    if fam is Family.TRIG_ODD:
        # first row zero, then antisymmetric 2x2 blocks per frequency
        for col in range(1, m):
            j = (col + 1) // 2
            om = 2.0 * np.pi * j
            if col % 2 == 1:   # cos row: cos' = -om * sin (next element)
                delta[col, col + 1] = -om
            else:              # sin row: sin' = om * cos (previous element)
                delta[col, col - 1] = om
    elif fam is Family.HALF_TRIG:
        a, b = spec.interval  # type: ignore[misc]
        w = b - a
        for col in range(1, m):
            j = (col + 1) // 2
            om = np.pi * j / w
            if col % 2 == 1:   # sin row: sin' = om * cos (next element)
                delta[col, col + 1] = om
            else:              # cos row: cos' = -om * sin (previous element)
                delta[col, col - 1] = -om
    elif fam is Family.LAGUERRE:
        for j in range(m):
            delta[j, j] = -1.0
            delta[j, :j] = -2.0
    elif fam is Family.HERMITE:
        for j in range(m):
            if j >= 1:
                delta[j, j - 1] = np.sqrt(j / 2.0)
            delta[j, j + 1] = -np.sqrt((j + 1) / 2.0)
    else:  # LEGENDRE, lower triangular with zero diagonal
        for n in range(1, m):
            if n % 2 == 1:
                q = (n - 1) // 2
                for k in range(q + 1):
                    delta[n, 2 * k] = np.sqrt(4 * q + 3) * np.sqrt(4 * k + 1)
            else:
                q = (n - 2) // 2
                for k in range(q + 1):
                    delta[n, 2 * k + 1] = np.sqrt(4 * q + 5) * np.sqrt(4 * k + 3)
    return DerivativeLinkMatrix(delta, fam, m)


# ---------------------------------------------------------------------------
# Sup-norm factors
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _hermite_sup_factor(m: int) -> float:
    """Numeric sup over x of sum_{j<m} h_j(x)^2 (grows like 0.45 sqrt(m))."""
    lim = math.sqrt(2 * m + 1) + 4.0
    grid = np.linspace(-lim, lim, 40001)
    spec = BasisSpec(Family.HERMITE, m)
    return float((_eval_inside(spec, grid) ** 2).sum(axis=1).max())


def l_factor(spec: BasisSpec, analytic: bool = False) -> float:
    """sup_x of sum_{j<=m} phi_j(x)^2.

    Exact closed forms where they exist; the Hermite value is a cached
    numeric supremum (pass analytic=True for the m/sqrt(pi) upper bound).
    """
    m = spec.m
    fam = spec.family
    if fam is Family.TRIG_ODD:
        return float(m)
    if fam is Family.HALF_TRIG:
        a, b = spec.interval  # type: ignore[misc]
        # complete pairs sum to a constant; a dangling sine adds up to 1 more
        return (m if m % 2 == 1 else m + 1) / (b - a)
    if fam is Family.LAGUERRE:
        return 2.0 * m
    if fam is Family.LEGENDRE:
        return m * m / 2.0
    if analytic:
        return m / math.sqrt(math.pi)
    return _hermite_sup_factor(m)


def l_prime_factor(spec: BasisSpec, probe_grid) -> float:
    """Grid supremum of sum_{j<=m} phi_j'(x)^2 (diagnostic lower bound)."""
    grid = np.asarray(probe_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("probe grid must be nonempty")
    lo, hi = spec.support
    grid = grid[(grid >= lo) & (grid <= hi)]
    if grid.size == 0:
        raise ValueError("probe grid lies outside the basis support")
    dv = eval_basis_derivative(spec, grid)
    return float((dv ** 2).sum(axis=1).max())
