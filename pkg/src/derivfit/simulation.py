"""Simulation study harness: test functions, data generation, and the
Monte Carlo experiment runner.

Each experiment cell is a (test function, basis family, sample size)
triple.  A repetition draws standard-normal design points and Gaussian
noise, fits the whole dimension sweep, selects a dimension per the
configured mode for both the regression function and its derivative, and
scores squared L2 errors on the central quantile range of the design.
Reports aggregate means and standard deviations of 100*MSE and of the
selected dimensions.  Everything is a pure function of the config,
including the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import Family, parse_family
from .design import Sample, default_d_constant, trim_interval
from .errors import EmptyCollectionError, SingularGramError
from .selection import (DesignCache, GlConfig, _oracle_error_sweep,
                        collection_members, default_m_grid, estimate_sigma2,
                        eval_on_grid, gl_select, reuse_select)

EVAL_GRID_POINTS = 512


@dataclass(frozen=True)
class TestFunction:
    """A benchmark regression function with its analytic derivative."""

    id: str
    b: object
    b_prime: object


TEST_FUNCTIONS: dict[str, TestFunction] = {
    "b1": TestFunction("b1", lambda x: 2.0 * np.sin(np.pi * x),
                       lambda x: 2.0 * np.pi * np.cos(np.pi * x)),
    "b2": TestFunction("b2", lambda x: np.exp(-x * x / 2.0),
                       lambda x: -x * np.exp(-x * x / 2.0)),
    "b3": TestFunction("b3", lambda x: x * x, lambda x: 2.0 * x),
    "b4": TestFunction("b4", lambda x: 4.0 * x / (1.0 + x * x),
                       lambda x: 4.0 * (1.0 - x * x) / (1.0 + x * x) ** 2),
}


def rng_for(seed: int, cell_index: int, repetition: int) -> np.random.Generator:
    """Independent substream for one repetition of one cell."""
    return np.random.default_rng((seed, cell_index, repetition))


def generate_sample(fn: TestFunction, n: int, sigma: float,
                    rng: np.random.Generator) -> Sample:
    """X standard normal, independent Gaussian noise with sd sigma."""
    x = rng.standard_normal(n)
    eps = sigma * rng.standard_normal(n) if sigma > 0 else np.zeros(n)
    return Sample(x=x, y=fn.b(x) + eps)


@dataclass(frozen=True)
class ExperimentConfig:
    functions: tuple[str, ...] = ("b1", "b2", "b3", "b4")
    families: tuple[str, ...] = ("hermite", "half-trig")
    n_list: tuple[int, ...] = (250, 1000, 4000)
    sigma: float = 0.25
    repetitions: int = 100
    seed: int = 1
    m_max: int | None = None
    mode: str = "oracle"          # oracle | gl | reuse
    kappa0: float = 1.0
    kappa1: float = 1.0
    sigma2: float | str = "estimate"
    d_constant: float | None = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.mode not in ("oracle", "gl", "reuse"):
            raise ValueError(f"unknown selection mode {self.mode!r}")
        unknown = [f for f in self.functions if f not in TEST_FUNCTIONS]
        if unknown:
            raise ValueError(f"unknown test functions {unknown}")
        for fam in self.families:
            parse_family(fam)


@dataclass(frozen=True)
class ReportRow:
    function: str
    family: str
    n: int
    target: str                   # "b" or "b'"
    mse100_mean: float
    mse100_std: float
    dim_mean: float
    dim_std: float
    k: int


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[ReportRow, ...]
    excluded: dict[tuple[str, str, int], int]

    def row(self, function: str, family: str, n: int, target: str) -> ReportRow:
        for r in self.rows:
            if (r.function, r.family, r.n, r.target) == (function, family, n, target):
                return r
        raise KeyError((function, family, n, target))


def _run_repetition_oracle(cache: DesignCache, sample: Sample, fn: TestFunction,
                           m_grid, grid: np.ndarray):
    targets = {"regression": eval_on_grid(fn.b, grid),
               "derivative": eval_on_grid(fn.b_prime, grid)}
    errors = _oracle_error_sweep(cache, m_grid, sample.y, grid, targets)
    if not errors:
        raise SingularGramError("all dimensions singular")
    m_b = min(errors, key=lambda m: (errors[m]["regression"], m))
    m_bp = min(errors, key=lambda m: (errors[m]["derivative"], m))
    return (errors[m_b]["regression"], m_b), (errors[m_bp]["derivative"], m_bp)


def _selected_errors(cache: DesignCache, sample: Sample, fn: TestFunction,
                     m_b: int, m_bp: int, grid: np.ndarray):
    errors_b = _oracle_error_sweep(cache, [m_b], sample.y, grid,
                                   {"regression": eval_on_grid(fn.b, grid)})
    errors_bp = _oracle_error_sweep(cache, [m_bp], sample.y, grid,
                                    {"derivative": eval_on_grid(fn.b_prime, grid)})
    return ((errors_b[m_b]["regression"], m_b),
            (errors_bp[m_bp]["derivative"], m_bp))


def _run_repetition(config: ExperimentConfig, fn: TestFunction, family: Family,
                    n: int, rng: np.random.Generator):
    """One draw: returns ((err_b, dim_b), (err_bp, dim_bp))."""
    sample = generate_sample(fn, n, config.sigma, rng)
    lo, hi = trim_interval(sample)
    grid = np.linspace(lo, hi, EVAL_GRID_POINTS)
    m_grid = default_m_grid(family, n, config.m_max)
    # the rescalable family follows the trimmed range of each draw
    cache = DesignCache(sample, family, max(m_grid), (lo, hi))

    if config.mode == "oracle":
        return _run_repetition_oracle(cache, sample, fn, m_grid, grid)

    d_const = (config.d_constant if config.d_constant is not None
               else default_d_constant(sample.x, n))
    if config.mode == "gl":
        gl_conf = GlConfig(kappa0=config.kappa0, kappa1=config.kappa1,
                           sigma2=config.sigma2, d_constant=d_const,
                           m_grid=tuple(m_grid))
        trace, _fit = gl_select(sample, family, gl_conf, interval=cache.interval)
        m_bp = trace.m_hat
        # regression dimension by the penalized contrast over the same members
        m_b, _ = reuse_select(sample, family, m_grid,
                              sigma2=None if config.sigma2 == "estimate"
                              else float(config.sigma2),
                              d_constant=d_const, interval=cache.interval)
    else:  # reuse
        m_b, _fit = reuse_select(sample, family, m_grid,
                                 sigma2=None if config.sigma2 == "estimate"
                                 else float(config.sigma2),
                                 d_constant=d_const, interval=cache.interval)
        m_bp = m_b
    return _selected_errors(cache, sample, fn, m_b, m_bp, grid)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run every cell of the config and aggregate.

    Repetitions where no dimension admits a numerically invertible Gram
    are excluded from the aggregates and counted per cell.
    """
    rows: list[ReportRow] = []
    excluded: dict[tuple[str, str, int], int] = {}
    cell_index = 0
    for fn_id in config.functions:
        fn = TEST_FUNCTIONS[fn_id]
        for family_name in config.families:
            family = parse_family(family_name)
            for n in config.n_list:
                errs_b, dims_b, errs_bp, dims_bp = [], [], [], []
                failures = 0
                for rep in range(config.repetitions):
                    rng = rng_for(config.seed, cell_index, rep)
                    try:
                        (eb, mb), (ebp, mbp) = _run_repetition(
                            config, fn, family, n, rng)
                    except (SingularGramError, EmptyCollectionError):
                        failures += 1
                        continue
                    errs_b.append(eb)
                    dims_b.append(mb)
                    errs_bp.append(ebp)
                    dims_bp.append(mbp)
                if failures:
                    excluded[(fn_id, family_name, n)] = failures
                k = len(errs_b)
                for target, errs, dims in (("b", errs_b, dims_b),
                                           ("b'", errs_bp, dims_bp)):
                    e = np.asarray(errs)
                    d = np.asarray(dims, dtype=float)
                    rows.append(ReportRow(
                        function=fn_id, family=family_name, n=n, target=target,
                        mse100_mean=float(100.0 * e.mean()) if k else math.nan,
                        mse100_std=float(100.0 * e.std()) if k else math.nan,
                        dim_mean=float(d.mean()) if k else math.nan,
                        dim_std=float(d.std()) if k else math.nan,
                        k=k))
                cell_index += 1
    return ExperimentReport(rows=tuple(rows), excluded=excluded)


# ---------------------------------------------------------------------------
# Selector calibration sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CalibrationRow:
    kappa: float
    median_ratio: float
    mean_ratio: float
    q90_ratio: float
    median_dim: float


def calibrate_kappa(function: str, family_name: str, n: int,
                    kappas, seeds: int = 20, sigma: float = 0.25,
                    seed: int = 1, d_constant: float | None = None,
                    m_max: int | None = None) -> list[CalibrationRow]:
    """Sweep the selector constant (kappa0 = kappa1 = kappa) on simulated
    data and report the risk ratio of the selected fit to the full-sweep
    oracle, per kappa."""
    fn = TEST_FUNCTIONS[function]
    family = parse_family(family_name)
    kappas = [float(k) for k in kappas]
    ratios: dict[float, list[float]] = {k: [] for k in kappas}
    dims: dict[float, list[int]] = {k: [] for k in kappas}
    for i in range(seeds):
        rng = rng_for(seed, 9000 + i, 0)
        sample = generate_sample(fn, n, sigma, rng)
        lo, hi = trim_interval(sample)
        grid = np.linspace(lo, hi, EVAL_GRID_POINTS)
        m_grid = default_m_grid(family, n, m_max)
        cache = DesignCache(sample, family, max(m_grid), (lo, hi))
        target = {"derivative": eval_on_grid(fn.b_prime, grid)}
        errors = _oracle_error_sweep(cache, m_grid, sample.y, grid, target)
        if not errors:
            continue
        oracle_err = min(e["derivative"] for e in errors.values())
        d_const = (d_constant if d_constant is not None
                   else default_d_constant(sample.x, n))
        try:
            sigma2_hat = estimate_sigma2(sample, family, m_grid, d_const,
                                         cache.interval)
        except (EmptyCollectionError, ValueError):
            continue
        for kappa in kappas:
            conf = GlConfig(kappa0=kappa, kappa1=kappa, sigma2=sigma2_hat,
                            d_constant=d_const, m_grid=tuple(m_grid))
            try:
                trace, _ = gl_select(sample, family, conf, interval=cache.interval)
            except EmptyCollectionError:
                continue
            ratios[kappa].append(errors[trace.m_hat]["derivative"]
                                 / max(oracle_err, 1e-300))
            dims[kappa].append(trace.m_hat)
    out = []
    for kappa in kappas:
        r = np.asarray(ratios[kappa])
        if r.size == 0:
            out.append(CalibrationRow(kappa, math.nan, math.nan, math.nan, math.nan))
            continue
        out.append(CalibrationRow(
            kappa=kappa,
            median_ratio=float(np.median(r)),
            mean_ratio=float(r.mean()),
            q90_ratio=float(np.quantile(r, 0.9)),
            median_dim=float(np.median(dims[kappa]))))
    return out


def best_kappa(rows: list[CalibrationRow]) -> float:
    """The swept value with the smallest median risk ratio."""
    valid = [r for r in rows if not math.isnan(r.median_ratio)]
    if not valid:
        raise EmptyCollectionError("calibration produced no usable runs")
    return min(valid, key=lambda r: (r.median_ratio, r.kappa)).kappa
