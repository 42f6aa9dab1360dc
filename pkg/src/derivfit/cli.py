"""Command-line interface.

Subcommands: simulate (write a synthetic sample), fit (fixed-dimension
curve), select (data-driven / oracle / reuse dimension choice), bench
(Monte Carlo experiment from a config file), calibrate (selector constant
sweep).  Exit codes: 0 success, 1 usage, 2 data error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import dataio, simulation
from .basis import BasisSpec, Family, parse_family
from .design import Sample, build_design, stability_check, trim_interval
from .errors import (DataFormatError, EmptyCollectionError, QuadratureError,
                     SingularGramError)
from .estimators import fit_derivative_1, fit_derivative_2, truncate_fit
from .selection import GlConfig, default_m_grid, gl_select, oracle_select, reuse_select

USAGE_EXIT, DATA_EXIT, NUMERIC_EXIT = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _spec_for(family: Family, m: int, sample: Sample | None,
              interval: tuple[float, float] | None) -> BasisSpec:
    if family is Family.HALF_TRIG:
        if interval is None:
            if sample is None:
                raise DataFormatError("half-trig requires --interval or a sample")
            interval = trim_interval(sample)
        return BasisSpec(family, m, interval)
    return BasisSpec(family, m)


def _parse_interval(text: str | None) -> tuple[float, float] | None:
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 2:
        raise DataFormatError(f"--interval expects 'a,b', got {text!r}")
    return float(parts[0]), float(parts[1])


def _grid_for(args, sample: Sample) -> np.ndarray:
    lo = args.grid_lo if args.grid_lo is not None else None
    hi = args.grid_hi if args.grid_hi is not None else None
    if lo is None or hi is None:
        tlo, thi = trim_interval(sample)
        lo = tlo if lo is None else lo
        hi = thi if hi is None else hi
    return np.linspace(lo, hi, args.grid_points)


def _cmd_simulate(args) -> int:
    fn = simulation.TEST_FUNCTIONS[args.function]
    rng = simulation.rng_for(args.seed, 0, 0)
    sample = simulation.generate_sample(fn, args.n, args.sigma, rng)
    dataio.save_sample(sample, args.out)
    print(f"wrote {args.n} observations of {args.function} "
          f"(sigma={args.sigma}) to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    sample = dataio.load_csv(args.data)
    family = parse_family(args.family)
    spec = _spec_for(family, args.m, sample, _parse_interval(args.interval))
    fit = (fit_derivative_1 if args.strategy == 1 else fit_derivative_2)(sample, spec)
    if args.truncate:
        ext_design = build_design(sample, spec.extended())
        fit = truncate_fit(fit, stability_check(ext_design, sample.n))
    grid = _grid_for(args, sample)
    dataio.emit_curve(fit, grid, args.out)
    status = " (truncated to zero)" if fit.truncated_to_zero else ""
    print(f"strategy-{args.strategy} derivative fit at m={args.m}{status} -> {args.out}")
    return 0


def _cmd_select(args) -> int:
    sample = dataio.load_csv(args.data)
    family = parse_family(args.family)
    interval = _parse_interval(args.interval)
    m_grid = default_m_grid(family, sample.n, args.m_max)
    if args.mode == "gl":
        sigma2 = "estimate" if args.sigma2 is None else args.sigma2
        config = GlConfig(kappa0=args.kappa0, kappa1=args.kappa1, sigma2=sigma2,
                          d_constant=args.d_const, m_grid=m_grid)
        trace, fit = gl_select(sample, family, config, interval=interval)
        m_hat = trace.m_hat
        print(f"selected m = {m_hat} from members {trace.members}")
    elif args.mode == "reuse":
        m_hat, fit = reuse_select(sample, family, m_grid, sigma2=args.sigma2,
                                  d_constant=args.d_const, interval=interval)
        print(f"selected m = {m_hat} (dimension chosen for the regression fit)")
    else:  # oracle
        if args.function is None:
            raise DataFormatError("--mode oracle needs --function for the true target")
        fn = simulation.TEST_FUNCTIONS[args.function]
        eval_iv = trim_interval(sample)
        m_hat, err = oracle_select(sample, family, m_grid, fn.b_prime, eval_iv,
                                   interval=interval)
        spec = _spec_for(family, m_hat, sample, interval)
        fit = fit_derivative_1(sample, spec)
        print(f"oracle m = {m_hat} (squared L2 error {err:.6g})")
    if args.out:
        grid = _grid_for(args, sample)
        dataio.emit_curve(fit, grid, args.out)
        print(f"curve -> {args.out}")
    return 0


def _cmd_bench(args) -> int:
    config, out_from_file = dataio.read_config(args.config)
    out = args.out or out_from_file
    if out is None:
        raise DataFormatError("no output path (pass --out or set 'output =' in the config)")
    report = simulation.run_experiment(config)
    dataio.save_report(report, out)
    for cell, count in sorted(report.excluded.items()):
        print(f"note: {count} repetitions excluded (singular fits) in {cell}",
              file=sys.stderr)
    print(f"wrote {len(report.rows)} report rows to {out}")
    return 0


def _cmd_calibrate(args) -> int:
    kappas = [float(s) for s in args.kappas.split(",")]
    rows = simulation.calibrate_kappa(
        args.function, args.family, args.n, kappas, seeds=args.seeds,
        sigma=args.sigma, seed=args.seed, d_constant=args.d_const,
        m_max=args.m_max)
    if args.out:
        dataio.save_calibration(rows, args.out)
    for r in rows:
        print(f"kappa={r.kappa:<8g} median ratio={r.median_ratio:8.3f}  "
              f"mean={r.mean_ratio:8.3f}  q90={r.q90_ratio:8.3f}  "
              f"median dim={r.median_dim:.1f}")
    best = simulation.best_kappa(rows)
    print(f"best kappa by median ratio: {best}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="derivfit",
                     description="Orthogonal-series regression derivative estimation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="write a synthetic sample CSV")
    p.add_argument("--function", choices=sorted(simulation.TEST_FUNCTIONS), default="b1")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--sigma", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="fixed-dimension derivative fit, curve CSV out")
    p.add_argument("data", help="two-column x,y CSV")
    p.add_argument("--family", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--strategy", type=int, choices=(1, 2), default=1)
    p.add_argument("--truncate", action="store_true",
                   help="zero the fit when the conditioning gate fails")
    p.add_argument("--interval", help="half-trig rescaling interval 'a,b'")
    p.add_argument("--grid-lo", type=float)
    p.add_argument("--grid-hi", type=float)
    p.add_argument("--grid-points", type=int, default=512)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("select", help="choose the dimension from the data")
    p.add_argument("data")
    p.add_argument("--family", required=True)
    p.add_argument("--mode", choices=("oracle", "gl", "reuse"), default="gl")
    p.add_argument("--kappa0", type=float, default=1.0)
    p.add_argument("--kappa1", type=float, default=1.0)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--d-const", type=float)
    p.add_argument("--m-max", type=int)
    p.add_argument("--function", choices=sorted(simulation.TEST_FUNCTIONS),
                   help="true target for --mode oracle")
    p.add_argument("--interval", help="half-trig rescaling interval 'a,b'")
    p.add_argument("--grid-lo", type=float)
    p.add_argument("--grid-hi", type=float)
    p.add_argument("--grid-points", type=int, default=512)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("bench", help="run a Monte Carlo experiment from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("calibrate", help="sweep the selector constant on simulated data")
    p.add_argument("--function", choices=sorted(simulation.TEST_FUNCTIONS), default="b3")
    p.add_argument("--family", default="hermite")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--kappas", default="0.05,0.1,0.2,0.5,1,2,4")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--sigma", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--d-const", type=float)
    p.add_argument("--m-max", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_calibrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataFormatError, OSError) as exc:
        print(f"derivfit: data error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except (SingularGramError, EmptyCollectionError, QuadratureError) as exc:
        print(f"derivfit: numerical failure: {exc}", file=sys.stderr)
        return NUMERIC_EXIT
    except ValueError as exc:
        print(f"derivfit: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
