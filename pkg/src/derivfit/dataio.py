"""CSV input/output and the flat key=value config format.

Samples are two-column CSV (optional "x,y" header); floats are written
with 17 significant digits so a save/load round trip is exact.  Report
and curve writers use a fixed column order so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .design import Sample
from .errors import DataFormatError
from .estimators import DerivativeFit, evaluate_fit
from .simulation import CalibrationRow, ExperimentConfig, ExperimentReport

REPORT_COLUMNS = ("function", "family", "n", "target", "mse100_mean",
                  "mse100_std", "dim_mean", "dim_std", "K")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def load_csv(path) -> Sample:
    """Read a two-column numeric CSV; header row "x,y" is optional."""
    lines = Path(path).read_text().splitlines()
    xs: list[float] = []
    ys: list[float] = []
    start = 0
    header: list[str] | None = None
    for i, line in enumerate(lines):
        if line.strip():
            first = [c.strip() for c in line.split(",")]
            if not _is_numeric_row(first):
                header = first
                start = i + 1
            break
    else:
        raise DataFormatError("empty file", line=0)
    if header is not None and len(header) > 2:
        raise DataFormatError(
            f"expected two columns (x,y); extra column {header[2]!r}", line=start)
    seen = False
    for i in range(start, len(lines)):
        line = lines[i].strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 2:
            if len(cells) > 2:
                name = header[2] if header and len(header) > 2 else f"column {len(cells)}"
                raise DataFormatError(f"expected two columns, got {len(cells)} "
                                      f"(extra {name})", line=i + 1)
            raise DataFormatError(f"expected two columns, got {len(cells)}", line=i + 1)
        try:
            x, y = float(cells[0]), float(cells[1])
        except ValueError:
            raise DataFormatError(f"non-numeric value in row: {line!r}", line=i + 1) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise DataFormatError("non-finite value rejected", line=i + 1)
        xs.append(x)
        ys.append(y)
        seen = True
    if not seen:
        raise DataFormatError("no data rows", line=0 if not lines else len(lines))
    return Sample(x=np.asarray(xs), y=np.asarray(ys))


def _is_numeric_row(cells: list[str]) -> bool:
    try:
        for c in cells:
            float(c)
    except ValueError:
        return False
    return True


def save_sample(sample: Sample, path) -> None:
    rows = ["x,y"]
    rows += [f"{_fmt(x)},{_fmt(y)}" for x, y in zip(sample.x, sample.y)]
    Path(path).write_text("\n".join(rows) + "\n")


def save_report(report: ExperimentReport, path) -> None:
    rows = [",".join(REPORT_COLUMNS)]
    for r in report.rows:
        rows.append(",".join([
            r.function, r.family, str(r.n), r.target,
            _fmt(r.mse100_mean), _fmt(r.mse100_std),
            _fmt(r.dim_mean), _fmt(r.dim_std), str(r.k)]))
    Path(path).write_text("\n".join(rows) + "\n")


def save_calibration(rows: list[CalibrationRow], path) -> None:
    out = ["kappa,median_ratio,mean_ratio,q90_ratio,median_dim"]
    for r in rows:
        out.append(",".join([_fmt(r.kappa), _fmt(r.median_ratio),
                             _fmt(r.mean_ratio), _fmt(r.q90_ratio),
                             _fmt(r.median_dim)]))
    Path(path).write_text("\n".join(out) + "\n")


def emit_curve(fit, grid, path) -> None:
    """Write (x, estimate) pairs for plotting.

    fit may be a DerivativeFit, any callable evaluated on the grid, or a
    precomputed value array matching the grid.
    """
    if isinstance(fit, DerivativeFit):
        values = evaluate_fit(fit, grid)
    elif callable(fit):
        values = fit(grid)
    else:
        values = np.asarray(fit, dtype=float)
    rows = ["x,estimate"]
    rows += [f"{_fmt(x)},{_fmt(v)}" for x, v in zip(grid, values)]
    Path(path).write_text("\n".join(rows) + "\n")


# ---------------------------------------------------------------------------
# Config files: one "key = value" per line, lists comma-separated
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {"functions", "families", "n", "sigma", "repetitions", "seed",
                "m_max", "mode", "kappa0", "kappa1", "sigma2", "d_constant",
                "output"}


def parse_config_text(text: str) -> dict:
    values: dict[str, str] = {}
    for i, raw in enumerate(text.splitlines()):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataFormatError(f"expected 'key = value', got {raw!r}", line=i + 1)
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise DataFormatError(f"unknown config key {key!r}", line=i + 1)
        values[key] = val.strip()
    return values


def read_config(path) -> tuple[ExperimentConfig, str | None]:
    """Parse an experiment config file.  Returns (config, output path)."""
    values = parse_config_text(Path(path).read_text())
    kwargs: dict = {}
    try:
        if "functions" in values:
            kwargs["functions"] = tuple(s.strip() for s in values["functions"].split(","))
        if "families" in values:
            kwargs["families"] = tuple(s.strip() for s in values["families"].split(","))
        if "n" in values:
            kwargs["n_list"] = tuple(int(s) for s in values["n"].split(","))
        if "sigma" in values:
            kwargs["sigma"] = float(values["sigma"])
        if "repetitions" in values:
            kwargs["repetitions"] = int(values["repetitions"])
        if "seed" in values:
            kwargs["seed"] = int(values["seed"])
        if "m_max" in values:
            kwargs["m_max"] = int(values["m_max"])
        if "mode" in values:
            kwargs["mode"] = values["mode"]
        if "kappa0" in values:
            kwargs["kappa0"] = float(values["kappa0"])
        if "kappa1" in values:
            kwargs["kappa1"] = float(values["kappa1"])
        if "sigma2" in values:
            s = values["sigma2"]
            kwargs["sigma2"] = s if s == "estimate" else float(s)
        if "d_constant" in values:
            kwargs["d_constant"] = float(values["d_constant"])
        config = ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise DataFormatError(f"bad config value: {exc}") from exc
    return config, values.get("output")
