"""Field and report serialization: CSV (lossless) and PGM images.

Solution CSV layout::

    # pdefix-field v1 dim=<d> grid=<g1,..> components=<N>
    x1,..,xd,u0,..,u{N-1}
    <rows in row-major grid order, 17 significant digits>

Values print with 17 significant digits, so reading a file back reproduces
the written doubles bit-exactly.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import PdefixError
from .fields import SpectralField
from .fixedpoint import ConvergenceTrace


def _fmt(v: float) -> str:
    return f"{v:.16e}"


def write_field_csv(field: SpectralField, path) -> None:
    path = Path(path)
    grid = field.grid
    n = field.n_components
    header = (
        f"# pdefix-field v1 dim={field.dim} "
        f"grid={','.join(str(g) for g in grid)} components={n}"
    )
    columns = [f"x{i + 1}" for i in range(field.dim)] + [f"u{k}" for k in range(n)]
    coords = np.meshgrid(
        *[np.arange(g) * (L / g) for g, L in zip(grid, field.domain)], indexing="ij"
    )
    flat_coords = [c.reshape(-1) for c in coords]
    flat_values = [field.physical[k].reshape(-1) for k in range(n)]
    lines = [header, ",".join(columns)]
    for i in range(int(np.prod(grid))):
        row = [_fmt(c[i]) for c in flat_coords] + [_fmt(v[i]) for v in flat_values]
        lines.append(",".join(row))
    _write_text(path, "\n".join(lines) + "\n")


_HEADER = re.compile(
    r"#\s*pdefix-field v1 dim=(\d+) grid=([\d,]+) components=(\d+)\s*$"
)


def read_field_csv(path) -> tuple[tuple[int, ...], np.ndarray]:
    """Return (grid, values) with values shaped (components, *grid)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PdefixError(f"cannot read field file {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise PdefixError(f"field file {path} is empty")
    m = _HEADER.match(lines[0])
    if m is None:
        raise PdefixError(f"field file {path} lacks the pdefix-field v1 header")
    dim = int(m.group(1))
    grid = tuple(int(g) for g in m.group(2).split(","))
    n = int(m.group(3))
    if len(grid) != dim:
        raise PdefixError(f"field file {path}: header dim/grid mismatch")
    expected_rows = int(np.prod(grid))
    data_lines = lines[2:]
    if len(data_lines) != expected_rows:
        raise PdefixError(
            f"field file {path}: expected {expected_rows} data rows, found {len(data_lines)}"
        )
    table = np.array([[float(cell) for cell in ln.split(",")] for ln in data_lines])
    if table.shape[1] != dim + n:
        raise PdefixError(f"field file {path}: expected {dim + n} columns")
    values = table[:, dim:].T.reshape(n, *grid)
    return grid, np.ascontiguousarray(values)


def write_report_csv(trace: ConvergenceTrace, path) -> None:
    lines = ["iter,update_norm,residual_norm,contraction_estimate"]
    for rec in trace:
        residual = _fmt(rec.residual_norm) if rec.residual_norm is not None else ""
        ratio = _fmt(rec.contraction_ratio) if rec.contraction_ratio is not None else ""
        lines.append(f"{rec.iteration},{_fmt(rec.update_norm)},{residual},{ratio}")
    _write_text(Path(path), "\n".join(lines) + "\n")


def format_residual_csv(report) -> str:
    lines = ["equation,linf_residual,l2_residual"]
    for k, (linf, l2) in enumerate(zip(report.linf, report.l2)):
        lines.append(f"{k},{_fmt(linf)},{_fmt(l2)}")
    lines.append(f"overall,{_fmt(report.overall)},{_fmt(max(report.l2))}")
    return "\n".join(lines) + "\n"


PGM_MAX = 65535
PGM_MID = 32768
DEGENERATE_RANGE = 1e-300


def write_pgm(values: np.ndarray, path) -> None:
    """Write a 2D array as an ASCII (P2) PGM, min -> 0 and max -> 65535."""
    if values.ndim != 2:
        raise ValueError("PGM output needs a 2D slice")
    lo = float(values.min())
    hi = float(values.max())
    if hi - lo < DEGENERATE_RANGE:
        pixels = np.full(values.shape, PGM_MID, dtype=np.int64)
    else:
        pixels = np.rint((values - lo) / (hi - lo) * PGM_MAX).astype(np.int64)
    lines = ["P2", f"{values.shape[1]} {values.shape[0]}", str(PGM_MAX)]
    for row in pixels:
        lines.append(" ".join(str(int(p)) for p in row))
    _write_text(Path(path), "\n".join(lines) + "\n")


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise PdefixError(f"cannot write {path}: {exc}") from exc
