"""
Field, table and report files: CSV fields, JSON documents and plot data.
All writers go through a temporary file in the target directory and os.replace.
"""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, List, Optional, Union

import numpy as np
import pandas as pd

from ..core.exceptions import FieldFormatError
from ..core.grid import SPACING_RTOL, Field, Field1D, Field2D, Grid1D, Grid2D

logger = logging.getLogger(__name__)

# 17 significant digits reproduce every double exactly
FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def atomic_write_text(path: PathLike, text: str) -> Path:
    """
    Write text so that readers only ever see the old or the complete new file.

    Args:
        path: Destination file
        text: Full file contents

    Returns:
        The destination path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def json_text(data: Any) -> str:
    """Render a JSON document with sorted keys, as written by write_json."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(data: Any, path: PathLike) -> Path:
    return atomic_write_text(path, json_text(data))


def read_json(path: PathLike) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _uniform_axis(coords: np.ndarray, name: str) -> Grid1D:
    if coords.size < 2:
        raise FieldFormatError(f"axis {name} needs at least two samples")
    h = (coords[-1] - coords[0]) / (coords.size - 1)
    if not h > 0:
        raise FieldFormatError(f"axis {name} must be strictly increasing")
    if np.any(np.abs(np.diff(coords) - h) > SPACING_RTOL * h):
        raise FieldFormatError(f"axis {name} is not uniformly spaced")
    return Grid1D(x0=float(coords[0]), h=float(h), n=int(coords.size))


def load_field(path: PathLike) -> Field:
    """
    Read a field CSV with header x,value (1D) or x,y,value (2D, x outer, y inner).

    Moduli of the values are taken on load.
    """
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (OSError, ValueError) as e:
        raise FieldFormatError(f"cannot read field file {path}: {e}") from e

    columns = list(frame.columns)
    try:
        data = frame.to_numpy(dtype=float)
    except ValueError as e:
        raise FieldFormatError(f"{path} contains non-numeric entries") from e
    if not np.all(np.isfinite(data)):
        raise FieldFormatError(f"{path} contains missing or non-finite entries")

    if columns == ["x", "value"]:
        grid = _uniform_axis(data[:, 0], "x")
        return Field1D.from_samples(grid, data[:, 1])

    if columns == ["x", "y", "value"]:
        xs = np.unique(data[:, 0])
        ys = np.unique(data[:, 1])
        if data.shape[0] != xs.size * ys.size:
            raise FieldFormatError(f"{path} does not cover a full tensor grid")
        x_outer = np.array_equal(data[:, 0], np.repeat(xs, ys.size))
        if not x_outer or not np.array_equal(data[:, 1], np.tile(ys, xs.size)):
            raise FieldFormatError(f"{path} rows must run x outer, y inner")
        grid = Grid2D(_uniform_axis(xs, "x"), _uniform_axis(ys, "y"))
        return Field2D.from_samples(grid, data[:, 2].reshape(xs.size, ys.size))

    raise FieldFormatError(f"{path} header must be 'x,value' or 'x,y,value', got {columns}")


def field_frame(u: Field) -> pd.DataFrame:
    if isinstance(u, Field1D):
        return pd.DataFrame({"x": u.grid.centers, "value": u.values})
    xx, yy = u.grid.mesh()
    return pd.DataFrame({"x": xx.ravel(), "y": yy.ravel(), "value": u.values.ravel()})


def save_field(u: Field, path: PathLike) -> Path:
    """Write a field CSV that load_field reads back bit-exactly."""
    text = field_frame(u).to_csv(index=False, float_format=FLOAT_FORMAT)
    logger.debug(f"Writing {u.ndim}D field with {u.values.size} samples to {path}")
    return atomic_write_text(path, text)


def emit_plot_data(
    table: pd.DataFrame, path: PathLike, columns: Optional[List[str]] = None
) -> Path:
    """
    Write plot-ready CSV curves; an empty table gives a header-only file.

    Args:
        table: Data to write
        path: Destination CSV
        columns: Column subset and order (all columns when None)
    """
    if columns is not None:
        table = table.reindex(columns=columns)
    text = table.to_csv(index=False, float_format=FLOAT_FORMAT)
    return atomic_write_text(path, text)
