"""
Utilities: path helpers, power-law fits, deterministic JSON/CSV writers.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from src.constants import CSV_FLOAT_FORMAT
from src.errors import FitError


def project_root() -> Path:
    """Project root (parent of src)."""
    return Path(__file__).resolve().parent.parent


def config_path(*parts: str) -> Path:
    """Path under config/ from project root."""
    return project_root() / "config" / Path(*parts)


def outputs_path(*parts: str, directory: str | Path = "outputs") -> Path:
    """Path under the outputs directory; a relative ``directory`` is taken from project root."""
    return from_project_root(directory) / Path(*parts)


def from_project_root(path: str | Path) -> Path:
    """Absolute paths pass through; relative ones are anchored at project root, not the CWD."""
    path = Path(path)
    return path if path.is_absolute() else project_root() / path


def fit_power_law(x: np.ndarray, y: np.ndarray, min_decades: float = 2.0) -> tuple[float, float, float]:
    """
    Least-squares fit of log y = p log x + log A.

    Returns
    -------
    (p, A, rms_residual)

    Raises
    ------
    FitError
        Fewer than two points, non-positive values, or x spanning
        less than ``min_decades`` decades.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise FitError(f"need at least two (x, y) points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise FitError("power-law fit needs strictly positive finite values (zero spread?)")
    span = math.log10(x.max() / x.min())
    if span < min_decades - 1e-9:
        raise FitError(f"checkpoints span {span:.2f} decades, need >= {min_decades}")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return float(slope), float(math.exp(intercept)), residual


# ---------------------------------------------------------------------------
# Deterministic output
# ---------------------------------------------------------------------------


def _clean(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays and map NaN/inf to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _emit(value: Any, level: int) -> str:
    if isinstance(value, dict):
        if not value:
            return "{}"
        pad = "  " * (level + 1)
        items = [f"{pad}{json.dumps(k)}: {_emit(value[k], level + 1)}" for k in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        pad = "  " * (level + 1)
        items = [f"{pad}{_emit(v, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + "  " * level + "]"
    if isinstance(value, float):
        return CSV_FLOAT_FORMAT % value
    return json.dumps(value)


def canonical_json(data: Any) -> str:
    """Sorted-key JSON, indent 2; floats carry 17 significant digits like the CSV files."""
    return _emit(_clean(data), 0) + "\n"


def config_hash(data: Any) -> str:
    """sha256 of the compact canonical JSON of a config."""
    compact = json.dumps(_clean(data), sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(compact.encode("utf-8")).hexdigest()


def write_json(data: Any, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(data), encoding="utf-8")
    return path


def write_csv(df: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path
