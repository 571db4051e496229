"""
State files (JSON) and tabular exports (CSV).

State file layout::

    {"n_total": N,
     "bipartition": "spatial" | "energy" | [[[re, im], [re, im]], [[re, im], [re, im]]],
     "entries": (N+1) x (N+1) nested [re, im] pairs}

Floats are written with ``repr`` precision so a save/load round trip is
bit-exact. All writers replace the target atomically.
"""
from __future__ import annotations

import csv
import io as _io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvariantError, TwoModeError
from .fock import FockDensityMatrix, ModeBipartition

__all__ = [
    "StateFileError",
    "state_to_dict",
    "state_from_dict",
    "save_state",
    "load_state",
    "atomic_write_text",
    "csv_text",
    "trajectory_rows",
    "TRAJECTORY_COLUMNS",
    "SUMMARY_COLUMNS",
    "SWEEP_COLUMNS",
]

TRAJECTORY_COLUMNS = ("t", "k", "l", "re", "im")
SUMMARY_COLUMNS = ("t", "negativity_spatial", "negativity_energy", "bound")
SWEEP_COLUMNS = (
    "t",
    "xi_w_squared",
    "delta_theta_squared",
    "bound_lhs",
    "n2_x",
    "n2_y",
    "n2_z",
    "n3_x",
    "n3_y",
    "n3_z",
)


class StateFileError(InvariantError):
    """State file is malformed or describes an invalid density matrix."""


def _pairs(matrix: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def _complex_matrix(obj, shape, what) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{what}: expected nested [re, im] pairs ({exc})") from None
    if arr.shape != shape + (2,):
        raise StateFileError(f"{what}: expected shape {shape} of [re, im] pairs, got {arr.shape[:-1] or arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(rho: FockDensityMatrix) -> dict:
    bp = rho.bipartition
    if bp.name in ("spatial", "energy"):
        bp_field = bp.name
    else:
        bp_field = _pairs(bp.mixing)
    return {"n_total": rho.n_total, "bipartition": bp_field, "entries": _pairs(rho.entries)}


def state_from_dict(data) -> FockDensityMatrix:
    if not isinstance(data, dict):
        raise StateFileError("state file must contain a JSON object")
    missing = {"n_total", "bipartition", "entries"} - set(data)
    if missing:
        raise StateFileError(f"state file missing keys: {sorted(missing)}")
    n = data["n_total"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise StateFileError(f"n_total must be an integer >= 1, got {n!r}")
    bp_field = data["bipartition"]
    try:
        if isinstance(bp_field, str):
            bp = ModeBipartition.from_name(bp_field)
        else:
            bp = ModeBipartition(_complex_matrix(bp_field, (2, 2), "bipartition"))
    except StateFileError:
        raise
    except TwoModeError as exc:
        raise StateFileError(f"bipartition: {exc}") from None
    entries = _complex_matrix(data["entries"], (n + 1, n + 1), "entries")
    try:
        return FockDensityMatrix(n, entries, bp)
    except InvariantError as exc:
        raise StateFileError(f"entries: {exc}") from None


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_state(rho: FockDensityMatrix, path) -> None:
    atomic_write_text(path, json.dumps(state_to_dict(rho), indent=1) + "\n")


def load_state(path) -> FockDensityMatrix:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: not valid JSON ({exc})") from None
    return state_from_dict(data)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def trajectory_rows(times, states) -> list[tuple]:
    rows = []
    for t, rho in zip(times, states):
        dim = rho.dim
        for k in range(dim):
            for l in range(dim):
                z = rho.entries[k, l]
                rows.append((float(t), k, l, float(z.real), float(z.imag)))
    return rows
