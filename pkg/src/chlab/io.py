"""Run artifacts: deterministic CSV tables and JSON summaries.

Every number is written with ``repr`` (shortest exact round-trip), newlines
are always ``\\n``, and JSON keys are sorted — so two runs of the same
effective configuration produce byte-identical files, and a diff between
artifact directories is a meaningful regression signal.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from .solver import RunLog

__all__ = [
    "SCHEMA_VERSION",
    "RUN_CSV",
    "PROFILE_CSV",
    "SNAPSHOT_CSV",
    "SUMMARY_JSON",
    "PROFILE_HEADER",
    "format_number",
    "write_run_csv",
    "write_profile_csv",
    "write_snapshot_csv",
    "write_summary",
    "read_csv",
    "read_summary",
]

#: Version of the summary-JSON layout; bump on any backwards-incompatible
#: change to field names or meanings.
SCHEMA_VERSION = 1

RUN_CSV = "run.csv"
PROFILE_CSV = "profile.csv"
SNAPSHOT_CSV = "snapshots.csv"
SUMMARY_JSON = "summary.json"

PROFILE_HEADER = ("t", "Phi", "Psi", "c1", "c2", "max_eps_plus",
                  "max_eps_minus")


def format_number(value: float) -> str:
    """Shortest decimal string that round-trips to the same float."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def _write_table(path: Path, header: Sequence[str],
                 rows: Iterable[Sequence[float]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) for v in row])


def write_run_csv(path, log: RunLog) -> None:
    """Write the observation log: t,dt,min_slope,u_inf,ux_inf,energy,mass
    plus one W_<i> column per tracked weight."""
    rows = ((r.t, r.dt, r.min_slope, r.u_inf, r.ux_inf, r.energy, r.mass)
            + tuple(r.extra) for r in log.rows)
    _write_table(Path(path), log.header, rows)


def write_profile_csv(path, rows: Iterable[Sequence[float]]) -> None:
    """Write per-snapshot profile functionals:
    t,Phi,Psi,c1,c2,max_eps_plus,max_eps_minus."""
    _write_table(Path(path), PROFILE_HEADER, rows)


def write_snapshot_csv(path, grid, u_initial, u_final) -> None:
    """Write initial and terminal solution samples on the run grid."""
    rows = zip(grid.x, np.asarray(u_initial, float), np.asarray(u_final, float))
    _write_table(Path(path), ("x", "u_initial", "u_final"), rows)


def write_summary(path, summary: Mapping) -> None:
    """Write the run summary as stable, human-diffable JSON."""
    text = json.dumps(_jsonable(summary), indent=2, sort_keys=True,
                      allow_nan=False)
    Path(path).write_text(text + "\n")


def _jsonable(value):
    """Recursively coerce numpy scalars and non-finite floats for JSON."""
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def read_csv(path) -> Tuple[List[str], np.ndarray]:
    """Read a CSV table back: (header, data) with data shaped (rows, cols)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader], float)
    return header, data


def read_summary(path) -> dict:
    return json.loads(Path(path).read_text())
