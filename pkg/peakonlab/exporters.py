"""
Exporters - CSV / JSON / JSONL artifacts with a versioned schema line

Every float is written with 17 significant digits so identical runs give identical bytes.
"""
import json
import math
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

import numpy as np
from pydantic import BaseModel

from peakonlab.breaking import blowup_quantity_array
from peakonlab.kernels import derivative_array, momentum_array
from peakonlab.state import (
    CharacteristicTrace, DiagnosticsSeries, Event, FieldTrajectory, PeakonTrajectory, ReductionRow,
)


SCHEMA_VERSION = 1


def fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return format(float(v), ".17g")


def _header(kind: str) -> str:
    return f"# peakonlab-schema: {kind}/{SCHEMA_VERSION}\n"


def write_csv(path: Union[str, Path], kind: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(_header(kind))
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(fmt(v) for v in row) + "\n")
    return str(path)


def _clean(obj: Any) -> Any:
    """JSON-safe copy: 17-digit floats, non-finite floats as strings"""
    if isinstance(obj, BaseModel):
        return _clean(obj.model_dump(mode="python"))
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return str(v)
        return float(format(v, ".17g"))
    return obj


def to_json(obj: Any, kind: str) -> str:
    payload = {"schema": f"{kind}/{SCHEMA_VERSION}", "data": _clean(obj)}
    return json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def write_json(path: Union[str, Path], obj: Any, kind: str) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(to_json(obj, kind))
    return str(path)


def event_line(event: Event) -> str:
    return json.dumps(_clean(event), ensure_ascii=False, sort_keys=True)


def write_events(path: Union[str, Path], events: List[Event]) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for event in events:
            f.write(event_line(event) + "\n")
    return str(path)


# ============================================================
# Result-specific writers
# ============================================================

def write_peakon_trajectory(path, traj: PeakonTrajectory) -> str:
    """Columns t, p_1..p_N, q_1..q_N (circle positions renormalized to [0, 1))"""
    n = traj.n_peakons
    columns = ["t"] + [f"p_{i + 1}" for i in range(n)] + [f"q_{i + 1}" for i in range(n)]
    rows = ([t, *p, *q] for t, p, q in zip(traj.t, traj.p, traj.q))
    return write_csv(path, "peakon-trajectory", columns, rows)


def write_field_snapshots(path, traj: FieldTrajectory) -> str:
    """Long format: one row per (snapshot, grid point) with x, u, u_x, m, M"""
    grid = traj.grid
    x = grid.x

    def rows():
        for t, u in zip(traj.times, traj.snapshots):
            ux = derivative_array(u, grid)
            m = momentum_array(u, grid)
            M = blowup_quantity_array(u, ux, m, traj.params)
            for j in range(grid.n):
                yield (t, x[j], u[j], ux[j], m[j], M[j])

    return write_csv(path, "field-snapshots", ["t", "x", "u", "u_x", "m", "M"], rows())


DIAGNOSTIC_COLUMNS = [
    "t", "h1", "m_min", "m_max", "m_sup", "M_min", "M_max", "ux_sup",
    "u_plus_ux_min", "u_minus_ux_min", "criterion_integral", "m_bound_breach", "positivity_breach",
    "m_tail",
]


def write_diagnostics(path, series: DiagnosticsSeries) -> str:
    cols = [getattr(series, name) for name in DIAGNOSTIC_COLUMNS]
    return write_csv(path, "diagnostics", DIAGNOSTIC_COLUMNS, zip(*cols))


def write_traces(path, traces: List[CharacteristicTrace]) -> str:
    columns = ["seed", "t", "q", "q_x", "q_x_direct", "u", "u_x", "m", "m_transported", "M"]

    def rows():
        for tr in traces:
            for vals in zip(tr.t, tr.q, tr.q_x, tr.q_x_direct, tr.u, tr.u_x, tr.m, tr.m_transported, tr.M):
                yield (tr.seed, *vals)

    return write_csv(path, "characteristic-traces", columns, rows())


def write_reduction_table(path, rows: List[ReductionRow]) -> str:
    columns = ["name", "domain", "k1", "k2", "k3", "c", "closed_form", "computed", "max_error", "exact"]

    def fmt_list(vals):
        return ";".join(fmt(v) for v in vals)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(_header("reduction-table"))
        f.write(",".join(columns) + "\n")
        for r in rows:
            f.write(",".join([
                r.name, r.domain, *(fmt(k) for k in r.k), fmt(r.c),
                fmt_list(r.closed_form), fmt_list(r.computed), fmt(r.max_error), fmt(r.exact),
            ]) + "\n")
    return str(path)


def read_csv(path: Union[str, Path]):
    """(schema, columns, float rows) of a CSV written by write_csv"""
    with open(path, "r", encoding="utf-8") as f:
        schema = f.readline().split(":", 1)[1].strip()
        columns = f.readline().strip().split(",")
        rows = [[float(v) for v in line.strip().split(",")] for line in f if line.strip()]
    return schema, columns, rows
