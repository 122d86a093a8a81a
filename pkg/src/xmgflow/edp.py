"""Array placement and energy-delay estimation for scheduled designs.

Physical row space: row 0 is the shared constant-zero row readable from any
array; array ``a`` owns rows ``a*rows_per_array + 1 .. (a+1)*rows_per_array``.
A design whose primary inputs and peak footprint fit one array is placed
without copies; otherwise values are packed in row order across arrays and
every operation reading a foreign-array row gets a COPY staged into its
destination array first.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

COST_CONFIG_ENV = "XMGFLOW_COST_CONFIG"

_COST_FIELDS = ("energy_op", "energy_copy", "delay_op", "delay_copy", "rows_per_array")


class PlacementError(ValueError):
    pass


@dataclass(frozen=True)
class CostModel:
    energy_op: float = 1.0
    energy_copy: float = 10.0
    delay_op: float = 1.0
    delay_copy: float = 1.0
    rows_per_array: int = 256

    def __post_init__(self):
        if not self.energy_copy > self.energy_op:
            raise ValueError("energy_copy must exceed energy_op")
        if self.rows_per_array < 1:
            raise ValueError("rows_per_array must be positive")


def load_cost_model(path=None) -> CostModel:
    """Read a cost model from a JSON config; falls back to defaults.

    Resolution order: explicit ``path``, the XMGFLOW_COST_CONFIG environment
    variable, then built-in defaults.  The file holds up to five numeric
    fields named after the CostModel attributes; unknown keys are rejected.
    """
    if path is None:
        path = os.environ.get(COST_CONFIG_ENV)
    if path is None:
        return CostModel()
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("cost config must be a JSON object")
    bad = sorted(set(raw) - set(_COST_FIELDS))
    if bad:
        raise ValueError(f"unknown cost config fields: {', '.join(bad)}")
    kwargs = {}
    for k, v in raw.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ValueError(f"cost config field {k!r} must be numeric")
        kwargs[k] = int(v) if k == "rows_per_array" else float(v)
    return CostModel(**kwargs)


def save_cost_model(model: CostModel, path) -> None:
    doc = {k: getattr(model, k) for k in _COST_FIELDS}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class CopyRecord:
    """One staged cross-array transfer executed right before operation `op`."""

    op: int
    src_row: int
    dest_row: int


@dataclass(frozen=True)
class ArrayPlacement:
    rows_per_array: int
    num_arrays: int
    pi_rows: tuple
    value_row: dict = field(compare=False)  # value id -> physical row (0 stays 0)
    copies: tuple = ()

    def array_of(self, row: int) -> int:
        if row == 0:
            return -1  # constant row, readable anywhere
        return (row - 1) // self.rows_per_array

    @property
    def num_copies(self) -> int:
        return len(self.copies)


def _data_slot(k: int, rows_per_array: int, capacity: int) -> int:
    """Physical row of the k-th (0-based) data value under multi-array packing."""
    a, off = divmod(k, capacity)
    return a * rows_per_array + off + 1


def place(design, model: CostModel) -> ArrayPlacement:
    """Assign physical rows and derive the COPY schedule.

    Single-array placement (no copies) whenever PI count + MF fits one array.
    Multi-array placement reserves the two highest rows of each array as
    staging scratch; an all-foreign three-input operation stages its third
    source in the destination row itself, which liveness guarantees is free
    at that point.
    """
    net = design.netlist
    rpa = model.rows_per_array
    num_pis = net.num_pis
    if rpa < num_pis + 1:
        raise PlacementError(
            f"infeasible: rows_per_array={rpa} cannot hold {num_pis} inputs plus a result row"
        )
    mf = design.mf

    value_row = {}
    if num_pis + mf <= rpa:
        pi_rows = tuple(range(1, num_pis + 1))
        for nid, r in design.row_of.items():
            value_row[nid] = num_pis + r
        for i in range(1, num_pis + 1):
            value_row.setdefault(i, i)
        return ArrayPlacement(rpa, 1, pi_rows, value_row)

    capacity = rpa - 2  # two scratch rows per array
    if capacity < 1:
        raise PlacementError(f"rows_per_array={rpa} leaves no data rows after scratch")
    pi_rows = tuple(_data_slot(i, rpa, capacity) for i in range(num_pis))
    for i in range(1, num_pis + 1):
        value_row[i] = pi_rows[i - 1]
    for nid, r in design.row_of.items():
        value_row[nid] = _data_slot(num_pis + r - 1, rpa, capacity)
    num_slots = num_pis + mf
    num_arrays = (num_slots + capacity - 1) // capacity

    copies = []
    for v in net.op_ids():
        dest = value_row[v]
        dest_array = (dest - 1) // rpa
        foreign = []
        for e in net.node(v).fanins:
            if e.target == 0:
                continue
            src = value_row[e.target]
            if (src - 1) // rpa != dest_array and src not in foreign:
                foreign.append(src)
        if not foreign:
            continue
        base = dest_array * rpa
        staging = (base + rpa - 1, base + rpa, dest)
        for src, stage in zip(foreign, staging):
            copies.append(CopyRecord(v, src, stage))
    return ArrayPlacement(rpa, num_arrays, pi_rows, value_row, tuple(copies))


def estimate_edp(design, model: CostModel) -> float:
    """Total instruction energy times total instruction delay."""
    n_copies = place(design, model).num_copies
    n_ops = design.size
    energy = n_ops * model.energy_op + n_copies * model.energy_copy
    delay = n_ops * model.delay_op + n_copies * model.delay_copy
    return energy * delay


def with_rows(model: CostModel, rows_per_array: int) -> CostModel:
    return replace(model, rows_per_array=rows_per_array)
