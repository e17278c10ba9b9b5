"""CSV schemas and deterministic row formatting.

Numbers are written with 6 significant digits, booleans as ``true``/``false``,
and unsolvable distances as ``infeasible``.  Files are UTF-8 with LF endings.
"""
from __future__ import annotations

import csv
import io
import math
from typing import Iterable

from .device_profiles import POWER_NOTES, DeviceClass, architecture_table, preset
from .field_sim import TrialResult
from .link_budget import SweepRow

INFEASIBLE = "infeasible"

SCHEMAS = {
    "sweep": ("device", "vwc", "d_act_m", "d_read_m", "effective_range_m", "limiting_link"),
    "fieldsim": ("tag_id", "row", "activated", "read", "margin_db"),
    "inventory": ("scheme", "n_tags", "slots", "successes", "collisions", "idle"),
    "presets": ("table", "name", "max_power_w", "power_note", "coverage_lo_m", "coverage_hi_m",
                "rate_lo_kbps", "rate_hi_kbps", "p_t_dbm", "p_thr_dbm", "sensitivity_dbm",
                "m_factor", "description", "complexity"),
}


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if hasattr(value, "value") and isinstance(value.value, str):
        return value.value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".6g")
    return str(value)


def render(schema: str, rows: Iterable[Iterable]) -> str:
    """CSV text for ``rows`` under the named schema (header written once)."""
    header = SCHEMAS[schema]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        row = list(row)
        if len(row) != len(header):
            raise ValueError(f"{schema} row has {len(row)} fields, expected {len(header)}")
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def parse(text: str, schema: str) -> list[dict]:
    """Read CSV text back, checking the header against the schema."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != SCHEMAS[schema]:
        raise ValueError(f"header {reader.fieldnames} does not match the {schema} schema")
    return list(reader)


def sweep_rows(device: str, rows: Iterable[SweepRow]):
    for r in rows:
        yield (device, r.vwc,
               INFEASIBLE if r.d_act is None else r.d_act,
               INFEASIBLE if r.d_read is None else r.d_read,
               INFEASIBLE if r.effective_range is None else r.effective_range,
               INFEASIBLE if r.limiting_link is None else r.limiting_link)


def fieldsim_rows(result: TrialResult):
    for t in result.per_tag:
        yield (t.tag_id, t.row, t.activated, t.read, t.best_margin)


def fieldsim_summary(result: TrialResult) -> str:
    passes = " ".join(fmt(r) for r in result.per_pass_rates)
    return (f"unique_reads={result.unique_reads}/{result.attempted} "
            f"success_rate={fmt(result.success_rate)} per_pass_rates={passes}")


def preset_rows():
    for arch in architecture_table():
        yield ("I", arch.name, arch.max_power, "", arch.coverage[0], arch.coverage[1],
               arch.data_rate[0], arch.data_rate[1], None, None, None, None, "", "")
    for cls in DeviceClass:
        p = preset(cls)
        lo, hi = p.data_rate_range or (None, None)
        table = "II" if p.is_aiot else "ref"
        yield (table, p.name, p.max_power, POWER_NOTES.get(cls, ""), None, None, lo, hi,
               p.p_t, p.p_thr, p.sensitivity, p.m_factor, p.description, p.complexity_note)
