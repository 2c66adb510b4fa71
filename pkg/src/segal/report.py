"""Experiment output emitters: per-cycle CSV curves and the cross-strategy
comparison JSON. No plotting here; these files feed external plotting and
the annotation console's metrics panel."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Mapping, Sequence

from .loop import CycleRecord


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def emit_cycle_csv(records: Sequence[CycleRecord], path) -> None:
    """Write the per-cycle progression table.

    Columns: cycle, miou, iou_class_0..iou_class_{K-1}, theta,
    filled_below_threshold, wall_time_s. Absent IoU values become empty
    fields, floats carry 6 decimals, line endings are LF.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to emit")
    k = len(records[0].iou)
    header = (
        ["cycle", "miou"]
        + [f"iou_class_{c}" for c in range(k)]
        + ["theta", "filled_below_threshold", "wall_time_s"]
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for record in records:
            if len(record.iou) != k:
                raise ValueError("records disagree on class count")
            writer.writerow(
                [str(record.cycle), _fmt(record.miou)]
                + [_fmt(v) for v in record.iou]
                + [
                    _fmt(None if record.theta is None else record.theta.theta),
                    str(record.filled_below_threshold),
                    _fmt(record.wall_time_s),
                ]
            )


def read_cycle_csv(path) -> list[dict]:
    """Parse a file written by :func:`emit_cycle_csv` back into row dicts."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for raw in reader:
            iou_keys = sorted(
                (k for k in raw if k.startswith("iou_class_")),
                key=lambda k: int(k.rsplit("_", 1)[1]),
            )
            rows.append(
                {
                    "cycle": int(raw["cycle"]),
                    "miou": float(raw["miou"]) if raw["miou"] else None,
                    "iou": [float(raw[k]) if raw[k] else None for k in iou_keys],
                    "theta": float(raw["theta"]) if raw["theta"] else None,
                    "filled_below_threshold": int(raw["filled_below_threshold"]),
                    "wall_time_s": float(raw["wall_time_s"]),
                }
            )
    return rows


def comparison_payload(
    reportset: Mapping[str, Sequence[CycleRecord]], upper_bound: dict | None = None
) -> dict:
    """Build the comparison document: one summary row and learning curve per
    strategy, plus the optional fully-supervised upper bound."""
    if not reportset:
        raise ValueError("empty report set")
    strategies = {}
    for strategy, records in reportset.items():
        records = list(records)
        if not records:
            raise ValueError(f"strategy {strategy!r} has no records")
        final = records[-1]
        strategies[strategy] = {
            "final_miou": final.miou,
            "final_iou": list(final.iou),
            "wall_time_s": sum(r.wall_time_s for r in records),
            "curve": {
                "cycle": [r.cycle for r in records],
                "miou": [r.miou for r in records],
            },
        }
    payload: dict = {"strategies": strategies}
    if upper_bound is not None:
        payload["upper_bound"] = {
            "miou": upper_bound["miou"],
            "iou": list(upper_bound["iou"]),
            "wall_time_s": upper_bound.get("wall_time_s"),
        }
    return payload


def emit_comparison(
    reportset: Mapping[str, Sequence[CycleRecord]], path, upper_bound: dict | None = None
) -> None:
    payload = comparison_payload(reportset, upper_bound)
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
