"""Records CSV and summary JSON: the stable on-disk interfaces.

CSV columns, in order:
``seed, iteration, scheme, completion_time, straggler_count, max_spread,
recovery_flag, fallback_used``.  Flags are 0/1; completion times are written
with ``repr`` so a re-run reproduces the file byte for byte.
"""

from __future__ import annotations

import csv
import json
import os
from typing import Iterable, Sequence

import numpy as np

from .errors import SchemaError
from .simulator import IterationRecord

CSV_COLUMNS = (
    "seed",
    "iteration",
    "scheme",
    "completion_time",
    "straggler_count",
    "max_spread",
    "recovery_flag",
    "fallback_used",
)


def write_records_csv(path, records: Iterable[IterationRecord]) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(
                [
                    rec.seed,
                    rec.iteration,
                    rec.scheme,
                    repr(rec.completion_time),
                    rec.straggler_count,
                    rec.max_spread,
                    int(rec.recovery),
                    int(rec.fallback),
                ]
            )
    os.replace(tmp, path)


def read_records_csv(path) -> list[dict]:
    """Parse a records CSV, raising SchemaError with column diagnostics."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {CSV_COLUMNS}")
        if tuple(header) != CSV_COLUMNS:
            missing = [c for c in CSV_COLUMNS if c not in header]
            extra = [c for c in header if c not in CSV_COLUMNS]
            raise SchemaError(
                f"{path}: bad header; missing columns {missing}, unexpected {extra}"
            )
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if len(raw) != len(CSV_COLUMNS):
                raise SchemaError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} fields")
            try:
                rows.append(
                    {
                        "seed": int(raw[0]),
                        "iteration": int(raw[1]),
                        "scheme": raw[2],
                        "completion_time": float(raw[3]),
                        "straggler_count": int(raw[4]),
                        "max_spread": int(raw[5]),
                        "recovery_flag": int(raw[6]),
                        "fallback_used": int(raw[7]),
                    }
                )
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def summarize_rows(rows: Sequence[dict]) -> dict:
    """Per-scheme stats plus pairwise improvement fractions.

    ``improvements["A_vs_B"] = 1 - mean(A) / mean(B)``: the fraction of B's
    mean completion time that switching to A saves.
    """
    schemes = sorted({row["scheme"] for row in rows})
    summary: dict = {}
    means: dict[str, float] = {}
    for scheme in schemes:
        q = np.array(
            [row["completion_time"] for row in rows if row["scheme"] == scheme]
        )
        flags = [row for row in rows if row["scheme"] == scheme]
        summary[scheme] = {
            "mean": float(q.mean()),
            "median": float(np.median(q)),
            "p95": float(np.percentile(q, 95)),
            "n_records": int(q.size),
            "recovery_rate": float(np.mean([r["recovery_flag"] for r in flags])),
            "fallback_rate": float(np.mean([r["fallback_used"] for r in flags])),
        }
        means[scheme] = summary[scheme]["mean"]
    improvements = {}
    for a in schemes:
        for b in schemes:
            if a != b and means[b] > 0:
                improvements[f"{a}_vs_{b}"] = 1.0 - means[a] / means[b]
    summary["improvements"] = improvements
    return summary


def summarize_records(records: Sequence[IterationRecord]) -> dict:
    rows = [
        {
            "scheme": rec.scheme,
            "completion_time": rec.completion_time,
            "recovery_flag": int(rec.recovery),
            "fallback_used": int(rec.fallback),
        }
        for rec in records
    ]
    return summarize_rows(rows)


def write_json(path, payload: dict) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
