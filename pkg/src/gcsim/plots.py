"""Figure rendering from records CSVs.

Every figure also writes a ``<image>.values.json`` sidecar with the exact
numbers drawn, so plotted heights can be cross-checked against the summary
JSON without parsing the image.
"""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .errors import SchemaError
from .records import read_records_csv, summarize_rows

FIGURE_KINDS = ("avg-completion-bar", "running-mean-line", "spread-histogram")
# Left-to-right bar order: lower bound first, then the schemes it bounds.
SCHEME_ORDER = ("LB", "GC-DC", "GC-SC", "GC")


def _ordered_schemes(rows) -> list[str]:
    present = {row["scheme"] for row in rows}
    ordered = [s for s in SCHEME_ORDER if s in present]
    ordered.extend(sorted(present - set(SCHEME_ORDER)))
    return ordered


def _bar_values(rows) -> dict:
    summary = summarize_rows(rows)
    schemes = _ordered_schemes(rows)
    return {
        "kind": "avg-completion-bar",
        "schemes": schemes,
        "values": [summary[s]["mean"] for s in schemes],
    }


def _running_mean_values(rows) -> dict:
    schemes = _ordered_schemes(rows)
    series = {}
    for scheme in schemes:
        per_iter: dict[int, list[float]] = {}
        for row in rows:
            if row["scheme"] == scheme:
                per_iter.setdefault(row["iteration"], []).append(row["completion_time"])
        iterations = sorted(per_iter)
        seed_means = np.array([np.mean(per_iter[t]) for t in iterations])
        running = np.cumsum(seed_means) / np.arange(1, len(seed_means) + 1)
        series[scheme] = {
            "iterations": iterations,
            "running_mean": [float(v) for v in running],
        }
    return {"kind": "running-mean-line", "schemes": schemes, "series": series}


def _spread_histogram_values(rows) -> dict:
    clustered = [s for s in _ordered_schemes(rows) if s in ("GC-SC", "GC-DC")]
    if not clustered:
        raise SchemaError("spread histogram needs GC-SC or GC-DC records")
    top = max(row["max_spread"] for row in rows if row["scheme"] in clustered)
    bins = list(range(top + 1))
    counts = {}
    for scheme in clustered:
        values = [row["max_spread"] for row in rows if row["scheme"] == scheme]
        counts[scheme] = [int(sum(1 for v in values if v == b)) for b in bins]
    return {
        "kind": "spread-histogram",
        "schemes": clustered,
        "bins": bins,
        "counts": counts,
    }


def render(csv_path, kind: str, out_path) -> dict:
    """Render one figure; returns the sidecar values (also written to disk)."""
    if kind not in FIGURE_KINDS:
        raise SchemaError(f"unknown figure kind {kind!r}, expected one of {FIGURE_KINDS}")
    rows = read_records_csv(csv_path)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if kind == "avg-completion-bar":
        values = _bar_values(rows)
        ax.bar(values["schemes"], values["values"], color="tab:blue")
        ax.set_ylabel("average completion time per iteration")
        ax.set_xlabel("scheme")
    elif kind == "running-mean-line":
        values = _running_mean_values(rows)
        for scheme in values["schemes"]:
            series = values["series"][scheme]
            ax.plot(series["iterations"], series["running_mean"], label=scheme)
        ax.set_xlabel("iteration")
        ax.set_ylabel("cumulative mean completion time")
        ax.legend()
    else:
        values = _spread_histogram_values(rows)
        width = 0.8 / len(values["schemes"])
        base = np.asarray(values["bins"], dtype=float)
        for i, scheme in enumerate(values["schemes"]):
            ax.bar(base + i * width, values["counts"][scheme], width=width, label=scheme)
        ax.set_xlabel("max stragglers in any cluster")
        ax.set_ylabel("iterations")
        ax.legend()
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)

    sidecar = f"{out_path}.values.json"
    tmp = f"{sidecar}.tmp"
    with open(tmp, "w") as fh:
        json.dump(values, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, sidecar)
    return values
