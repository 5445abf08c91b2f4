"""Report files: Table-1 statistics, CCNS matrix, feature histogram, baselines."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import metrics
from .baselines import EvalResult
from .graph import Dataset
from .io import _write_csv, dump_json

TABLE1_COLUMNS = {
    "num_nodes": "|V|",
    "num_edges": "|E|",
    "avg_degree": "Avg. d_u",
    "num_classes": "K",
    "h_e": "h_e",
    "h_adj": "h_adj",
    "li": "LI",
    "fi": "FI",
}

TASK_ORDER = ("N1", "N2", "N3", "S1", "S2", "S3")


def _r4(x):
    return None if x is None else round(float(x), 4)


def stats_payload(report: metrics.StatsReport, ccns: metrics.CcnsMatrix | None = None) -> dict:
    table = {}
    for name, col in TABLE1_COLUMNS.items():
        value = getattr(report, name)
        table[col] = value if isinstance(value, int) else _r4(value)
    payload = {
        "table_1": table,
        "full_precision": {col: getattr(report, name) for name, col in TABLE1_COLUMNS.items()},
        "undefined": {TABLE1_COLUMNS[k]: v for k, v in report.undefined.items()},
    }
    if ccns is not None:
        payload["ccns"] = {
            "self_pairs_included": True,
            "isolated_nodes": ccns.num_isolated,
            "isolated_similarity": 0.0 if ccns.num_isolated else None,
            "classes_present": [int(c) + 1 for c in np.flatnonzero(ccns.classes_present)],
        }
    return payload


def write_stats(dataset: Dataset, out) -> metrics.StatsReport:
    """Write ``stats.json``, ``ccns.csv`` and ``feature_hist.csv`` into ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    report = metrics.stats_report(dataset)
    k = dataset.num_classes
    labels = dataset.nodes.labels
    cc = metrics.ccns(dataset.graph, labels, num_classes=k)
    dump_json(stats_payload(report, cc), out / "stats.json")

    ids = [str(c) for c in range(1, k + 1)]
    _write_csv(out / "ccns.csv", ["class", *ids],
               ([ids[i], *map(repr, cc.values[i].tolist())] for i in range(k)))

    bins, counts = metrics.feature_histogram(dataset.nodes.features, labels, k)
    _write_csv(out / "feature_hist.csv", ["bin", *(f"class_{c}" for c in ids)],
               ([b, *row] for b, row in zip(bins.tolist(), counts.tolist())))
    return report


def write_baseline(result: EvalResult, model: str, out) -> Path:
    """Merge one model's result into ``baselines.json``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "baselines.json"
    data = json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}
    data[model] = result.as_dict()
    dump_json(data, path)
    return path


def write_table_1(reports: dict[str, metrics.StatsReport], path) -> None:
    rows = []
    for task in TASK_ORDER:
        if task not in reports:
            continue
        r = reports[task]
        row = [task]
        for name in TABLE1_COLUMNS:
            value = getattr(r, name)
            if value is None:
                row.append("")
            elif isinstance(value, int):
                row.append(value)
            else:
                row.append(f"{value:.4f}")
        rows.append(row)
    _write_csv(Path(path), ["task", *TABLE1_COLUMNS.values()], rows)


def write_table_2(results: dict[str, dict[str, EvalResult]], path) -> None:
    """Rows are models, columns tasks, cells ``mean ± std`` as fractions."""
    tasks = [t for t in TASK_ORDER if any(t in per_task for per_task in results.values())]
    rows = []
    for model, per_task in results.items():
        cells = []
        for t in tasks:
            r = per_task.get(t)
            cells.append("" if r is None else f"{r.mean:.4f} ± {r.std:.4f}")
        rows.append([model, *cells])
    _write_csv(Path(path), ["model", *tasks], rows)
