"""Dataset directory format.

::

    meta.json          format_version, task_id, seed, num_nodes, num_classes, config
    edges.csv          "u,v", one undirected edge per row, u < v, sorted
    nodes.csv          "id,feature,label[,hidden_state]", sorted by id
    splits/rep_<i>.json  {"train": [...], "validation": [...], "test": [...]}

Features are written with ``repr`` so reading them back is bit-exact.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import DatasetFormatError, InputError
from .graph import TASK_IDS, Dataset, Graph, NodeTable, Split
from .taskgen import GenConfig

FORMAT_VERSION = 1


def dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_dataset(dataset: Dataset, path, splits: list[Split] | None = None) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    meta = {
        "format_version": FORMAT_VERSION,
        "task_id": dataset.task_id,
        "seed": int(dataset.seed),
        "num_nodes": dataset.num_nodes,
        "num_classes": dataset.num_classes,
        "config": dataset.config.to_dict() if dataset.config is not None else None,
    }
    dump_json(meta, path / "meta.json")
    _write_csv(path / "edges.csv", ["u", "v"], dataset.graph.edges.tolist())

    nodes = dataset.nodes
    header = ["id", "feature", "label"]
    cols = [range(dataset.num_nodes), map(repr, nodes.features.tolist()), nodes.labels.tolist()]
    if nodes.hidden_states is not None:
        header.append("hidden_state")
        cols.append(nodes.hidden_states.tolist())
    _write_csv(path / "nodes.csv", header, zip(*cols))

    if splits is not None:
        write_splits(splits, path)
    return path


def write_splits(splits: list[Split], path) -> None:
    sdir = Path(path) / "splits"
    sdir.mkdir(parents=True, exist_ok=True)
    for old in sdir.glob("rep_*.json"):
        old.unlink()
    for i, s in enumerate(splits):
        dump_json({"train": s.train.tolist(), "validation": s.validation.tolist(),
                   "test": s.test.tolist()}, sdir / f"rep_{i}.json")


def _read_json(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None


def read_meta(path) -> dict:
    path = Path(path)
    meta = _read_json(path / "meta.json")
    if not isinstance(meta, dict):
        raise DatasetFormatError("meta.json must hold an object", path / "meta.json")
    version = meta.get("format_version")
    if version != FORMAT_VERSION:
        raise DatasetFormatError(f"unsupported format_version {version!r}", path / "meta.json")
    for key in ("task_id", "seed", "num_nodes", "num_classes"):
        if key not in meta:
            raise DatasetFormatError(f"missing key {key!r}", path / "meta.json")
    if meta["task_id"] not in TASK_IDS:
        raise DatasetFormatError(f"unknown task_id {meta['task_id']!r}", path / "meta.json")
    return meta


def _rows(path: Path, header_options: list[list[str]]):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header not in header_options:
            raise DatasetFormatError(f"unexpected header {header!r}", path, 1)
        yield header
        for row in reader:
            yield reader.line_num, row


def read_dataset(path) -> Dataset:
    path = Path(path)
    meta = read_meta(path)
    n, k = int(meta["num_nodes"]), int(meta["num_classes"])

    edges_path = path / "edges.csv"
    it = _rows(edges_path, [["u", "v"]])
    next(it)
    edges = []
    prev = None
    for line, row in it:
        try:
            if len(row) != 2:
                raise ValueError(f"expected 2 fields, got {len(row)}")
            u, v = int(row[0]), int(row[1])
        except ValueError as exc:
            raise DatasetFormatError(f"bad edge row {row!r}: {exc}", edges_path, line) from None
        if not (0 <= u < v < n):
            raise DatasetFormatError(f"edge ({u},{v}) must satisfy 0 <= u < v < {n}", edges_path, line)
        if prev is not None and (u, v) <= prev:
            raise DatasetFormatError("edges must be sorted and unique", edges_path, line)
        prev = (u, v)
        edges.append((u, v))

    nodes_path = path / "nodes.csv"
    it = _rows(nodes_path, [["id", "feature", "label"], ["id", "feature", "label", "hidden_state"]])
    header = next(it)
    width = len(header)
    features, labels, hidden = [], [], []
    for line, row in it:
        try:
            if len(row) != width:
                raise ValueError(f"expected {width} fields, got {len(row)}")
            node = int(row[0])
            x = float(row[1])
            y = int(row[2])
            h = int(row[3]) if width == 4 else None
        except ValueError as exc:
            raise DatasetFormatError(f"bad node row {row!r}: {exc}", nodes_path, line) from None
        if node != len(labels):
            raise DatasetFormatError(f"expected node id {len(labels)}, got {node}", nodes_path, line)
        if not 1 <= y <= k or (h is not None and not 1 <= h <= k):
            raise DatasetFormatError(f"class id outside 1..{k}", nodes_path, line)
        if not np.isfinite(x):
            raise DatasetFormatError("feature must be finite", nodes_path, line)
        features.append(x)
        labels.append(y)
        if h is not None:
            hidden.append(h)
    if len(labels) != n:
        raise DatasetFormatError(f"{len(labels)} node rows, meta.json says {n}", nodes_path)

    config = GenConfig.from_dict(meta["config"]) if meta.get("config") is not None else None
    nodes = NodeTable(features=np.array(features, dtype=np.float64), labels=np.array(labels),
                      num_classes=k, hidden_states=np.array(hidden) if width == 4 else None)
    return Dataset(graph=Graph(n, np.array(edges, dtype=np.int64).reshape(-1, 2)), nodes=nodes,
                   task_id=meta["task_id"], config=config, seed=int(meta["seed"]))


def read_splits(path, num_nodes: int | None = None) -> list[Split]:
    sdir = Path(path) / "splits"
    files = sorted(sdir.glob("rep_*.json"), key=lambda p: int(p.stem.split("_")[1]))
    splits = []
    for f in files:
        data = _read_json(f)
        try:
            split = Split(*(np.asarray(data[key], dtype=np.int64) for key in ("train", "validation", "test")))
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetFormatError(f"bad split file: {exc}", f) from None
        if num_nodes is not None:
            ids = np.concatenate([split.train, split.validation, split.test])
            if ids.size != num_nodes or not np.array_equal(np.sort(ids), np.arange(num_nodes)):
                raise DatasetFormatError("split is not a partition of the node ids", f)
        splits.append(split)
    return splits


def load_config(path) -> GenConfig:
    data = _read_json(Path(path))
    if not isinstance(data, dict):
        raise InputError("config file must hold a JSON object")
    return GenConfig.from_dict(data)
