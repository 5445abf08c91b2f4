"""Homophily, neighbourhood-similarity and informativeness metrics.

All label arguments use class ids ``1..K``. Logarithms are natural; every
``0 * log 0`` term is taken to be zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateDistributionError, InputError, UndefinedMetricError, ZeroEntropyError
from .graph import Dataset, Graph, label_histograms


def _labels(graph: Graph, labels) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (graph.num_nodes,):
        raise InputError("labels must cover all nodes")
    if labels.size and labels.min() < 1:
        raise InputError("labels must be class ids >= 1")
    return labels


def _num_classes(labels: np.ndarray, num_classes: int | None) -> int:
    k = int(labels.max()) if labels.size else 0
    if num_classes is not None:
        if k > num_classes:
            raise InputError(f"label {k} exceeds num_classes={num_classes}")
        k = int(num_classes)
    return k


def _plogp(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(np.sum(p * np.log(p)))


def class_degree_distribution(graph: Graph, labels, num_classes: int | None = None) -> np.ndarray:
    """``p_bar(k)``: share of total degree mass held by nodes of class ``k``."""
    labels = _labels(graph, labels)
    k = _num_classes(labels, num_classes)
    if graph.num_edges == 0:
        raise UndefinedMetricError("class degree distribution needs at least one edge")
    mass = np.bincount(labels - 1, weights=graph.degrees(), minlength=k)
    return mass / mass.sum()


def edge_label_joint(graph: Graph, labels, num_classes: int | None = None) -> np.ndarray:
    """``p(k, k')`` over edges, each edge counted in both directions."""
    labels = _labels(graph, labels)
    k = _num_classes(labels, num_classes)
    if graph.num_edges == 0:
        raise UndefinedMetricError("edge label joint needs at least one edge")
    a = labels[graph.edges[:, 0]] - 1
    b = labels[graph.edges[:, 1]] - 1
    counts = np.zeros((k, k), dtype=np.float64)
    np.add.at(counts, (a, b), 1.0)
    counts = counts + counts.T
    return counts / counts.sum()


def edge_homophily(graph: Graph, labels) -> float:
    labels = _labels(graph, labels)
    if graph.num_edges == 0:
        raise UndefinedMetricError("edge homophily is undefined on a graph without edges")
    same = labels[graph.edges[:, 0]] == labels[graph.edges[:, 1]]
    return int(same.sum()) / graph.num_edges


def adjusted_homophily(graph: Graph, labels) -> float:
    h_e = edge_homophily(graph, labels)
    p_bar = class_degree_distribution(graph, labels)
    sq = float(np.sum(p_bar ** 2))
    if 1.0 - sq <= 0.0:
        raise DegenerateDistributionError("all degree mass lies in one class")
    return (h_e - sq) / (1.0 - sq)


def label_informativeness(graph: Graph, labels) -> float:
    labels = _labels(graph, labels)
    p = edge_label_joint(graph, labels)
    p_bar = class_degree_distribution(graph, labels)
    denom = _plogp(p_bar)
    if denom == 0.0:
        raise DegenerateDistributionError("all degree mass lies in one class")
    return 2.0 - _plogp(p.ravel()) / denom


@dataclass
class CcnsMatrix:
    values: np.ndarray
    classes_present: np.ndarray
    num_isolated: int = 0

    @property
    def num_classes(self) -> int:
        return self.values.shape[0]


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of two vectors; zero when either is the zero vector."""
    na = math.sqrt(float(np.dot(a, a)))
    nb = math.sqrt(float(np.dot(b, b)))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b)) / (na * nb)


def ccns(graph: Graph, labels, num_classes: int | None = None,
         similarity: Callable[[np.ndarray, np.ndarray], float] | None = None) -> CcnsMatrix:
    """Cross-class neighbourhood similarity.

    Entry ``(k, k')`` averages ``similarity(D_u, D_v)`` over every pair
    ``u`` of class ``k`` and ``v`` of class ``k'``, self-pairs included.
    Isolated nodes have a zero histogram and score 0 against everything.
    Classes with no members get a zero row and column and are flagged in
    ``classes_present``.

    With the default cosine similarity the double sum factorizes through the
    per-class sums of unit-normalized histograms, so the cost is O(n K).
    A custom ``similarity`` falls back to the explicit pair loop.
    """
    labels = _labels(graph, labels)
    k = _num_classes(labels, num_classes)
    hist = label_histograms(graph, labels, k).astype(np.float64)
    sizes = np.bincount(labels - 1, minlength=k)
    present = sizes > 0
    norms = np.sqrt(np.einsum("ij,ij->i", hist, hist))
    isolated = int(np.sum(norms == 0))

    if similarity is None:
        unit = np.divide(hist, norms[:, None], out=np.zeros_like(hist), where=norms[:, None] > 0)
        class_sum = np.zeros((k, k), dtype=np.float64)
        for c in range(k):
            class_sum[c] = unit[labels == c + 1].sum(axis=0)
        total = class_sum @ class_sum.T
    else:
        members = [np.flatnonzero(labels == c + 1) for c in range(k)]
        total = np.zeros((k, k), dtype=np.float64)
        for a in range(k):
            for b in range(a, k):
                s = 0.0
                for u in members[a]:
                    for v in members[b]:
                        s += similarity(hist[u], hist[v])
                total[a, b] = total[b, a] = s

    denom = np.outer(sizes, sizes).astype(np.float64)
    values = np.divide(total, denom, out=np.zeros((k, k)), where=denom > 0)
    values = 0.5 * (values + values.T)
    return CcnsMatrix(values=values, classes_present=present, num_isolated=isolated)


def discretize_features(features) -> np.ndarray:
    """Unit-width bins anchored at the integers: bin id is ``floor(x)``."""
    x = np.asarray(features, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise InputError("features must be finite")
    return np.floor(x).astype(np.int64)


def _entropy_from_counts(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def mutual_information(x_bins, y) -> float:
    """Plug-in mutual information of two discrete sequences (nats)."""
    x_bins = np.asarray(x_bins)
    y = np.asarray(y)
    _, xi = np.unique(x_bins, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    joint = np.zeros((xi.max() + 1, yi.max() + 1), dtype=np.float64)
    np.add.at(joint, (xi.ravel(), yi.ravel()), 1.0)
    return (_entropy_from_counts(joint.sum(axis=1)) + _entropy_from_counts(joint.sum(axis=0))
            - _entropy_from_counts(joint.ravel()))


def feature_informativeness(features, labels) -> float:
    """``I(x, y) / H(x)`` on the unit-binned feature."""
    labels = np.asarray(labels)
    x = discretize_features(features)
    if x.shape != labels.shape or x.size == 0:
        raise InputError("features and labels must be non-empty and of equal length")
    _, counts = np.unique(x, return_counts=True)
    h_x = _entropy_from_counts(counts.astype(np.float64))
    if h_x == 0.0:
        raise ZeroEntropyError("discretized feature is constant; FI undefined")
    mi = mutual_information(x, labels)
    # plug-in MI can land a few ulps outside [0, H(x)]
    return min(max(mi / h_x, 0.0), 1.0)


def feature_histogram(features, labels, num_classes: int) -> tuple[np.ndarray, np.ndarray]:
    """Bin ids and a ``(bins, K)`` count matrix, one column per class."""
    x = discretize_features(features)
    labels = np.asarray(labels, dtype=np.int64)
    if x.size == 0:
        return np.empty(0, dtype=np.int64), np.zeros((0, num_classes), dtype=np.int64)
    bins = np.arange(x.min(), x.max() + 1)
    counts = np.zeros((bins.size, num_classes), dtype=np.int64)
    np.add.at(counts, (x - x.min(), labels - 1), 1)
    return bins, counts


STATS_FIELDS = ("num_nodes", "num_edges", "avg_degree", "num_classes", "h_e", "h_adj", "li", "fi")


@dataclass
class StatsReport:
    num_nodes: int
    num_edges: int
    avg_degree: float
    num_classes: int
    h_e: float | None
    h_adj: float | None
    li: float | None
    fi: float | None
    undefined: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in STATS_FIELDS}


def stats_report(dataset: Dataset) -> StatsReport:
    """One Table-1 style row; metric failures become ``None`` plus a reason."""
    g = dataset.graph
    labels = dataset.nodes.labels
    undefined: dict[str, str] = {}

    def attempt(name, fn, *args):
        try:
            return fn(*args)
        except UndefinedMetricError as exc:
            undefined[name] = f"{type(exc).__name__}: {exc}"
            return None

    n = g.num_nodes
    return StatsReport(
        num_nodes=n,
        num_edges=g.num_edges,
        avg_degree=2.0 * g.num_edges / n if n else 0.0,
        num_classes=dataset.num_classes,
        h_e=attempt("h_e", edge_homophily, g, labels),
        h_adj=attempt("h_adj", adjusted_homophily, g, labels),
        li=attempt("li", label_informativeness, g, labels),
        fi=attempt("fi", feature_informativeness, dataset.nodes.features, labels),
        undefined=undefined,
    )
