"""Undirected graph container, per-node attributes and neighbourhood queries."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .errors import InputError

if TYPE_CHECKING:
    from .taskgen import GenConfig

TASK_IDS = ("N1", "N2", "N3", "S1", "S2", "S3", "custom")


class Graph:
    """Undirected graph over dense node ids ``0..num_nodes-1``.

    Edges are kept as an ``(m, 2)`` int64 array with ``u <= v`` in every row,
    sorted lexicographically. The adjacency is stored in CSR form with each
    neighbour list sorted, so iteration order never depends on how the edges
    were inserted.

    The constructor does not deduplicate or drop self-loops; use
    :meth:`from_edges` with ``simplify=True`` for that and
    :func:`validate_graph` to inspect a raw edge list.
    """

    __slots__ = ("num_nodes", "edges", "indptr", "indices")

    def __init__(self, num_nodes: int, edges=None):
        num_nodes = int(num_nodes)
        if num_nodes < 0:
            raise InputError("num_nodes must be non-negative")
        if edges is None:
            edges = np.empty((0, 2), dtype=np.int64)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= num_nodes):
            raise InputError(f"edge endpoint outside 0..{num_nodes - 1}")
        edges = np.sort(edges, axis=1)
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
        edges.setflags(write=False)

        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=num_nodes), out=indptr[1:])
        indices = dst.astype(np.int64)
        indptr.setflags(write=False)
        indices.setflags(write=False)

        self.num_nodes = num_nodes
        self.edges = edges
        self.indptr = indptr
        self.indices = indices

    @classmethod
    def from_edges(cls, num_nodes: int, edges: Iterable, simplify: bool = False) -> "Graph":
        """Build a graph, optionally dropping self-loops and parallel edges."""
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        if simplify and arr.size:
            arr = np.sort(arr, axis=1)
            arr = arr[arr[:, 0] != arr[:, 1]]
            arr = np.unique(arr, axis=0)
        return cls(num_nodes, arr)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def neighbors(self, u: int) -> np.ndarray:
        _check_node(self, u)
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def adjacency_sets(self) -> list[set[int]]:
        return [set(self.indices[self.indptr[u]:self.indptr[u + 1]].tolist())
                for u in range(self.num_nodes)]

    def subgraph(self, keep: np.ndarray) -> "Graph":
        """Induced subgraph on the nodes in ``keep``, relabelled densely in id order."""
        keep = np.unique(np.asarray(keep, dtype=np.int64))
        remap = np.full(self.num_nodes, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        e = remap[self.edges]
        e = e[(e >= 0).all(axis=1)]
        return Graph(keep.size, e)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.num_nodes == other.num_nodes and np.array_equal(self.edges, other.edges)

    def __repr__(self):
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"


@dataclass(eq=False)
class NodeTable:
    """Per-node feature, label (1..K) and optional hidden state (1..K)."""

    features: np.ndarray
    labels: np.ndarray
    num_classes: int
    hidden_states: np.ndarray | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.hidden_states is not None:
            self.hidden_states = np.asarray(self.hidden_states, dtype=np.int64)
        n = self.labels.shape[0]
        if self.features.shape != (n,):
            raise InputError("features and labels must have one entry per node")
        if n and (self.labels.min() < 1 or self.labels.max() > self.num_classes):
            raise InputError(f"labels must lie in 1..{self.num_classes}")
        if self.hidden_states is not None:
            hs = self.hidden_states
            if hs.shape != (n,):
                raise InputError("hidden_states must have one entry per node")
            if n and (hs.min() < 1 or hs.max() > self.num_classes):
                raise InputError(f"hidden states must lie in 1..{self.num_classes}")
        for arr in (self.features, self.labels, self.hidden_states):
            if arr is not None:
                arr.setflags(write=False)

    def __len__(self):
        return int(self.labels.shape[0])

    def __eq__(self, other):
        if not isinstance(other, NodeTable):
            return NotImplemented
        if (self.hidden_states is None) != (other.hidden_states is None):
            return False
        return (self.num_classes == other.num_classes
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels)
                and (self.hidden_states is None
                     or np.array_equal(self.hidden_states, other.hidden_states)))


@dataclass(eq=False)
class Dataset:
    graph: Graph
    nodes: NodeTable
    task_id: str
    config: "GenConfig | None" = None
    seed: int = 0

    def __post_init__(self):
        if self.task_id not in TASK_IDS:
            raise InputError(f"unknown task id {self.task_id!r}")
        if len(self.nodes) != self.graph.num_nodes:
            raise InputError("node table size does not match the graph")

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes

    @property
    def num_classes(self) -> int:
        return self.nodes.num_classes

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.task_id == other.task_id and self.seed == other.seed
                and self.config == other.config
                and self.graph == other.graph and self.nodes == other.nodes)


@dataclass(frozen=True)
class Split:
    """Disjoint train / validation / test node id arrays."""

    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, Split):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in
                   ((self.train, other.train), (self.validation, other.validation),
                    (self.test, other.test)))

    def sizes(self) -> tuple[int, int, int]:
        return len(self.train), len(self.validation), len(self.test)


@dataclass
class Violation:
    node: int | None
    rule: str
    detail: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_node(graph: Graph, u) -> None:
    if not (0 <= int(u) < graph.num_nodes):
        raise InputError(f"node id {u} out of range 0..{graph.num_nodes - 1}")


def degree(graph: Graph, u: int) -> int:
    _check_node(graph, u)
    return int(graph.indptr[u + 1] - graph.indptr[u])


def neighbor_label_histogram(graph: Graph, labels, u: int, num_classes: int | None = None) -> np.ndarray:
    """Counts of neighbour labels of ``u``; entry ``t-1`` counts label ``t``."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape[0] != graph.num_nodes:
        raise InputError("labels must cover all nodes")
    k = int(num_classes if num_classes is not None else labels.max())
    nb = graph.neighbors(u)
    return np.bincount(labels[nb] - 1, minlength=k)[:k].astype(np.int64)


def label_histograms(graph: Graph, labels, num_classes: int) -> np.ndarray:
    """``(n, K)`` matrix whose row ``u`` is :func:`neighbor_label_histogram` of ``u``."""
    labels = np.asarray(labels, dtype=np.int64)
    src = np.repeat(np.arange(graph.num_nodes), graph.degrees())
    out = np.zeros((graph.num_nodes, num_classes), dtype=np.int64)
    np.add.at(out, (src, labels[graph.indices] - 1), 1)
    return out


def triangle_counts(graph: Graph) -> np.ndarray:
    """Number of triangles through each node, by sorted-adjacency intersection.

    Each edge ``{u, v}`` with ``u < v`` contributes the common neighbours
    ``w > v``; every triangle is therefore found once and credited to its
    three corners.
    """
    adj = graph.adjacency_sets()
    counts = np.zeros(graph.num_nodes, dtype=np.int64)
    for u, v in graph.edges.tolist():
        if u == v:
            continue
        small, large = (adj[u], adj[v]) if len(adj[u]) < len(adj[v]) else (adj[v], adj[u])
        for w in small:
            if w > v and w in large:
                counts[u] += 1
                counts[v] += 1
                counts[w] += 1
    return counts


def validate_graph(graph: Graph) -> ValidationReport:
    """Check the simple-undirected invariants; an empty report means valid."""
    report = ValidationReport()
    e = graph.edges
    for u in np.flatnonzero(e[:, 0] == e[:, 1]).tolist():
        node = int(e[u, 0])
        report.violations.append(Violation(node, "self-loop", f"edge {{{node},{node}}}"))
    if e.shape[0] > 1:
        dup = np.flatnonzero((e[1:] == e[:-1]).all(axis=1))
        seen = set()
        for i in dup.tolist():
            pair = (int(e[i, 0]), int(e[i, 1]))
            if pair not in seen:
                seen.add(pair)
                report.violations.append(
                    Violation(pair[0], "parallel-edge", f"edge {{{pair[0]},{pair[1]}}} repeated"))
    adj = graph.adjacency_sets()
    for u in range(graph.num_nodes):
        for v in adj[u]:
            if u not in adj[v]:
                report.violations.append(Violation(u, "asymmetric", f"{v} in N({u}) but not vice versa"))
    if 2 * graph.num_edges != int(graph.degrees().sum()):
        report.violations.append(Violation(None, "degree-sum", "2|E| != sum of degrees"))
    return report
