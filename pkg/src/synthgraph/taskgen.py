"""Seed-deterministic generators for the six synthetic node classification tasks.

Neighbour-based tasks (N1-N3) draw a hidden state per node, emit a Gaussian
feature from it and compute the label from the hidden-state counts of the
node's neighbours. Structural tasks (S1-S3) draw labels first and then a
structure that encodes them; the feature is the node degree.

Randomness
----------
Every generation phase gets its own PCG64 stream derived from
``SeedSequence(seed, spawn_key=(phase_index,))`` with the indices in
:data:`PHASES`. New phases are appended with new indices, so existing
streams are never perturbed.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousLabelError, GenerationError, InputError, UnsupportedTaskError
from .graph import (TASK_IDS, Dataset, Graph, NodeTable, Split, Violation, label_histograms,
                    triangle_counts, validate_graph)

PHASES = {
    "states": 0,     # hidden states (N) or labels (S)
    "features": 1,
    "edges": 2,
    "repair": 3,
    "forbidden": 4,
    "stubs": 5,
    "splits": 6,
}

PARTNER = {1: 4, 4: 1, 2: 3, 3: 2}
"""Cluster pairing of the easy multipartite task."""


def balanced_categorical(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Uniform class ids 1..k with every class used floor(n/k) or ceil(n/k) times.

    Each node's marginal is still uniform over the k classes; only the
    class totals are pinned, which removes size imbalance from the tasks.
    """
    counts = np.full(k, n // k)
    counts[rng.choice(k, n % k, replace=False)] += 1
    return rng.permutation(np.repeat(np.arange(1, k + 1), counts))


def phase_rng(seed: int, phase: str) -> np.random.Generator:
    if seed < 0 or seed >= 2 ** 64:
        raise InputError("seed must be a 64-bit unsigned integer")
    ss = np.random.SeedSequence(int(seed), spawn_key=(PHASES[phase],))
    return np.random.Generator(np.random.PCG64(ss))


class PhiRule(str, enum.Enum):
    MOST_COMMON = "most_common"
    LEAST_COMMON = "least_common"
    PARITY = "parity"


@dataclass(frozen=True)
class GenConfig:
    """Generation parameters.

    ``gaussian_means`` defaults to ``10 * k`` for state ``k`` and
    ``gaussian_stds`` to all ones; both are resolved at construction so the
    stored config is always explicit.
    """

    num_nodes: int = 1600
    target_avg_degree: float = 21.0
    num_states: int = 4
    gaussian_means: tuple[float, ...] | None = None
    gaussian_stds: tuple[float, ...] | None = None
    max_resample_attempts: int = 10000
    seed: int = 0

    def __post_init__(self):
        k = int(self.num_states)
        if k < 2:
            raise InputError("num_states must be at least 2")
        if self.num_nodes < k:
            raise InputError("num_nodes must be at least num_states")
        if self.target_avg_degree < 0:
            raise InputError("target_avg_degree must be non-negative")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise InputError("seed must be a 64-bit unsigned integer")
        means = self.gaussian_means
        stds = self.gaussian_stds
        means = tuple(10.0 * s for s in range(1, k + 1)) if means is None else tuple(float(m) for m in means)
        stds = (1.0,) * k if stds is None else tuple(float(s) for s in stds)
        if len(means) != k or len(stds) != k:
            raise InputError("gaussian_means and gaussian_stds need one entry per state")
        if min(stds) <= 0:
            raise InputError("gaussian_stds must be strictly positive")
        object.__setattr__(self, "num_nodes", int(self.num_nodes))
        object.__setattr__(self, "num_states", k)
        object.__setattr__(self, "target_avg_degree", float(self.target_avg_degree))
        object.__setattr__(self, "gaussian_means", means)
        object.__setattr__(self, "gaussian_stds", stds)

    def replace(self, **changes) -> "GenConfig":
        if "num_states" in changes:
            changes.setdefault("gaussian_means", None)
            changes.setdefault("gaussian_stds", None)
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["gaussian_means"] = list(self.gaussian_means)
        d["gaussian_stds"] = list(self.gaussian_stds)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "GenConfig":
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - fields
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        for key in ("gaussian_means", "gaussian_stds"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        return cls(**data)


def default_config(task_id: str, **overrides) -> GenConfig:
    """Defaults for a task: 1600 nodes, degree 21 (6 for S3), K=4 (2 for N3)."""
    if task_id not in TASK_IDS:
        raise InputError(f"unknown task id {task_id!r}")
    base = {"num_states": 2 if task_id == "N3" else 4,
            "target_avg_degree": 6.0 if task_id == "S3" else 21.0}
    base.update({k: v for k, v in overrides.items() if v is not None})
    return GenConfig(**base)


# -- phi -------------------------------------------------------------------

def count_hidden_states(graph: Graph, hidden_states, u: int, num_states: int) -> np.ndarray:
    hs = np.asarray(hidden_states, dtype=np.int64)
    return np.bincount(hs[graph.neighbors(u)] - 1, minlength=num_states)[:num_states]


def phi_apply(rule: PhiRule | str, counts) -> int:
    """Map a hidden-state count vector to a class id (1-based). Never breaks ties."""
    rule = PhiRule(rule)
    h = np.asarray(counts, dtype=np.int64)
    if h.ndim != 1 or (h < 0).any():
        raise InputError("counts must be a non-negative vector")
    if rule is PhiRule.PARITY:
        if h.shape[0] != 2:
            raise InputError("parity needs exactly two states")
        return int(h[1] % 2) + 1
    target = h.max() if rule is PhiRule.MOST_COMMON else h.min()
    hits = np.flatnonzero(h == target)
    if hits.size != 1:
        raise AmbiguousLabelError(f"{rule.value}: states {(hits + 1).tolist()} tie at {int(target)}")
    return int(hits[0]) + 1


def _apply_rule_rows(rule: PhiRule, counts: np.ndarray) -> np.ndarray:
    return np.array([phi_apply(rule, row) for row in counts], dtype=np.int64)


# -- edge sampling ---------------------------------------------------------

def _target_edges(config: GenConfig) -> int:
    return int(round(config.num_nodes * config.target_avg_degree / 2.0))


def _sample_edges(rng: np.random.Generator, n: int, m: int, accept=None,
                  adj: list[set[int]] | None = None) -> list[set[int]]:
    """Add ``m`` distinct uniform random pairs to ``adj``.

    ``accept(u, v)`` is a vectorized predicate; rejected pairs, self-loops
    and duplicates are redrawn.
    """
    if adj is None:
        adj = [set() for _ in range(n)]
    if m > n * (n - 1) // 2:
        raise GenerationError(f"cannot place {m} edges on {n} nodes")
    added = 0
    stalls = 0
    while added < m:
        batch = max(64, 2 * (m - added))
        u = rng.integers(0, n, batch)
        v = rng.integers(0, n, batch)
        ok = u != v
        if accept is not None:
            ok &= accept(u, v)
        before = added
        for a, b in zip(u[ok].tolist(), v[ok].tolist()):
            if b in adj[a]:
                continue
            adj[a].add(b)
            adj[b].add(a)
            added += 1
            if added == m:
                break
        stalls = stalls + 1 if added == before else 0
        if stalls > 50:
            raise GenerationError("edge sampler stalled: no admissible pairs left")
    return adj


def _graph_from_adj(adj: list[set[int]]) -> Graph:
    edges = [(u, v) for u, nb in enumerate(adj) for v in nb if u < v]
    return Graph(len(adj), np.array(edges, dtype=np.int64).reshape(-1, 2))


# -- neighbour-based process -----------------------------------------------

def _break_argmax_ties(rng, adj, hidden, counts, max_attempts) -> None:
    """Rewire one incident edge of each tied node until every argmax is unique."""
    n = len(adj)
    attempts = 0

    def tied_nodes():
        mx = counts.max(axis=1)
        return np.flatnonzero((counts == mx[:, None]).sum(axis=1) > 1)

    pending = tied_nodes()
    while pending.size:
        for u in pending.tolist():
            row = counts[u]
            if (row == row.max()).sum() == 1:
                continue
            if attempts >= max_attempts:
                raise GenerationError(
                    f"most_common: argmax ties remain after {max_attempts} resampling attempts")
            attempts += 1
            hu = hidden[u] - 1
            if adj[u]:
                nb = sorted(adj[u])
                v = nb[int(rng.integers(len(nb)))]
                adj[u].discard(v)
                adj[v].discard(u)
                counts[u, hidden[v] - 1] -= 1
                counts[v, hu] -= 1
            else:
                v = -1
            while True:
                w = int(rng.integers(n))
                if w != u and w != v and w not in adj[u]:
                    break
            adj[u].add(w)
            adj[w].add(u)
            counts[u, hidden[w] - 1] += 1
            counts[w, hu] += 1
        pending = tied_nodes()


def _complete_absent_states(rng, adj, hidden, forbidden, counts, k) -> None:
    """Give each node edges to its extra absent states so exactly one stays absent."""
    n = len(adj)
    pools = {(s, t): np.flatnonzero((hidden == s) & (forbidden != t))
             for s in range(1, k + 1) for t in range(1, k + 1)}
    for u in range(n):
        for s in range(1, k + 1):
            if s == forbidden[u] or counts[u, s - 1] > 0:
                continue
            pool = pools[(s, hidden[u])]
            pool = pool[pool != u]
            if pool.size == 0:
                raise GenerationError(
                    f"least_common: no admissible neighbour of state {s} for node {u}")
            w = int(pool[rng.integers(pool.size)])
            adj[u].add(w)
            adj[w].add(u)
            counts[u, s - 1] += 1
            counts[w, hidden[u] - 1] += 1


def generate_neighbour_task(config: GenConfig, rule: PhiRule | str, task_id: str = "custom") -> Dataset:
    rule = PhiRule(rule)
    n, k = config.num_nodes, config.num_states
    if rule is PhiRule.PARITY and k != 2:
        raise InputError("parity needs num_states == 2")

    hidden = balanced_categorical(phase_rng(config.seed, "states"), n, k)
    means = np.asarray(config.gaussian_means)[hidden - 1]
    stds = np.asarray(config.gaussian_stds)[hidden - 1]
    features = phase_rng(config.seed, "features").normal(means, stds)

    m = _target_edges(config)
    edge_rng = phase_rng(config.seed, "edges")
    if rule is PhiRule.LEAST_COMMON:
        forbidden = phase_rng(config.seed, "forbidden").integers(1, k + 1, n)
        adj = _sample_edges(edge_rng, n, m,
                            accept=lambda u, v: (hidden[v] != forbidden[u]) & (hidden[u] != forbidden[v]))
    else:
        adj = _sample_edges(edge_rng, n, m)

    graph = _graph_from_adj(adj)
    counts = label_histograms(graph, hidden, k)
    repair_rng = phase_rng(config.seed, "repair")
    if rule is PhiRule.MOST_COMMON:
        _break_argmax_ties(repair_rng, adj, hidden, counts, config.max_resample_attempts)
        graph = _graph_from_adj(adj)
    elif rule is PhiRule.LEAST_COMMON:
        _complete_absent_states(repair_rng, adj, hidden, forbidden, counts, k)
        graph = _graph_from_adj(adj)
    counts = label_histograms(graph, hidden, k)

    labels = _apply_rule_rows(rule, counts)
    nodes = NodeTable(features=features, labels=labels, num_classes=k, hidden_states=hidden)
    return Dataset(graph=graph, nodes=nodes, task_id=task_id, config=config, seed=config.seed)


# -- structural process ----------------------------------------------------

def _structural_dataset(adj_or_graph, labels, k, task_id, config) -> Dataset:
    graph = adj_or_graph if isinstance(adj_or_graph, Graph) else _graph_from_adj(adj_or_graph)
    features = graph.degrees().astype(np.float64)
    nodes = NodeTable(features=features, labels=labels, num_classes=k)
    return Dataset(graph=graph, nodes=nodes, task_id=task_id, config=config, seed=config.seed)


def _fill_between(rng, adj, a_nodes, b_nodes, target, current) -> int:
    if target - current > a_nodes.size * b_nodes.size - current:
        raise GenerationError("cluster pair too small for the requested edge count")
    while current < target:
        u = int(a_nodes[rng.integers(a_nodes.size)])
        v = int(b_nodes[rng.integers(b_nodes.size)])
        if v in adj[u]:
            continue
        adj[u].add(v)
        adj[v].add(u)
        current += 1
    return current


def generate_multipartite_task(config: GenConfig, mode: str, task_id: str = "custom") -> Dataset:
    """Multipartite graph whose clusters are the labels.

    ``easy``: edges only inside the cluster pairs (1,4) and (2,3); both pairs
    receive the same number of edges so class degree mass is balanced.
    ``random``: uniform edges between distinct clusters, then every node
    missing a foreign label gets one edge to a random node of that label.
    """
    n, k = config.num_nodes, config.num_states
    labels = balanced_categorical(phase_rng(config.seed, "states"), n, k)
    edge_rng = phase_rng(config.seed, "edges")
    repair_rng = phase_rng(config.seed, "repair")
    m = _target_edges(config)
    members = {c: np.flatnonzero(labels == c) for c in range(1, k + 1)}

    if mode == "easy":
        if k != 4:
            raise InputError("easy multipartite mode needs num_states == 4")
        for c in range(1, 5):
            if members[c].size == 0:
                raise GenerationError(f"easy multipartite: cluster {c} is empty")
        adj: list[set[int]] = [set() for _ in range(n)]
        # no isolated nodes: the label must be readable from a neighbour
        for u in range(n):
            if not adj[u]:
                pool = members[PARTNER[int(labels[u])]]
                w = int(pool[repair_rng.integers(pool.size)])
                adj[u].add(w)
                adj[w].add(u)
        pair_edges = {p: sum(len(adj[u]) for u in members[p[0]]) for p in ((1, 4), (2, 3))}
        target = max(m // 2, *pair_edges.values())
        for (a, b), current in pair_edges.items():
            _fill_between(edge_rng, adj, members[a], members[b], target, current)
        return _structural_dataset(adj, labels, k, task_id, config)

    if mode != "random":
        raise InputError(f"unknown multipartite mode {mode!r}")
    adj = _sample_edges(edge_rng, n, m, accept=lambda u, v: labels[u] != labels[v])
    for u in range(n):
        seen = {int(labels[v]) for v in adj[u]}
        for c in range(1, k + 1):
            if c == labels[u] or c in seen:
                continue
            pool = members[c]
            if pool.size == 0:
                raise GenerationError(f"random multipartite: cluster {c} is empty")
            w = int(pool[repair_rng.integers(pool.size)])
            adj[u].add(w)
            adj[w].add(u)
    return _structural_dataset(adj, labels, k, task_id, config)


def _stable_triangle_core(graph: Graph, low: int, high: int) -> np.ndarray:
    """Node ids kept after repeatedly dropping nodes whose triangle count leaves [low, high]."""
    keep = np.arange(graph.num_nodes)
    sub = graph
    while True:
        t = triangle_counts(sub)
        ok = (t >= low) & (t <= high)
        if ok.all():
            return keep
        keep = keep[ok]
        sub = graph.subgraph(keep)


def generate_triangle_task(config: GenConfig, task_id: str = "custom") -> Dataset:
    """Clustered configuration model with per-node triangle counts as labels.

    Node ``u`` gets ``t_u = y_u`` triangle-corner stubs and ``s_u`` single
    stubs; shuffled triangle stubs are grouped in triples and single stubs in
    pairs. Self-loops and parallel edges are dropped, then nodes whose true
    triangle count falls outside 1..K are removed (repeating until stable)
    and the survivors are relabelled with their true count. The stub
    matching is redrawn, up to ``max_resample_attempts`` times, until at
    least 90% of the nodes survive.
    """
    n, k = config.num_nodes, config.num_states
    if k != 4:
        raise InputError("triangle task needs num_states == 4")
    labels = balanced_categorical(phase_rng(config.seed, "states"), n, k)
    tri = labels.copy()
    single = np.maximum(0, int(round(config.target_avg_degree)) - 2 * tri)

    fix_rng = phase_rng(config.seed, "repair")
    while tri.sum() % 3:
        pool = np.flatnonzero(tri < k)
        tri[pool[fix_rng.integers(pool.size)]] += 1
    if single.sum() % 2:
        single[fix_rng.integers(n)] += 1

    stub_rng = phase_rng(config.seed, "stubs")
    tri_ids = np.repeat(np.arange(n), tri)
    single_ids = np.repeat(np.arange(n), single)
    best = 0
    for _ in range(max(1, config.max_resample_attempts)):
        t_stubs = stub_rng.permutation(tri_ids).reshape(-1, 3)
        s_stubs = stub_rng.permutation(single_ids).reshape(-1, 2)
        edges = np.concatenate([t_stubs[:, [0, 1]], t_stubs[:, [1, 2]], t_stubs[:, [0, 2]], s_stubs])
        raw = Graph.from_edges(n, edges, simplify=True)
        keep = _stable_triangle_core(raw, 1, k)
        if keep.size >= 0.9 * n:
            break
        best = max(best, keep.size)
    else:
        raise GenerationError(
            f"triangle task: at most {best} of {n} nodes keep 1..{k} triangles after cleanup "
            f"(need 90%) in {config.max_resample_attempts} stub matchings")
    graph = raw.subgraph(keep)
    final_labels = triangle_counts(graph)
    return _structural_dataset(graph, final_labels, k, task_id, config)


# -- dispatch --------------------------------------------------------------

def generate_task(task_id: str, config: GenConfig | None = None) -> Dataset:
    if config is None:
        config = default_config(task_id)
    if task_id == "N1":
        return generate_neighbour_task(config, PhiRule.MOST_COMMON, task_id)
    if task_id == "N2":
        return generate_neighbour_task(config, PhiRule.LEAST_COMMON, task_id)
    if task_id == "N3":
        return generate_neighbour_task(config, PhiRule.PARITY, task_id)
    if task_id == "S1":
        return generate_multipartite_task(config, "easy", task_id)
    if task_id == "S2":
        return generate_multipartite_task(config, "random", task_id)
    if task_id == "S3":
        return generate_triangle_task(config, task_id)
    raise UnsupportedTaskError(f"no generator for task {task_id!r}")


# -- verification ----------------------------------------------------------

@dataclass
class VerificationReport:
    task_id: str
    violations: list[Violation] = dataclasses.field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def format(self, limit: int = 20) -> str:
        head = f"{self.task_id}: {'PASS' if self.passed else 'FAIL'} ({len(self.violations)} violations)"
        lines = [head]
        for v in self.violations[:limit]:
            lines.append(f"  node {v.node}: {v.rule}: {v.detail}")
        if len(self.violations) > limit:
            lines.append(f"  ... {len(self.violations) - limit} more")
        return "\n".join(lines)


def verify_task(dataset: Dataset) -> VerificationReport:
    """Check the dataset against the defining rule of its task."""
    task = dataset.task_id
    if task not in TASK_IDS:
        raise InputError(f"unknown task id {task!r}")
    report = VerificationReport(task, list(validate_graph(dataset.graph).violations))
    g = dataset.graph
    labels = dataset.nodes.labels
    k = dataset.num_classes
    bad = report.violations

    if task in ("N1", "N2", "N3"):
        hidden = dataset.nodes.hidden_states
        if hidden is None:
            bad.append(Violation(None, "missing-hidden-states", "neighbour task without hidden states"))
            return report
        counts = label_histograms(g, hidden, k)
        for u in range(g.num_nodes):
            row = counts[u]
            y = int(labels[u])
            if task == "N1":
                top = np.flatnonzero(row == row.max())
                if top.size != 1:
                    bad.append(Violation(u, "argmax-tie", f"H={row.tolist()}"))
                elif top[0] + 1 != y:
                    bad.append(Violation(u, "most-common", f"label {y}, argmax state {top[0] + 1}"))
            elif task == "N2":
                absent = np.flatnonzero(row == 0) + 1
                if absent.size != 1:
                    bad.append(Violation(u, "absent-states", f"{absent.size} absent states, H={row.tolist()}"))
                elif absent[0] != y:
                    bad.append(Violation(u, "least-common", f"label {y}, absent state {absent[0]}"))
            else:
                expected = int(row[1] % 2) + 1
                if expected != y:
                    bad.append(Violation(u, "parity", f"label {y}, H2={row[1]} gives {expected}"))
    elif task == "S1":
        for u in range(g.num_nodes):
            nb = set(labels[g.neighbors(u)].tolist())
            want = PARTNER.get(int(labels[u]))
            if not nb:
                bad.append(Violation(u, "isolated", "no neighbour carries the partner label"))
            elif nb != {want}:
                bad.append(Violation(u, "partner", f"label {labels[u]}, neighbour labels {sorted(nb)}"))
    elif task == "S2":
        for u in range(g.num_nodes):
            nb = set(labels[g.neighbors(u)].tolist())
            want = set(range(1, k + 1)) - {int(labels[u])}
            if nb != want:
                bad.append(Violation(u, "missing-label", f"label {labels[u]}, neighbour labels {sorted(nb)}"))
    elif task == "S3":
        t = triangle_counts(g)
        for u in np.flatnonzero(t != labels).tolist():
            bad.append(Violation(u, "triangles", f"label {labels[u]}, {t[u]} triangles"))
    return report


# -- splits ----------------------------------------------------------------

def make_splits(dataset_or_n, num_repetitions: int = 10, seed: int = 0) -> list[Split]:
    """Independent uniform 70/10/20 partitions (train and validation floored)."""
    n = dataset_or_n.num_nodes if isinstance(dataset_or_n, Dataset) else int(dataset_or_n)
    if n < 10:
        raise InputError("splits need at least 10 nodes")
    n_train, n_val = (7 * n) // 10, n // 10
    rng = phase_rng(seed, "splits")
    splits = []
    for _ in range(num_repetitions):
        perm = rng.permutation(n)
        splits.append(Split(train=np.sort(perm[:n_train]),
                            validation=np.sort(perm[n_train:n_train + n_val]),
                            test=np.sort(perm[n_train + n_val:])))
    return splits
