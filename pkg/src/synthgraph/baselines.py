"""Structure-agnostic baselines and task-aware oracle classifiers.

Every model follows the same two-step protocol: ``fit(dataset, train_ids)``
returns a fitted copy, ``predict(dataset, node_ids)`` returns class ids.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, UnsupportedTaskError
from .graph import Dataset, Split, label_histograms, triangle_counts
from .metrics import discretize_features
from .taskgen import PARTNER, PhiRule, phi_apply

__all__ = ["Split", "EvalResult", "ModeClassifier", "BayesFeatureClassifier", "OracleClassifier",
           "mode_classifier", "bayes_feature_classifier", "oracle_classifier", "evaluate", "MODELS"]


def _majority(labels: np.ndarray) -> int:
    """Most frequent label; ties go to the lowest class id."""
    counts = np.bincount(labels)
    return int(np.argmax(counts))


class ModeClassifier:
    label_: int | None = None

    def fit(self, dataset: Dataset, train) -> "ModeClassifier":
        return mode_classifier(dataset.nodes.labels[np.asarray(train, dtype=np.int64)])

    def predict(self, dataset: Dataset | None, nodes) -> np.ndarray:
        if self.label_ is None:
            raise InputError("classifier is not fitted")
        return np.full(len(nodes), self.label_, dtype=np.int64)


def mode_classifier(train_labels) -> ModeClassifier:
    labels = np.asarray(train_labels, dtype=np.int64)
    if labels.size == 0:
        raise InputError("empty training set")
    model = ModeClassifier()
    model.label_ = _majority(labels)
    return model


class BayesFeatureClassifier:
    """Bin-wise majority vote on the unit-binned scalar feature.

    Unseen bins fall back to the global training mode. With a single feature
    this is the best any feature-only classifier can do on the training data.
    """

    def __init__(self):
        self.table_: dict[int, int] | None = None
        self.fallback_: int | None = None

    def fit(self, dataset: Dataset, train) -> "BayesFeatureClassifier":
        train = np.asarray(train, dtype=np.int64)
        return bayes_feature_classifier(dataset.nodes.features[train], dataset.nodes.labels[train])

    def predict_features(self, features) -> np.ndarray:
        if self.table_ is None:
            raise InputError("classifier is not fitted")
        bins = discretize_features(features)
        return np.array([self.table_.get(b, self.fallback_) for b in bins.tolist()], dtype=np.int64)

    def predict(self, dataset: Dataset, nodes) -> np.ndarray:
        return self.predict_features(dataset.nodes.features[np.asarray(nodes, dtype=np.int64)])


def bayes_feature_classifier(train_features, train_labels) -> BayesFeatureClassifier:
    labels = np.asarray(train_labels, dtype=np.int64)
    if labels.size == 0:
        raise InputError("empty training set")
    bins = discretize_features(train_features)
    if bins.shape != labels.shape:
        raise InputError("features and labels differ in length")
    model = BayesFeatureClassifier()
    model.fallback_ = _majority(labels)
    order = np.argsort(bins, kind="stable")
    bins, labels = bins[order], labels[order]
    starts = np.flatnonzero(np.r_[True, bins[1:] != bins[:-1]])
    ends = np.r_[starts[1:], bins.size]
    model.table_ = {int(bins[s]): _majority(labels[s:e]) for s, e in zip(starts, ends)}
    return model


@dataclass
class OracleClassifier:
    """Predicts each task's label from the signals its generator used.

    N tasks: recover neighbours' hidden states from their features (nearest
    mean for equal stds, Gaussian likelihood otherwise), count them and
    apply phi. S1: partner of any neighbour's label. S2: the label missing
    from the neighbourhood. S3: triangle count.
    """

    warnings: list[str] = field(default_factory=list)

    def fit(self, dataset: Dataset, train=None) -> "OracleClassifier":
        if dataset.task_id not in ("N1", "N2", "N3", "S1", "S2", "S3"):
            raise UnsupportedTaskError(f"no oracle for task {dataset.task_id!r}")
        return OracleClassifier(warnings=list(_oracle_warnings(dataset)))

    def predict(self, dataset: Dataset, nodes) -> np.ndarray:
        nodes = np.asarray(nodes, dtype=np.int64)
        return _oracle_labels(dataset)[nodes]


def oracle_classifier(dataset: Dataset) -> OracleClassifier:
    return OracleClassifier().fit(dataset)


def _oracle_warnings(dataset: Dataset):
    if dataset.task_id in ("N1", "N2", "N3") and dataset.config is not None:
        mu = np.asarray(dataset.config.gaussian_means)
        gap = np.min(np.abs(mu[:, None] - mu[None, :])[~np.eye(mu.size, dtype=bool)])
        if gap < 6 * max(dataset.config.gaussian_stds):
            yield f"Gaussian means only {gap:g} apart; hidden-state recovery may err"


def recover_hidden_states(features, means, stds) -> np.ndarray:
    x = np.asarray(features, dtype=np.float64)[:, None]
    mu = np.asarray(means, dtype=np.float64)[None, :]
    sd = np.asarray(stds, dtype=np.float64)[None, :]
    if np.all(sd == sd[0, 0]):
        score = -np.abs(x - mu)
    else:
        score = -0.5 * ((x - mu) / sd) ** 2 - np.log(sd)
    return np.argmax(score, axis=1).astype(np.int64) + 1


def _oracle_labels(dataset: Dataset) -> np.ndarray:
    task = dataset.task_id
    g = dataset.graph
    k = dataset.num_classes
    if task in ("N1", "N2", "N3"):
        cfg = dataset.config
        if cfg is None:
            raise InputError("neighbour-task oracle needs the generating config")
        hidden = recover_hidden_states(dataset.nodes.features, cfg.gaussian_means, cfg.gaussian_stds)
        counts = label_histograms(g, hidden, k)
        rule = {"N1": PhiRule.MOST_COMMON, "N2": PhiRule.LEAST_COMMON, "N3": PhiRule.PARITY}[task]
        out = np.empty(g.num_nodes, dtype=np.int64)
        for u, row in enumerate(counts):
            try:
                out[u] = phi_apply(rule, row)
            except ValueError:
                out[u] = 0  # ambiguous: counted as wrong
        return out
    labels = dataset.nodes.labels
    if task == "S1":
        out = np.zeros(g.num_nodes, dtype=np.int64)
        for u in range(g.num_nodes):
            nb = g.neighbors(u)
            if nb.size:
                out[u] = PARTNER[int(labels[nb[0]])]
        return out
    if task == "S2":
        hist = label_histograms(g, labels, k)
        out = np.zeros(g.num_nodes, dtype=np.int64)
        for u, row in enumerate(hist):
            missing = np.flatnonzero(row == 0)
            if missing.size == 1:
                out[u] = missing[0] + 1
        return out
    if task == "S3":
        return triangle_counts(g)
    raise UnsupportedTaskError(f"no oracle for task {task!r}")


@dataclass
class EvalResult:
    per_split_accuracy: list[float]
    mean: float
    std: float
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_accuracies(cls, accs, metadata=None) -> "EvalResult":
        accs = [float(a) for a in accs]
        mean = math.fsum(accs) / len(accs)
        std = float(np.std(accs, ddof=1)) if len(accs) > 1 else 0.0
        return cls(accs, mean, std, dict(metadata or {}))

    def as_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std,
                "per_split_accuracy": self.per_split_accuracy, **self.metadata}


def evaluate(model, dataset: Dataset, splits: list[Split]) -> EvalResult:
    """Fit on each train set, score on its test set; sample std across splits."""
    if not splits:
        raise InputError("no splits given")
    accs = []
    warnings: list[str] = []
    n = dataset.num_nodes
    for split in splits:
        parts = (split.train, split.validation, split.test)
        total = sum(len(p) for p in parts)
        if total != n or any(len(p) and (np.max(p) >= n or np.min(p) < 0) for p in parts):
            raise InputError(f"split covers {total} ids but dataset has {n} nodes")
        fitted = copy.deepcopy(model).fit(dataset, split.train)
        warnings.extend(w for w in getattr(fitted, "warnings", []) if w not in warnings)
        pred = fitted.predict(dataset, split.test)
        accs.append(float(np.mean(pred == dataset.nodes.labels[split.test])))
    meta = {"warnings": warnings} if warnings else {}
    return EvalResult.from_accuracies(accs, meta)


MODELS = {"mode": ModeClassifier, "bayes": BayesFeatureClassifier, "oracle": OracleClassifier}
