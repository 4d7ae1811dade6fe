"""Repeated k-fold cross-validation and confusion-matrix metrics.

Rows are dealt to folds segment-wise, ignoring which epoch they came from;
`group_by_epoch=True` instead keeps every epoch's rows in one fold for
leakage-aware evaluation. Within a repeat the confusion counts are pooled
over folds (micro-averaged); rates are then aggregated as mean +- sd across
repeats. Feature scaling is refit on the training rows of every fold so the
held-out fold never leaks into normalization.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gof as gof_mod
from .errors import BadK
from .forest import Dataset, train_forest
from .rng import SplitMix64, derive_seed


@dataclass
class FoldPlan:
    """Row -> fold assignment; folds partition the rows, sizes differ by <= 1
    (exactly equal only when k divides n)."""

    k: int
    assignments: np.ndarray
    seed: int

    def fold_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)


def kfold_split(n: int, k: int, seed: int) -> FoldPlan:
    """Shuffle rows (seeded) and deal them round-robin into k folds."""
    if not 2 <= k <= n:
        raise BadK(f"k must be in [2, {n}], got {k}")
    rng = SplitMix64(seed)
    perm = list(range(n))
    # Fisher-Yates with the package RNG so fold plans are backend-independent
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    assignments = np.empty(n, dtype=np.int64)
    for pos, row in enumerate(perm):
        assignments[row] = pos % k
    return FoldPlan(k=k, assignments=assignments, seed=seed)


@dataclass
class Metrics:
    """Confusion counts with derived rates; positive class = seizure (1).

    Degenerate rates (no positives / no negatives in `actual`) are None, not
    0 or 1.
    """

    tp: int
    fn: int
    tn: int
    fp: int

    @property
    def n(self) -> int:
        return self.tp + self.fn + self.tn + self.fp

    @property
    def no_positives(self) -> bool:
        return self.tp + self.fn == 0

    @property
    def no_negatives(self) -> bool:
        return self.tn + self.fp == 0

    @property
    def tpr(self) -> float | None:
        return None if self.no_positives else self.tp / (self.tp + self.fn)

    @property
    def tnr(self) -> float | None:
        return None if self.no_negatives else self.tn / (self.tn + self.fp)

    @property
    def fpr(self) -> float | None:
        # fp/(tn+fp) == 1 - tnr, but the direct ratio is correctly rounded
        return None if self.no_negatives else self.fp / (self.tn + self.fp)

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fn": self.fn, "tn": self.tn, "fp": self.fp,
                "tpr": self.tpr, "tnr": self.tnr, "fpr": self.fpr,
                "accuracy": self.accuracy}


def confusion_metrics(predicted, actual) -> Metrics:
    """Counts and rates from paired class vectors."""
    predicted = np.asarray(predicted, dtype=np.int64)
    actual = np.asarray(actual, dtype=np.int64)
    if predicted.shape != actual.shape:
        raise ValueError("predicted and actual lengths differ")
    if predicted.size < 1:
        raise ValueError("need at least one prediction")
    tp = int(np.sum((predicted == 1) & (actual == 1)))
    fn = int(np.sum((predicted == 0) & (actual == 1)))
    tn = int(np.sum((predicted == 0) & (actual == 0)))
    fp = int(np.sum((predicted == 1) & (actual == 0)))
    return Metrics(tp=tp, fn=fn, tn=tn, fp=fp)


@dataclass
class ForestConfig:
    n_trees: int = 100
    m_try: int = 2
    min_node_size: int = 1
    max_depth: int | None = None

    def to_dict(self) -> dict:
        return {"trees": self.n_trees, "m_try": self.m_try,
                "min_node_size": self.min_node_size,
                "max_depth": self.max_depth}


@dataclass
class EvalReport:
    """Per-repeat metrics plus mean/sd aggregates and a config snapshot."""

    repeats: list[Metrics]
    config: dict = field(default_factory=dict)

    def _rate_stats(self, name: str) -> tuple[float | None, float | None, int]:
        values = [getattr(m, name) for m in self.repeats]
        defined = [v for v in values if v is not None]
        if not defined:
            return None, None, 0
        mean = float(np.mean(defined))
        sd = float(np.std(defined, ddof=1)) if len(defined) > 1 else 0.0
        return mean, sd, len(defined)

    def summary(self) -> dict:
        out = {"repeats": len(self.repeats)}
        for name in ("tpr", "tnr", "fpr", "accuracy"):
            mean, sd, n_defined = self._rate_stats(name)
            out[name] = {"mean": mean, "sd": sd, "defined_repeats": n_defined}
        return out

    def to_dict(self) -> dict:
        return {"config": self.config,
                "per_repeat": [m.to_dict() for m in self.repeats],
                "summary": self.summary()}

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
                              newline="\n")

    def save_repeats_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["repeat", "tp", "fn", "tn", "fp",
                             "tpr", "tnr", "fpr", "accuracy"])
            for i, m in enumerate(self.repeats):
                writer.writerow([i, m.tp, m.fn, m.tn, m.fp,
                                 _fmt(m.tpr), _fmt(m.tnr), _fmt(m.fpr),
                                 _fmt(m.accuracy)])


def _fmt(value) -> str:
    return "" if value is None else repr(value)


def _group_fold_assignments(groups: np.ndarray, k: int, seed: int) -> np.ndarray:
    uniq = np.unique(groups)
    if k > uniq.size:
        raise BadK(f"k={k} exceeds the {uniq.size} distinct epochs")
    plan = kfold_split(uniq.size, k, seed)
    group_fold = {int(g): int(plan.assignments[i]) for i, g in enumerate(uniq)}
    return np.array([group_fold[int(g)] for g in groups], dtype=np.int64)


def cross_validate(features, k: int = 20, repeats: int = 25, *,
                   forest: ForestConfig | None = None, seed: int = 0,
                   group_by_epoch: bool = False) -> EvalReport:
    """Repeated k-fold CV of the forest over labeled feature vectors.

    For every fold the scaler and the forest are fit on the other k-1 folds
    only. Deterministic: fold plans and per-fold forest seeds all derive from
    `seed`. A training split that loses one class propagates
    SingleClassDataset.
    """
    if repeats < 1:
        raise BadK("repeats must be >= 1")
    forest = forest or ForestConfig()

    if isinstance(features, Dataset):
        X, y = features.X, features.y
        groups = np.arange(len(y))
    else:
        vectors = list(features)
        ds = Dataset.from_features(vectors)
        X, y = ds.X, ds.y
        groups = np.array([v.epoch for v in vectors], dtype=np.int64)
    n = X.shape[0]

    per_repeat = []
    for r in range(repeats):
        fold_seed = derive_seed(seed, r, 0)
        if group_by_epoch:
            assignments = _group_fold_assignments(groups, k, fold_seed)
        else:
            assignments = kfold_split(n, k, fold_seed).assignments
        tp = fn = tn = fp = 0
        for fold in range(k):
            test_idx = np.flatnonzero(assignments == fold)
            train_idx = np.flatnonzero(assignments != fold)
            if test_idx.size == 0:
                continue
            scaler = gof_mod.FeatureScaler.from_array(X[train_idx])
            model = train_forest(
                Dataset(scaler.transform_array(X[train_idx]), y[train_idx]),
                n_trees=forest.n_trees, m_try=forest.m_try,
                seed=derive_seed(seed, r, 1 + fold),
                min_node_size=forest.min_node_size,
                max_depth=forest.max_depth, compute_oob=False)
            pred = model.predict_rows(scaler.transform_array(X[test_idx]))
            actual = y[test_idx]
            tp += int(np.sum((pred == 1) & (actual == 1)))
            fn += int(np.sum((pred == 0) & (actual == 1)))
            tn += int(np.sum((pred == 0) & (actual == 0)))
            fp += int(np.sum((pred == 1) & (actual == 0)))
        per_repeat.append(Metrics(tp=tp, fn=fn, tn=tn, fp=fp))

    config = {"k": k, "repeats": repeats, "seed": seed,
              "group_by_epoch": group_by_epoch, "rows": n,
              "forest": forest.to_dict()}
    return EvalReport(repeats=per_repeat, config=config)
