"""Bagged random-subspace decision trees over the four fit statistics.

The recursive partitioning inner loop lives in a compiled Cython kernel with a
pure-Python fallback selected at import time; both produce bit-identical trees
(seeded splitmix64, identical float expressions). Set SEIZUREFIT_BACKEND to
"pure" or "compiled" to force one; see benchmarks/bench_forest.py for the
speed comparison.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ConfigError, SingleClassDataset
from ..rng import GOLDEN, MASK64, derive_seed, splitmix_stream

_forced = os.environ.get("SEIZUREFIT_BACKEND")
if _forced == "pure":
    from . import _pure as _kernel
elif _forced == "compiled":
    from . import _speedups as _kernel  # noqa: F401 -- loudly fails if absent
elif _forced:
    raise ConfigError(f"SEIZUREFIT_BACKEND must be 'pure' or 'compiled', got {_forced!r}")
else:
    try:
        from . import _speedups as _kernel
    except ImportError:
        from . import _pure as _kernel

NON_SEIZURE = 0
SEIZURE = 1


def backend() -> str:
    """Name of the active tree kernel: 'compiled' or 'pure'."""
    return _kernel.name


def _as_matrix(X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("feature matrix must be 2-D")
    return X


def _sorted_orders(X: np.ndarray) -> np.ndarray:
    n, nf = X.shape
    out = np.empty(nf * n, dtype=np.int64)
    for f in range(nf):
        out[f * n:(f + 1) * n] = np.argsort(X[:, f], kind="stable")
    return out


@dataclass
class Dataset:
    """Labeled rows (feature vector, class) with classes in {0, 1}."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.X = _as_matrix(self.X)
        self.y = np.ascontiguousarray(self.y, dtype=np.int64)
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X and y row counts differ")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("non-finite feature value")
        if not np.all((self.y == 0) | (self.y == 1)):
            raise ValueError("classes must be 0 or 1")

    def __len__(self) -> int:
        return self.X.shape[0]

    @classmethod
    def from_features(cls, vectors) -> "Dataset":
        """Build a dataset from labeled FeatureVector objects."""
        X = np.array([v.as_array() for v in vectors], dtype=np.float64)
        y = np.array([v.label for v in vectors])
        if any(v.label is None for v in vectors):
            raise ValueError("all feature vectors must be labeled")
        return cls(X, y)


@dataclass
class Tree:
    """One fitted tree as parallel node arrays (node 0 is the root).

    feature[i] < 0 marks a leaf; left-subtree rows satisfy
    x[feature] < threshold. counts holds the (class-0, class-1) training row
    counts that reached each node, bootstrap multiplicity included.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_class: np.ndarray
    counts: np.ndarray

    @classmethod
    def _from_kernel(cls, nodes: dict) -> "Tree":
        return cls(
            feature=np.asarray(nodes["feature"], dtype=np.int64),
            threshold=np.asarray(nodes["threshold"], dtype=np.float64),
            left=np.asarray(nodes["left"], dtype=np.int64),
            right=np.asarray(nodes["right"], dtype=np.int64),
            leaf_class=np.asarray(nodes["leaf_class"], dtype=np.int64),
            counts=np.column_stack([
                np.asarray(nodes["count0"], dtype=np.int64),
                np.asarray(nodes["count1"], dtype=np.int64),
            ]),
        )

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    def predict_rows(self, X) -> np.ndarray:
        X = _as_matrix(X)
        out = _kernel.predict_rows(self.feature, self.threshold, self.left,
                                   self.right, self.leaf_class,
                                   X.reshape(-1), X.shape[0], X.shape[1])
        return np.asarray(out, dtype=np.int64)

    def predict(self, row) -> int:
        return int(self.predict_rows(np.asarray(row, dtype=np.float64).reshape(1, -1))[0])

    def to_dict(self, i: int = 0) -> dict:
        if self.feature[i] < 0:
            return {"leaf_class": int(self.leaf_class[i]),
                    "counts": [int(self.counts[i, 0]), int(self.counts[i, 1])]}
        return {
            "feature": int(self.feature[i]),
            "threshold": float(self.threshold[i]),
            "left": self.to_dict(int(self.left[i])),
            "right": self.to_dict(int(self.right[i])),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        nodes = {k: [] for k in ("feature", "threshold", "left", "right",
                                 "leaf_class", "count0", "count1")}

        def add(nd) -> int:
            idx = len(nodes["feature"])
            for k in nodes:
                nodes[k].append(0 if k != "threshold" else 0.0)
            if "leaf_class" in nd:
                nodes["feature"][idx] = -1
                nodes["left"][idx] = -1
                nodes["right"][idx] = -1
                nodes["leaf_class"][idx] = nd["leaf_class"]
                counts = nd.get("counts", [0, 0])
                nodes["count0"][idx] = counts[0]
                nodes["count1"][idx] = counts[1]
            else:
                nodes["feature"][idx] = nd["feature"]
                nodes["threshold"][idx] = nd["threshold"]
                nodes["left"][idx] = add(nd["left"])
                nodes["right"][idx] = add(nd["right"])
            return idx

        add(d)
        return cls._from_kernel(nodes)


def _bootstrap_counts(n: int, seed: int) -> np.ndarray:
    """Multiplicity of each row in the bootstrap sample SplitMix64(seed)
    draws (n draws of `below(n)`); zeros mark out-of-bag rows."""
    indices = splitmix_stream(seed, n) % np.uint64(n)
    return np.bincount(indices.astype(np.int64), minlength=n).astype(np.int64)


def bootstrap_sample(n: int, seed: int) -> tuple[list[int], list[int]]:
    """Draw n row indices with replacement; also return the out-of-bag set.

    Deterministic for a fixed seed. The forest trainer uses this exact stream
    per tree, so a tree is reproducible from its stored seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    indices = (splitmix_stream(seed, n) % np.uint64(n)).astype(np.int64)
    drawn = set(indices.tolist())
    oob = [i for i in range(n) if i not in drawn]
    return indices.tolist(), oob


def best_split(X, y, candidate_features: Sequence[int] | None = None,
               sample_indices: Sequence[int] | None = None):
    """Best Gini split among midpoint thresholds of the candidate features.

    Ties break toward the lower feature index, then the lower threshold.
    Returns (feature, threshold, impurity_decrease) or None when no split
    reduces impurity.
    """
    X = _as_matrix(X)
    y = np.ascontiguousarray(y, dtype=np.int64)
    n, nf = X.shape
    if candidate_features is None:
        candidates = list(range(nf))
    else:
        candidates = sorted(int(f) for f in candidate_features)
    if sample_indices is None:
        counts = np.ones(n, dtype=np.int64)
        total = n
    else:
        counts = np.bincount(np.asarray(sample_indices, dtype=np.int64),
                             minlength=n).astype(np.int64)
        total = len(sample_indices)
    return _kernel.best_split(X.reshape(-1), y, nf, _sorted_orders(X),
                              counts, total, candidates)


def train_tree(dataset: Dataset, sample_indices: Sequence[int], m_try: int,
               seed: int, *, min_node_size: int = 1,
               max_depth: int | None = None) -> Tree:
    """Fit one tree by recursive partitioning on the given sample.

    `seed` feeds the per-node feature subsampling stream (train_forest passes
    the post-bootstrap splitmix64 state here). Stops on max depth, node size
    <= min_node_size, purity, or when no split reduces impurity.
    """
    X, y = dataset.X, dataset.y
    n, nf = X.shape
    if not 1 <= m_try <= nf:
        raise ConfigError(f"m_try must be in [1, {nf}]")
    counts = np.bincount(np.asarray(sample_indices, dtype=np.int64),
                         minlength=n).astype(np.int64)
    nodes = _kernel.build_tree(
        X.reshape(-1), y, nf, _sorted_orders(X), counts, len(sample_indices),
        m_try, min_node_size, -1 if max_depth is None else max_depth, seed)
    return Tree._from_kernel(nodes)


@dataclass
class ForestModel:
    """Trained ensemble; predictions combine tree votes by majority,
    ties going to class 0 (non-seizure)."""

    trees: list[Tree]
    m_try: int
    seeds: list[int]
    min_node_size: int = 1
    max_depth: int | None = None
    master_seed: int | None = None
    oob_error: float | None = None

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def votes(self, X) -> np.ndarray:
        """Per-class vote counts, shape (n_rows, 2); row sums equal n_trees."""
        X = _as_matrix(X)
        out = np.zeros((X.shape[0], 2), dtype=np.int64)
        for tree in self.trees:
            pred = tree.predict_rows(X)
            out[pred == 0, 0] += 1
            out[pred == 1, 1] += 1
        return out

    def predict_rows(self, X) -> np.ndarray:
        v = self.votes(X)
        return (v[:, 1] > v[:, 0]).astype(np.int64)

    def predict(self, row) -> int:
        return int(self.predict_rows(np.asarray(row, dtype=np.float64).reshape(1, -1))[0])

    def to_dict(self) -> dict:
        return {
            "J": self.n_trees,
            "m_try": self.m_try,
            "seeds": list(self.seeds),
            "min_node_size": self.min_node_size,
            "max_depth": self.max_depth,
            "master_seed": self.master_seed,
            "oob_error": self.oob_error,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestModel":
        return cls(
            trees=[Tree.from_dict(t) for t in d["trees"]],
            m_try=d["m_try"],
            seeds=list(d["seeds"]),
            min_node_size=d.get("min_node_size", 1),
            max_depth=d.get("max_depth"),
            master_seed=d.get("master_seed"),
            oob_error=d.get("oob_error"),
        )

    def save(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ForestModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def train_forest(dataset: Dataset, n_trees: int = 100, m_try: int = 2,
                 seed: int = 0, *, min_node_size: int = 1,
                 max_depth: int | None = None, bootstrap: bool = True,
                 compute_oob: bool = True) -> ForestModel:
    """Train a bagged forest of n_trees trees.

    Each tree gets its own seed derived from `seed`, draws its own bootstrap
    sample, and subsamples m_try features at every split. The out-of-bag
    error votes each row over the trees whose bootstrap missed it (rows that
    are never out of bag are excluded; None if no row ever is).
    `bootstrap=False` is a debug mode training every tree on the full sample.
    """
    X, y = dataset.X, dataset.y
    n, nf = X.shape
    if n_trees < 1:
        raise ConfigError("n_trees must be >= 1")
    if not 1 <= m_try <= nf:
        raise ConfigError(f"m_try must be in [1, {nf}]")
    if len(np.unique(y)) < 2:
        raise SingleClassDataset("training data must contain both classes")

    xflat = X.reshape(-1)
    sorted_all = _sorted_orders(X)
    md = -1 if max_depth is None else max_depth
    seeds = [derive_seed(seed, j) for j in range(n_trees)]

    trees: list[Tree] = []
    oob_votes = np.zeros((n, 2), dtype=np.int64) if compute_oob else None
    for tree_seed in seeds:
        if bootstrap:
            counts = _bootstrap_counts(n, tree_seed)
            state = (tree_seed + n * GOLDEN) & MASK64  # stream state after n draws
        else:
            counts = np.ones(n, dtype=np.int64)
            state = tree_seed
        nodes = _kernel.build_tree(xflat, y, nf, sorted_all, counts, n,
                                   m_try, min_node_size, md, state)
        tree = Tree._from_kernel(nodes)
        trees.append(tree)
        if compute_oob:
            oob = np.flatnonzero(counts == 0)
            if oob.size:
                pred = tree.predict_rows(X[oob])
                oob_votes[oob[pred == 0], 0] += 1
                oob_votes[oob[pred == 1], 1] += 1

    oob_error = None
    if compute_oob:
        voted = oob_votes.sum(axis=1) > 0
        if voted.any():
            pred = (oob_votes[voted, 1] > oob_votes[voted, 0]).astype(np.int64)
            oob_error = float(np.mean(pred != y[voted]))
    return ForestModel(trees=trees, m_try=m_try, seeds=seeds,
                       min_node_size=min_node_size, max_depth=max_depth,
                       master_seed=seed, oob_error=oob_error)


def predict(model: ForestModel, row) -> int:
    """Majority vote over the ensemble for one feature vector."""
    return model.predict(row)
