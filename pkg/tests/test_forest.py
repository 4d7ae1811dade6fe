import numpy as np
import pytest

from oracles import gini_split_oracle
from seizurefit.errors import ConfigError, SingleClassDataset
from seizurefit.forest import (
    Dataset,
    ForestModel,
    Tree,
    backend,
    best_split,
    bootstrap_sample,
    train_forest,
    train_tree,
)
from seizurefit.gof import FeatureVector
from seizurefit.rng import SplitMix64


def blobs(seed, n_per_class=200, spread=0.08):
    rng = np.random.default_rng(seed)
    a = np.clip(rng.normal(0.3, spread, size=(n_per_class, 4)), 0.0, 1.0)
    b = np.clip(rng.normal(0.7, spread, size=(n_per_class, 4)), 0.0, 1.0)
    return Dataset(np.vstack([a, b]),
                   np.array([0] * n_per_class + [1] * n_per_class))


class TestBootstrap:
    def test_set_identities(self):
        indices, oob = bootstrap_sample(5, seed=123)
        assert len(indices) == 5
        assert all(0 <= i < 5 for i in indices)
        assert set(oob).isdisjoint(indices)
        assert set(oob) | set(indices) == set(range(5))

    def test_deterministic(self):
        assert bootstrap_sample(50, 9) == bootstrap_sample(50, 9)
        assert bootstrap_sample(50, 9) != bootstrap_sample(50, 10)

    def test_matches_scalar_stream(self):
        indices, _ = bootstrap_sample(37, seed=777)
        sm = SplitMix64(777)
        assert indices == [sm.below(37) for _ in range(37)]

    def test_oob_fraction_monte_carlo(self):
        # bounds frozen from a Monte-Carlo estimate; expected (1-1/n)^n ~ 0.366
        fracs = [len(bootstrap_sample(100, s)[1]) / 100.0 for s in range(10000)]
        assert 0.34 <= np.mean(fracs) <= 0.40


class TestBestSplit:
    def test_hand_enumerated_single_feature(self):
        # rows (0,c0) (1,c0) (2,c1) (3,c1): threshold 1.5 makes pure children,
        # decrease = parent gini 0.5
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([0, 0, 1, 1])
        f, thr, dec = best_split(X, y)
        assert f == 0
        assert thr == 1.5
        assert dec == pytest.approx(0.5, abs=1e-15)

    def test_pure_node_returns_none(self):
        X = np.array([[0.0], [1.0], [2.0]])
        assert best_split(X, np.zeros(3, dtype=int)) is None

    def test_identical_rows_different_classes(self):
        X = np.array([[0.5, 0.5], [0.5, 0.5]])
        assert best_split(X, np.array([0, 1])) is None

    def test_tie_breaks_to_lower_feature(self):
        # both features separate perfectly; feature 0 must win
        X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        y = np.array([0, 0, 1, 1])
        f, thr, _ = best_split(X, y)
        assert f == 0 and thr == 1.5

    def test_candidate_feature_restriction(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        y = np.array([0, 0, 1, 1])
        f, thr, _ = best_split(X, y, candidate_features=[1])
        assert f == 1 and thr == 1.5

    def test_matches_exact_oracle_on_random_instances(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(2, 30))
            X = np.round(rng.uniform(0, 1, size=(n, 2)), 1)
            y = rng.integers(0, 2, size=n)
            got = best_split(X, y)
            optimal, first, exact_dec = gini_split_oracle(X, y)
            if got is None:
                assert first is None
            else:
                assert (got[0], got[1]) in optimal
                assert got[2] == pytest.approx(float(exact_dec), rel=1e-12)


class TestTrainTree:
    def small(self):
        X = np.array([[0.1, 0.9, 0.5, 0.5],
                      [0.2, 0.8, 0.5, 0.5],
                      [0.8, 0.2, 0.5, 0.5],
                      [0.9, 0.1, 0.5, 0.5]])
        return Dataset(X, np.array([0, 0, 1, 1]))

    def test_separable_single_split(self):
        ds = self.small()
        tree = train_tree(ds, range(4), m_try=4, seed=0)
        assert tree.n_nodes == 3  # root + two pure leaves
        np.testing.assert_array_equal(tree.predict_rows(ds.X), ds.y)

    def test_single_row_is_leaf(self):
        ds = Dataset(np.array([[0.5, 0.5, 0.5, 0.5]]), np.array([1]))
        tree = train_tree(ds, [0], m_try=2, seed=3)
        assert tree.n_nodes == 1
        assert tree.predict([0.1, 0.2, 0.3, 0.4]) == 1

    def test_deterministic_structure(self):
        ds = blobs(1, n_per_class=40)
        t1 = train_tree(ds, range(80), m_try=2, seed=42)
        t2 = train_tree(ds, range(80), m_try=2, seed=42)
        np.testing.assert_array_equal(t1.feature, t2.feature)
        np.testing.assert_array_equal(t1.threshold, t2.threshold)

    def test_max_depth_zero_is_single_leaf(self):
        ds = self.small()
        tree = train_tree(ds, range(4), m_try=4, seed=0, max_depth=0)
        assert tree.n_nodes == 1

    def test_min_node_size_stops_splitting(self):
        ds = self.small()
        tree = train_tree(ds, range(4), m_try=4, seed=0, min_node_size=4)
        assert tree.n_nodes == 1

    def test_left_subtree_rows_satisfy_threshold(self):
        ds = blobs(2, n_per_class=50)
        tree = train_tree(ds, range(100), m_try=4, seed=1)
        root_f = int(tree.feature[0])
        assert root_f >= 0
        going_left = ds.X[:, root_f] < tree.threshold[0]
        assert going_left.any() and (~going_left).any()


class TestTrainForest:
    def test_oob_accuracy_on_separable_blobs(self):
        model = train_forest(blobs(0), n_trees=100, m_try=2, seed=0)
        assert model.oob_error is not None
        assert 1.0 - model.oob_error >= 0.95

    def test_single_tree_vote_is_that_tree(self):
        ds = blobs(3, n_per_class=30)
        model = train_forest(ds, n_trees=1, m_try=2, seed=5)
        probe = ds.X[:7]
        np.testing.assert_array_equal(model.predict_rows(probe),
                                      model.trees[0].predict_rows(probe))

    def test_single_class_rejected(self):
        X = np.random.default_rng(0).uniform(size=(20, 4))
        with pytest.raises(SingleClassDataset):
            train_forest(Dataset(X, np.zeros(20, dtype=int)))

    def test_determinism_across_runs(self):
        ds = blobs(4, n_per_class=60)
        probe = np.random.default_rng(1).uniform(size=(50, 4))
        a = train_forest(ds, n_trees=30, m_try=2, seed=9)
        b = train_forest(ds, n_trees=30, m_try=2, seed=9)
        assert a.seeds == b.seeds
        assert a.oob_error == b.oob_error
        np.testing.assert_array_equal(a.predict_rows(probe),
                                      b.predict_rows(probe))

    def test_vote_count_equals_tree_count(self):
        ds = blobs(5, n_per_class=30)
        model = train_forest(ds, n_trees=17, m_try=2, seed=2)
        votes = model.votes(ds.X[:5])
        np.testing.assert_array_equal(votes.sum(axis=1), 17)

    def test_full_data_debug_mode_memorizes(self):
        # no bootstrap, all features, unlimited depth: training accuracy 1
        # whenever no identical rows carry different labels
        ds = blobs(6, n_per_class=50, spread=0.2)
        model = train_forest(ds, n_trees=1, m_try=4, seed=0, bootstrap=False)
        np.testing.assert_array_equal(model.predict_rows(ds.X), ds.y)

    def test_mtry_validation(self):
        with pytest.raises(ConfigError):
            train_forest(blobs(0, n_per_class=10), m_try=5)

    def test_forest_from_feature_vectors(self):
        vectors = [FeatureVector(0.1 * i, 0.2, 0.3, 0.4, label=i % 2)
                   for i in range(10)]
        ds = Dataset.from_features(vectors)
        assert len(ds) == 10
        assert ds.X.shape == (10, 4)


class TestPredict:
    def leaf(self, cls):
        return {"leaf_class": cls, "counts": [1, 1]}

    def manual_model(self, leaf_classes):
        trees = [Tree.from_dict(self.leaf(c)) for c in leaf_classes]
        return ForestModel(trees=trees, m_try=2, seeds=[0] * len(trees))

    def test_majority_vote(self):
        model = self.manual_model([1, 1, 0])
        assert model.predict([0.5, 0.5, 0.5, 0.5]) == 1

    def test_tie_goes_to_non_seizure(self):
        model = self.manual_model([1, 0])
        assert model.predict([0.5, 0.5, 0.5, 0.5]) == 0

    def test_single_tree(self):
        model = self.manual_model([1])
        assert model.predict([0.5, 0.5, 0.5, 0.5]) == 1


class TestPersistence:
    def test_json_round_trip_preserves_predictions(self, tmp_path):
        ds = blobs(7, n_per_class=40)
        model = train_forest(ds, n_trees=20, m_try=2, seed=3)
        path = tmp_path / "model.json"
        model.save(path)
        loaded = ForestModel.load(path)
        assert loaded.m_try == model.m_try
        assert loaded.seeds == model.seeds
        assert loaded.oob_error == model.oob_error
        probe = np.random.default_rng(2).uniform(size=(100, 4))
        np.testing.assert_array_equal(loaded.predict_rows(probe),
                                      model.predict_rows(probe))

    def test_schema_keys(self, tmp_path):
        ds = blobs(8, n_per_class=10)
        model = train_forest(ds, n_trees=2, m_try=2, seed=1)
        d = model.to_dict()
        assert set(d) >= {"J", "m_try", "seeds", "trees"}
        assert d["J"] == 2
        node = d["trees"][0]
        assert ("leaf_class" in node) or {"feature", "threshold", "left",
                                          "right"} <= set(node)


class TestBackendEquivalence:
    def test_backends_build_identical_trees(self):
        try:
            from seizurefit.forest import _speedups
        except ImportError:
            pytest.skip("compiled kernel not built")
        from seizurefit.forest import _pure

        rng = np.random.default_rng(0)
        for trial in range(30):
            n = int(rng.integers(2, 80))
            X = np.ascontiguousarray(np.round(rng.uniform(0, 1, (n, 4)), 2))
            y = rng.integers(0, 2, size=n).astype(np.int64)
            sm = SplitMix64(trial)
            idx = [sm.below(n) for _ in range(n)]
            counts = np.bincount(idx, minlength=n).astype(np.int64)
            sorted_all = np.empty(4 * n, dtype=np.int64)
            for f in range(4):
                sorted_all[f * n:(f + 1) * n] = np.argsort(X[:, f], kind="stable")
            args = (X.reshape(-1), y, 4, sorted_all, counts, n, 2, 1, -1,
                    sm.state)
            a = _pure.build_tree(*args)
            b = _speedups.build_tree(*args)
            assert a == b

    def test_backend_name_reported(self):
        assert backend() in ("pure", "compiled")
