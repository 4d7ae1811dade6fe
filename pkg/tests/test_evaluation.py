import numpy as np
import pytest

from seizurefit.errors import BadK
from seizurefit.evaluation import (
    EvalReport,
    ForestConfig,
    Metrics,
    confusion_metrics,
    cross_validate,
    kfold_split,
)
from seizurefit.gof import FeatureScaler


class TestKfold:
    def test_even_split(self):
        plan = kfold_split(100, 20, seed=1)
        sizes = [len(plan.fold_indices(f)) for f in range(20)]
        assert sizes == [5] * 20

    def test_66_rows_into_20_folds(self):
        plan = kfold_split(66, 20, seed=1)
        sizes = sorted(len(plan.fold_indices(f)) for f in range(20))
        assert sizes == [3] * 14 + [4] * 6

    def test_k_of_one_rejected(self):
        with pytest.raises(BadK):
            kfold_split(10, 1, seed=0)
        with pytest.raises(BadK):
            kfold_split(10, 11, seed=0)

    def test_partition_property(self):
        plan = kfold_split(57, 7, seed=3)
        seen = np.concatenate([plan.fold_indices(f) for f in range(7)])
        assert sorted(seen.tolist()) == list(range(57))

    def test_deterministic_and_seed_sensitive(self):
        a = kfold_split(40, 5, seed=4)
        b = kfold_split(40, 5, seed=4)
        c = kfold_split(40, 5, seed=5)
        np.testing.assert_array_equal(a.assignments, b.assignments)
        assert not np.array_equal(a.assignments, c.assignments)


class TestConfusionMetrics:
    def test_reference_counts_give_exact_rates(self):
        pred = np.array([1] * 46 + [0] * 4 + [0] * 48 + [1] * 2)
        actual = np.array([1] * 50 + [0] * 50)
        m = confusion_metrics(pred, actual)
        assert (m.tp, m.fn, m.tn, m.fp) == (46, 4, 48, 2)
        assert m.tpr == 0.92
        assert m.tnr == 0.96
        assert m.fpr == 0.04
        assert m.accuracy == 0.94

    def test_all_correct(self):
        m = confusion_metrics([1, 0, 1, 0], [1, 0, 1, 0])
        assert m.accuracy == 1.0

    def test_no_positives_leaves_tpr_undefined(self):
        m = confusion_metrics([0, 0, 1], [0, 0, 0])
        assert m.no_positives
        assert m.tpr is None
        assert m.tnr is not None

    def test_no_negatives_leaves_tnr_undefined(self):
        m = confusion_metrics([1, 1], [1, 1])
        assert m.no_negatives
        assert m.tnr is None and m.fpr is None

    def test_fpr_consistent_with_tnr(self):
        m = Metrics(tp=3, fn=2, tn=7, fp=5)
        assert m.fpr == pytest.approx(1.0 - m.tnr, abs=1e-15)


class TestCrossValidate:
    def test_deterministic(self, separable_features):
        cfg = ForestConfig(n_trees=20)
        a = cross_validate(separable_features, k=5, repeats=3, forest=cfg, seed=3)
        b = cross_validate(separable_features, k=5, repeats=3, forest=cfg, seed=3)
        assert a.to_dict() == b.to_dict()

    def test_separable_features_high_accuracy(self, separable_features):
        report = cross_validate(separable_features, k=20, repeats=10,
                                forest=ForestConfig(n_trees=100, m_try=2),
                                seed=0)
        assert report.summary()["accuracy"]["mean"] >= 0.95

    def test_every_row_tested_once_per_repeat(self, separable_features,
                                              monkeypatch):
        from seizurefit import evaluation
        tested = []
        orig = evaluation.kfold_split

        def spy(n, k, seed):
            plan = orig(n, k, seed)
            tested.append(plan.assignments.copy())
            return plan

        monkeypatch.setattr(evaluation, "kfold_split", spy)
        cross_validate(separable_features, k=4, repeats=2,
                       forest=ForestConfig(n_trees=5), seed=1)
        assert len(tested) == 2
        for assignments in tested:
            assert assignments.shape == (len(separable_features),)
            # partition: every row lands in exactly one fold
            assert set(assignments.tolist()) == {0, 1, 2, 3}

    def test_scaler_fit_on_training_rows_only(self, separable_features,
                                              monkeypatch):
        from seizurefit import evaluation
        from seizurefit.rng import derive_seed

        n = len(separable_features)
        k, repeats, seed = 4, 2, 11
        calls = []
        orig = FeatureScaler.from_array.__func__

        def spy(cls, X):
            calls.append(np.asarray(X).copy())
            return orig(cls, X)

        monkeypatch.setattr(FeatureScaler, "from_array", classmethod(spy))
        cross_validate(separable_features, k=k, repeats=repeats,
                       forest=ForestConfig(n_trees=5), seed=seed)
        assert len(calls) == repeats * k

        X = np.array([v.as_array() for v in separable_features])
        for r in range(repeats):
            assignments = kfold_split(n, k, derive_seed(seed, r, 0)).assignments
            for fold in range(k):
                got = calls[r * k + fold]
                expected = X[assignments != fold]
                np.testing.assert_array_equal(got, expected)

    def test_group_by_epoch_keeps_epochs_whole(self, separable_features,
                                               monkeypatch):
        from seizurefit import evaluation
        plans = []
        orig = evaluation._group_fold_assignments

        def spy(groups, k, seed):
            out = orig(groups, k, seed)
            plans.append(out.copy())
            return out

        monkeypatch.setattr(evaluation, "_group_fold_assignments", spy)
        cross_validate(separable_features, k=5, repeats=2,
                       forest=ForestConfig(n_trees=5), seed=2,
                       group_by_epoch=True)
        groups = np.array([v.epoch for v in separable_features])
        for assignments in plans:
            for g in np.unique(groups):
                folds = np.unique(assignments[groups == g])
                assert folds.size == 1

    def test_group_by_epoch_bad_k(self, separable_features):
        with pytest.raises(BadK):
            cross_validate(separable_features, k=200, repeats=1,
                           forest=ForestConfig(n_trees=5), seed=0,
                           group_by_epoch=True)

    def test_pooled_accuracy_is_count_ratio(self, separable_features):
        report = cross_validate(separable_features, k=5, repeats=2,
                                forest=ForestConfig(n_trees=10), seed=7)
        for m in report.repeats:
            assert m.n == len(separable_features)
            assert m.accuracy == (m.tp + m.tn) / m.n


class TestEvalReport:
    def test_summary_mean_sd(self):
        rep = EvalReport(repeats=[Metrics(46, 4, 48, 2), Metrics(48, 2, 46, 4)])
        s = rep.summary()
        assert s["accuracy"]["mean"] == pytest.approx(0.94)
        assert s["tpr"]["mean"] == pytest.approx((0.92 + 0.96) / 2)
        assert s["tpr"]["sd"] > 0

    def test_undefined_rates_survive_aggregation(self):
        rep = EvalReport(repeats=[Metrics(0, 0, 10, 0), Metrics(5, 0, 10, 0)])
        s = rep.summary()
        assert s["tpr"]["defined_repeats"] == 1
        assert s["tpr"]["mean"] == 1.0

    def test_json_and_csv_outputs(self, tmp_path):
        rep = EvalReport(repeats=[Metrics(46, 4, 48, 2)], config={"k": 20})
        rep.save(tmp_path / "report.json")
        rep.save_repeats_csv(tmp_path / "repeats.csv")
        text = (tmp_path / "repeats.csv").read_text()
        lines = text.strip().split("\n")
        assert lines[0] == "repeat,tp,fn,tn,fp,tpr,tnr,fpr,accuracy"
        assert lines[1].startswith("0,46,4,48,2,0.92,0.96,0.04,0.94")
        import json
        data = json.loads((tmp_path / "report.json").read_text())
        assert data["config"] == {"k": 20}
        assert data["per_repeat"][0]["tp"] == 46
