from __future__ import annotations

import numpy as np
import pytest

from fgsense.errors import (DimensionMismatch, EmptyInput, KindMismatch,
                            LengthMismatch, TooFewGroups)
from fgsense.evaluation import (EXPECTED_CLASS_COUNTS, NearestCentroidClassifier,
                                cohens_kappa, logo_splits, pool_groups,
                                run_logo, score, validate_corpus_counts)
from fgsense.store import (BinaryLabel, FineLabel, InstanceRecord, Session,
                           Store)
from fgsense.synth import SynthConfig, generate_embeddings

from reference_impl import naive_kappa, naive_score

FG = BinaryLabel.Foreground
BG = BinaryLabel.Background


def _labels(chars):
    return [FG if c == "F" else BG for c in chars]


def test_perfect_prediction():
    report = score(_labels("FFBB"), _labels("FFBB"))
    assert report.balanced_accuracy == 1.0
    assert report.macro_f1 == 1.0
    assert report.confusion.total == 4


def test_hand_computed_example():
    report = score(_labels("FFBB"), _labels("FBBB"))
    assert report.per_class_recall == (0.5, 1.0)
    assert report.balanced_accuracy == 0.75
    assert report.per_class_f1[0] == pytest.approx(2 / 3, abs=1e-12)
    assert report.per_class_f1[1] == pytest.approx(0.8, abs=1e-12)
    assert report.macro_f1 == pytest.approx(11 / 15, abs=1e-12)


def test_constant_background_predictor():
    report = score(_labels("FB"), _labels("BB"))
    assert report.balanced_accuracy == 0.5
    assert report.per_class_f1 == (0.0, pytest.approx(2 / 3, abs=1e-12))
    assert report.macro_f1 == pytest.approx(1 / 3, abs=1e-12)


def test_length_mismatch_and_empty():
    with pytest.raises(LengthMismatch):
        score(_labels("FB"), _labels("F"))
    with pytest.raises(EmptyInput):
        score([], [])
    with pytest.raises(LengthMismatch):
        score(_labels("FB"), _labels("FB"), groups=["g1"])


def test_relabeling_invariance():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(2, 60))
        gold = ["F" if rng.random() < 0.4 else "B" for _ in range(n)]
        pred = ["F" if rng.random() < 0.5 else "B" for _ in range(n)]
        a = score(_labels(gold), _labels(pred))
        swap = {"F": "B", "B": "F"}
        b = score(_labels([swap[g] for g in gold]), _labels([swap[p] for p in pred]))
        assert a.balanced_accuracy == pytest.approx(b.balanced_accuracy, abs=1e-12)
        assert a.macro_f1 == pytest.approx(b.macro_f1, abs=1e-12)


def test_perfect_metrics_iff_diagonal_confusion():
    rng = np.random.default_rng(9)
    for _ in range(40):
        n = int(rng.integers(2, 40))
        gold = ["F" if rng.random() < 0.5 else "B" for _ in range(n)]
        pred = [g if rng.random() < 0.8 else ("B" if g == "F" else "F")
                for g in gold]
        report = score(_labels(gold), _labels(pred))
        diagonal = report.confusion.fn_fg == 0 and report.confusion.fn_bg == 0
        both_present = "F" in gold and "B" in gold
        perfect = report.balanced_accuracy == 1.0 and report.macro_f1 == 1.0
        assert perfect == (diagonal and both_present)


def test_score_matches_bruteforce_oracle():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(1, 501))
        gold = ["F" if rng.random() < 0.3 else "B" for _ in range(n)]
        pred = ["F" if rng.random() < 0.5 else "B" for _ in range(n)]
        report = score(_labels(gold), _labels(pred))
        ba, f1, recalls, f1s = naive_score(gold, pred)
        assert report.balanced_accuracy == pytest.approx(ba, abs=1e-12)
        assert report.macro_f1 == pytest.approx(f1, abs=1e-12)
        assert report.per_class_recall == pytest.approx(recalls, abs=1e-12)
        assert report.per_class_f1 == pytest.approx(f1s, abs=1e-12)


def test_group_breakdown_and_macro():
    gold = _labels("FFBB" + "FB")
    pred = _labels("FBBB" + "FB")
    groups = ["a"] * 4 + ["b"] * 2
    report = score(gold, pred, groups=groups)
    assert set(report.group_breakdown) == {"a", "b"}
    assert report.group_breakdown["b"] == (1.0, 1.0)
    assert report.group_breakdown["a"][0] == 0.75
    assert report.group_macro[0] == pytest.approx((0.75 + 1.0) / 2, abs=1e-12)


# ---------------------------------------------------------------------------
# Cohen's kappa
# ---------------------------------------------------------------------------


def test_kappa_identical_sequences():
    assert cohens_kappa(["F", "B", "F"], ["F", "B", "F"]) == 1.0


def test_kappa_chance_level():
    assert cohens_kappa(list("FFBB"), list("FBFB")) == pytest.approx(0.0, abs=1e-12)


def test_kappa_hand_computed():
    # p_o = 3/4, p_e = 0.5 -> kappa = 0.5
    assert cohens_kappa(list("FFFB"), list("FFBB")) == pytest.approx(0.5, abs=1e-12)
    assert naive_kappa(list("FFFB"), list("FFBB")) == pytest.approx(0.5, abs=1e-12)


def test_kappa_constant_agreement():
    assert cohens_kappa(["x"] * 5, ["x"] * 5) == 1.0


def test_kappa_multiclass_matches_oracle():
    rng = np.random.default_rng(2)
    alphabet = ["a", "b", "c", "d"]
    for _ in range(30):
        n = int(rng.integers(2, 200))
        a = [alphabet[i] for i in rng.integers(0, 4, n)]
        b = [alphabet[i] for i in rng.integers(0, 4, n)]
        expected = naive_kappa(a, b)
        assert cohens_kappa(a, b) == pytest.approx(expected, abs=1e-12)


def test_kappa_length_and_empty():
    with pytest.raises(LengthMismatch):
        cohens_kappa(["a"], ["a", "b"])
    with pytest.raises(EmptyInput):
        cohens_kappa([], [])


# ---------------------------------------------------------------------------
# pooling and LOGO
# ---------------------------------------------------------------------------


def _group_store(group, n, seed, dim=8, kind="synthetic"):
    rng = np.random.default_rng(seed)
    records = [InstanceRecord(i, group, Session.Meal,
                              FineLabel.WearerSpeech if i % 4 == 0
                              else FineLabel.Television)
               for i in range(n)]
    return Store(matrix=rng.standard_normal((n, dim)).astype(np.float32),
                 records=records, kind=kind)


def test_pool_single_store_is_identity():
    store = _group_store("g01", 10, 0)
    merged = pool_groups([store])
    assert np.array_equal(merged.matrix, store.matrix)
    assert [r.group_id for r in merged.records] == ["g01"] * 10


def test_pool_two_stores_order_stable():
    a = _group_store("g01", 100, 0)
    b = _group_store("g02", 200, 1)
    merged = pool_groups([a, b])
    assert merged.n_instances == 300
    assert np.array_equal(merged.matrix[:100], a.matrix)
    assert np.array_equal(merged.matrix[100:], b.matrix)
    assert [r.index for r in merged.records] == list(range(300))
    assert [r.group_id for r in merged.records[:100]] == ["g01"] * 100


def test_pool_group_filter():
    a = _group_store("g01", 10, 0)
    b = _group_store("g02", 20, 1)
    merged = pool_groups([a, b], group_ids=["g02"])
    assert merged.n_instances == 20
    assert {r.group_id for r in merged.records} == {"g02"}


def test_pool_rejects_mismatches():
    with pytest.raises(DimensionMismatch):
        pool_groups([_group_store("a", 5, 0, dim=4), _group_store("b", 5, 1, dim=8)])
    with pytest.raises(KindMismatch):
        pool_groups([_group_store("a", 5, 0, kind="emb0"),
                     _group_store("b", 5, 1, kind="synthetic")])
    with pytest.raises(EmptyInput):
        pool_groups([])
    with pytest.raises(EmptyInput):
        pool_groups([_group_store("a", 5, 0)], group_ids=[])


def test_logo_splits_cover_each_group_once():
    records = [InstanceRecord(i, f"g{i % 18:02d}", Session.Meal,
                              FineLabel.WearerSpeech) for i in range(90)]
    folds = logo_splits(records)
    assert len(folds) == 18
    test_groups = [t for _, t in folds]
    assert sorted(test_groups) == sorted({r.group_id for r in records})
    for train, test in folds:
        assert test not in train
        assert len(train) == 17


def test_logo_two_groups():
    records = [InstanceRecord(i, "gA" if i < 3 else "gB", Session.Meal,
                              FineLabel.WearerSpeech) for i in range(6)]
    folds = logo_splits(records)
    assert folds == [(("gB",), "gA"), (("gA",), "gB")]


def test_logo_too_few_groups():
    records = [InstanceRecord(i, "only", Session.Meal, FineLabel.WearerSpeech)
               for i in range(4)]
    with pytest.raises(TooFewGroups):
        logo_splits(records)


def test_nearest_centroid_separable():
    rng = np.random.default_rng(3)
    X = np.vstack([rng.normal(0, 0.05, (20, 8)) + np.eye(8)[0],
                   rng.normal(0, 0.05, (20, 8)) + np.eye(8)[1]])
    y = [FG] * 20 + [BG] * 20
    clf = NearestCentroidClassifier().fit(X, y)
    assert clf.predict(X) == y


def test_pooled_groups_match_single_group_accuracy():
    from fgsense.clustering import ClusteringConfig, spectral
    from fgsense.labeling import assign_fg_bg
    from fgsense.store import pairwise_similarity

    def pipeline_ba(store, seed):
        sim = pairwise_similarity(store.matrix)
        result = assign_fg_bg(spectral(sim, ClusteringConfig(seed=seed)), store.matrix)
        return score(store.binary_labels(), result.predictions).balanced_accuracy

    stores = [generate_embeddings(SynthConfig(n_instances=300, dim=64, seed=s,
                                              group_id=f"g{s:02d}"))
              for s in (11, 12, 13)]
    singles = [pipeline_ba(st, s) for st, s in zip(stores, (11, 12, 13))]
    ba_two = pipeline_ba(pool_groups(stores[:2]), 99)
    ba_three = pipeline_ba(pool_groups(stores), 99)
    # pooling wearers must not disrupt detection
    assert abs(ba_two - np.mean(singles[:2])) <= 0.02
    assert abs(ba_three - np.mean(singles)) <= 0.02


def test_run_logo_on_synthetic_groups():
    stores = [generate_embeddings(SynthConfig(n_instances=120, dim=32, seed=s,
                                              group_id=f"g{s:02d}"))
              for s in (1, 2, 3)]
    merged = pool_groups(stores)
    result = run_logo(merged)
    assert set(result.fold_reports) == {"g01", "g02", "g03"}
    assert 0.0 <= result.mean_balanced_accuracy <= 1.0
    assert 0.0 <= result.mean_macro_f1 <= 1.0
    # separable synthetic structure: the baseline should beat chance clearly
    assert result.mean_balanced_accuracy > 0.8


def test_corpus_count_validation():
    records = []
    i = 0
    for fine, count in EXPECTED_CLASS_COUNTS.items():
        for _ in range(count // 100):  # scaled-down corpus: totals must fail
            records.append(InstanceRecord(i, "g00", Session.Meal, fine))
            i += 1
    problems = validate_corpus_counts(records)
    assert problems  # wrong total and wrong class counts are both reported
    assert any("total instances" in p for p in problems)
    assert any(FineLabel.NonVocalNoise.value in p for p in problems)
