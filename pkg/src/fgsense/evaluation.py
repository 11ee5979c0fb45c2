"""Scoring protocol: class-balanced accuracy, macro F1, Cohen's kappa,
group-wise breakdowns, group pooling, and the leave-one-group-out harness.

Balanced accuracy is the unweighted mean of the two per-class recalls and
macro F1 the unweighted mean of the two per-class F1 scores. Recall,
precision, and F1 all return 0 when their denominator is 0, which keeps
macro averages NaN-free on degenerate folds.

Because it is unstated whether corpus-level results should be computed on
the pooled instance set or macro-averaged over groups, reports carry both
aggregations whenever group ids are available.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

import numpy as np

from .errors import (DimensionMismatch, EmptyInput, DegenerateMarginals,
                     KindMismatch, LengthMismatch, TooFewGroups)
from .store import BinaryLabel, FineLabel, InstanceRecord, Store, normalize_rows

# Published per-class instance counts of the released corpus, used by the
# `validate --corpus` integrity check.
EXPECTED_CORPUS_TOTAL = 111_423
EXPECTED_CLASS_COUNTS = {
    FineLabel.NonVocalNoise: 36_801,
    FineLabel.Television: 21_131,
    FineLabel.WearerSpeech: 19_461,
    FineLabel.NonWearerSpeech: 13_041,
    FineLabel.MixedSpeech: 2_600,
    FineLabel.TelephoneVoice: 1_903,
    FineLabel.AmbiguousSounds: 1_146,
    FineLabel.BabySounds: 688,
}


@dataclass(frozen=True)
class ConfusionMatrix2:
    """Binary confusion with foreground as the positive class."""

    tp_fg: int  # gold fg, predicted fg
    fn_fg: int  # gold fg, predicted bg
    tp_bg: int  # gold bg, predicted bg
    fn_bg: int  # gold bg, predicted fg

    @property
    def total(self) -> int:
        return self.tp_fg + self.fn_fg + self.tp_bg + self.fn_bg


@dataclass(frozen=True)
class EvalReport:
    balanced_accuracy: float
    macro_f1: float
    per_class_recall: tuple[float, float]  # (foreground, background)
    per_class_f1: tuple[float, float]
    confusion: ConfusionMatrix2
    group_breakdown: dict[str, tuple[float, float]] | None = None
    group_macro: tuple[float, float] | None = None  # mean over groups (ba, f1)

    def to_dict(self) -> dict:
        out = {
            "balanced_accuracy": self.balanced_accuracy,
            "macro_f1": self.macro_f1,
            "per_class": {
                "Foreground": {"recall": self.per_class_recall[0],
                               "f1": self.per_class_f1[0]},
                "Background": {"recall": self.per_class_recall[1],
                               "f1": self.per_class_f1[1]},
            },
            "confusion": {"tp_fg": self.confusion.tp_fg, "fn_fg": self.confusion.fn_fg,
                          "tp_bg": self.confusion.tp_bg, "fn_bg": self.confusion.fn_bg},
        }
        if self.group_breakdown is not None:
            out["groups"] = {g: {"balanced_accuracy": ba, "macro_f1": f1}
                             for g, (ba, f1) in sorted(self.group_breakdown.items())}
            out["group_macro"] = {"balanced_accuracy": self.group_macro[0],
                                  "macro_f1": self.group_macro[1]}
        return out


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def _class_metrics(conf: ConfusionMatrix2) -> tuple[tuple[float, float], tuple[float, float]]:
    recall_fg = _safe_div(conf.tp_fg, conf.tp_fg + conf.fn_fg)
    recall_bg = _safe_div(conf.tp_bg, conf.tp_bg + conf.fn_bg)
    precision_fg = _safe_div(conf.tp_fg, conf.tp_fg + conf.fn_bg)
    precision_bg = _safe_div(conf.tp_bg, conf.tp_bg + conf.fn_fg)
    f1_fg = _safe_div(2 * precision_fg * recall_fg, precision_fg + recall_fg)
    f1_bg = _safe_div(2 * precision_bg * recall_bg, precision_bg + recall_bg)
    return (recall_fg, recall_bg), (f1_fg, f1_bg)


def confusion_counts(gold: Sequence[BinaryLabel],
                     pred: Sequence[BinaryLabel]) -> ConfusionMatrix2:
    tp_fg = fn_fg = tp_bg = fn_bg = 0
    for g, p in zip(gold, pred):
        if g == BinaryLabel.Foreground:
            if p == BinaryLabel.Foreground:
                tp_fg += 1
            else:
                fn_fg += 1
        else:
            if p == BinaryLabel.Background:
                tp_bg += 1
            else:
                fn_bg += 1
    return ConfusionMatrix2(tp_fg=tp_fg, fn_fg=fn_fg, tp_bg=tp_bg, fn_bg=fn_bg)


def score(gold: Sequence[BinaryLabel], pred: Sequence[BinaryLabel],
          groups: Sequence[str] | None = None) -> EvalReport:
    """Class-balanced accuracy and macro F1, optionally broken down by group."""
    if len(gold) != len(pred):
        raise LengthMismatch(f"{len(gold)} gold labels vs {len(pred)} predictions")
    if len(gold) == 0:
        raise EmptyInput("nothing to score")
    if groups is not None and len(groups) != len(gold):
        raise LengthMismatch(f"{len(groups)} group ids vs {len(gold)} labels")

    conf = confusion_counts(gold, pred)
    recalls, f1s = _class_metrics(conf)

    breakdown = None
    group_macro = None
    if groups is not None:
        breakdown = {}
        for g in sorted(set(groups)):
            idx = [i for i, gi in enumerate(groups) if gi == g]
            sub = confusion_counts([gold[i] for i in idx], [pred[i] for i in idx])
            sub_recalls, sub_f1s = _class_metrics(sub)
            breakdown[g] = (float(np.mean(sub_recalls)), float(np.mean(sub_f1s)))
        group_macro = (float(np.mean([v[0] for v in breakdown.values()])),
                       float(np.mean([v[1] for v in breakdown.values()])))

    return EvalReport(
        balanced_accuracy=float(np.mean(recalls)),
        macro_f1=float(np.mean(f1s)),
        per_class_recall=recalls,
        per_class_f1=f1s,
        confusion=conf,
        group_breakdown=breakdown,
        group_macro=group_macro,
    )


def cohens_kappa(labels_a: Sequence[Hashable], labels_b: Sequence[Hashable]) -> float:
    """Chance-corrected agreement over any finite label set."""
    if len(labels_a) != len(labels_b):
        raise LengthMismatch(f"{len(labels_a)} vs {len(labels_b)} labels")
    n = len(labels_a)
    if n == 0:
        raise EmptyInput("kappa of empty sequences")
    p_o = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    count_a = Counter(labels_a)
    count_b = Counter(labels_b)
    p_e = sum(count_a[l] * count_b.get(l, 0) for l in count_a) / (n * n)
    if p_e == 1.0:
        if p_o == 1.0:
            return 1.0
        raise DegenerateMarginals("chance agreement is 1 but raters disagree")
    return (p_o - p_e) / (1.0 - p_e)


# ---------------------------------------------------------------------------
# group pooling and LOGO splits
# ---------------------------------------------------------------------------


def pool_groups(stores: Sequence[Store], group_ids: Sequence[str] | None = None) -> Store:
    """Concatenate stores (optionally restricted to given groups) into one.

    Row order is store order then row order, and instances are reindexed
    from 0. Foreground stays foreground for every pooled wearer because the
    binary projection is label-based, not wearer-based.
    """
    if not stores:
        raise EmptyInput("no stores to pool")
    if group_ids is not None and len(group_ids) == 0:
        raise EmptyInput("empty group selection")
    wanted = set(group_ids) if group_ids is not None else None

    dim = stores[0].dim
    kind = stores[0].kind
    blocks: list[np.ndarray] = []
    records: list[InstanceRecord] = []
    for s in stores:
        if s.dim != dim:
            raise DimensionMismatch(f"store dims differ: {s.dim} vs {dim}")
        if s.kind != kind:
            raise KindMismatch(f"store kinds differ: {s.kind!r} vs {kind!r}")
        keep = [i for i, r in enumerate(s.records)
                if wanted is None or r.group_id in wanted]
        if keep:
            blocks.append(s.matrix[keep])
            records.extend(s.records[i] for i in keep)
    if not blocks:
        raise EmptyInput("no instances match the requested groups")
    matrix = np.concatenate(blocks, axis=0)
    reindexed = [
        InstanceRecord(index=i, group_id=r.group_id, session=r.session,
                       fine_label=r.fine_label)
        for i, r in enumerate(records)
    ]
    return Store(matrix=matrix, records=reindexed, kind=kind)


def logo_splits(records: Sequence[InstanceRecord]) -> list[tuple[tuple[str, ...], str]]:
    """Leave-one-group-out folds: one per group, each group tested once."""
    groups = sorted({r.group_id for r in records})
    if len(groups) < 2:
        raise TooFewGroups(f"LOGO needs at least 2 groups, found {len(groups)}")
    return [(tuple(g for g in groups if g != test), test) for test in groups]


class NearestCentroidClassifier:
    """Trivial fit/predict baseline: cosine similarity to per-class mean.

    Ships so the LOGO harness is exercisable without any trained model; ties
    fall to Background, the majority class.
    """

    def __init__(self):
        self.centroids: dict[BinaryLabel, np.ndarray] = {}

    def fit(self, X: np.ndarray, y: Sequence[BinaryLabel]) -> "NearestCentroidClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = list(y)
        for label in (BinaryLabel.Foreground, BinaryLabel.Background):
            members = [i for i, yi in enumerate(y) if yi == label]
            if members:
                self.centroids[label] = X[members].mean(axis=0)
        if not self.centroids:
            raise EmptyInput("no training labels")
        return self

    def predict(self, X: np.ndarray) -> list[BinaryLabel]:
        X = normalize_rows(X)
        labels = list(self.centroids.keys())
        cents = normalize_rows(np.stack([self.centroids[l] for l in labels]))
        sims = X @ cents.T
        out = []
        for row in sims:
            best = float(row.max())
            # tie -> Background when it is among the argmaxes
            winners = [labels[i] for i in range(len(labels)) if row[i] == best]
            out.append(BinaryLabel.Background if BinaryLabel.Background in winners
                       else winners[0])
        return out


@dataclass(frozen=True)
class LogoResult:
    fold_reports: dict[str, EvalReport]  # test group -> report
    mean_balanced_accuracy: float
    mean_macro_f1: float


def run_logo(store: Store,
             make_classifier: Callable[[], NearestCentroidClassifier] | None = None) -> LogoResult:
    """Train on all-but-one group, evaluate on the held-out group, repeat.

    The global result is the unweighted mean of the per-fold metrics. Any
    object with the fit/predict contract can be plugged in.
    """
    factory = make_classifier or NearestCentroidClassifier
    golds = store.binary_labels()
    groups = store.group_ids()
    reports: dict[str, EvalReport] = {}
    for train_groups, test_group in logo_splits(store.records):
        train_idx = [i for i, g in enumerate(groups) if g != test_group]
        test_idx = [i for i, g in enumerate(groups) if g == test_group]
        clf = factory()
        clf.fit(store.matrix[train_idx], [golds[i] for i in train_idx])
        pred = clf.predict(store.matrix[test_idx])
        reports[test_group] = score([golds[i] for i in test_idx], pred)
    return LogoResult(
        fold_reports=reports,
        mean_balanced_accuracy=float(np.mean(
            [r.balanced_accuracy for r in reports.values()])),
        mean_macro_f1=float(np.mean([r.macro_f1 for r in reports.values()])),
    )


def validate_corpus_counts(records: Sequence[InstanceRecord]) -> list[str]:
    """Check records against the released-corpus totals; [] means clean."""
    problems = []
    if len(records) != EXPECTED_CORPUS_TOTAL:
        problems.append(
            f"total instances {len(records)} != expected {EXPECTED_CORPUS_TOTAL}")
    counts = Counter(r.fine_label for r in records)
    for label, expected in EXPECTED_CLASS_COUNTS.items():
        got = counts.get(label, 0)
        if got != expected:
            problems.append(f"{label.value}: {got} instances != expected {expected}")
    return problems
