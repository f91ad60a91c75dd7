"""Meta-evaluation statistics against human labels.

Binary-classifier metrics at a threshold, rank-based AUC, Pearson
correlation with a two-sided p-value (t distribution via an in-repo
regularized incomplete beta), a lexicographic threshold sweep,
precision-recall curves and Cohen's kappa.

All computations are pure Python for bit-stable results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence


class LengthMismatch(ValueError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class LabeledScores:
    scores: tuple[float, ...]
    labels: tuple[int, ...]
    item_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.scores) != len(self.labels):
            raise LengthMismatch(
                f"{len(self.scores)} scores vs {len(self.labels)} labels"
            )
        if len(self.scores) < 1:
            raise EmptyInput("need at least one item")
        if self.item_ids and len(self.item_ids) != len(self.scores):
            raise LengthMismatch("item_ids misaligned")

    @staticmethod
    def of(scores: Sequence[float], labels: Sequence[int], ids: Sequence[str] = ()):
        return LabeledScores(tuple(scores), tuple(labels), tuple(ids))

    @property
    def single_class(self) -> bool:
        return len(set(self.labels)) < 2


@dataclass(frozen=True)
class ClassifierReport:
    accuracy: float
    balanced_accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float
    threshold: float
    tp: int
    fp: int
    tn: int
    fn: int
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class CorrelationReport:
    pearson: float
    p_value: float
    n: int
    threshold: float | None = None
    flags: tuple[str, ...] = ()


# --- regularized incomplete beta and the t distribution ------------------

_BETACF_MAX_ITER = 300
_BETACF_EPS = 1e-15
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf_two_sided(t: float, df: float) -> float:
    """Two-sided tail probability P(|T| >= |t|) for df degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


# --- classifier metrics ---------------------------------------------------


def _average_ranks(scores: Sequence[float]) -> list[float]:
    order = sorted(range(len(scores)), key=lambda i: scores[i])
    ranks = [0.0] * len(scores)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def auc(data: LabeledScores) -> tuple[float, tuple[str, ...]]:
    """Rank-based (Mann-Whitney) AUC with average ranks for ties."""
    n_pos = sum(data.labels)
    n_neg = len(data.labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        return 0.5, ("auc_undefined_single_class",)
    ranks = _average_ranks(data.scores)
    rank_sum = sum(r for r, y in zip(ranks, data.labels) if y == 1)
    value = (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
    return value, ()


def classify_metrics(data: LabeledScores, threshold: float) -> ClassifierReport:
    tp = fp = tn = fn = 0
    for score, label in zip(data.scores, data.labels):
        pred = 1 if score > threshold else 0
        if pred and label:
            tp += 1
        elif pred and not label:
            fp += 1
        elif not pred and not label:
            tn += 1
        else:
            fn += 1
    n = len(data.labels)
    flags: list[str] = []
    accuracy = (tp + tn) / n
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    if tp + fp == 0:
        flags.append("no_positive_predictions")
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    if data.single_class:
        balanced = accuracy
        flags.append("single_class_labels")
    else:
        tpr = tp / (tp + fn)
        tnr = tn / (tn + fp)
        balanced = (tpr + tnr) / 2.0
    auc_value, auc_flags = auc(data)
    flags.extend(auc_flags)
    return ClassifierReport(
        accuracy=accuracy,
        balanced_accuracy=balanced,
        precision=precision,
        recall=recall,
        f1=f1,
        auc=auc_value,
        threshold=threshold,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        flags=tuple(flags),
    )


# --- correlation ----------------------------------------------------------


def pearson_with_p(
    data_x: Sequence[float], data_y: Sequence[float]
) -> CorrelationReport:
    if len(data_x) != len(data_y):
        raise LengthMismatch(f"{len(data_x)} vs {len(data_y)}")
    n = len(data_x)
    if n < 3:
        raise ValueError("need n >= 3 for a p-value")
    mean_x = sum(data_x) / n
    mean_y = sum(data_y) / n
    sxx = sum((x - mean_x) ** 2 for x in data_x)
    syy = sum((y - mean_y) ** 2 for y in data_y)
    if sxx == 0.0 or syy == 0.0:
        return CorrelationReport(
            pearson=0.0, p_value=1.0, n=n, flags=("degenerate_variance",)
        )
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(data_x, data_y))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = student_t_sf_two_sided(t, n - 2)
    return CorrelationReport(pearson=r, p_value=p, n=n)


def sweep_threshold(
    data: LabeledScores, human_binary: Sequence[int]
) -> tuple[float, CorrelationReport]:
    """Pick the binarization threshold that lexicographically minimizes the
    p-value, then maximizes Pearson r; ties go to the lower threshold."""
    if len(human_binary) != len(data.scores):
        raise LengthMismatch("human labels misaligned")
    distinct = sorted(set(data.scores))
    candidates = [float("-inf")]
    candidates += [(a + b) / 2.0 for a, b in zip(distinct, distinct[1:])]
    candidates.append(float("inf"))
    best: tuple[float, float, float] | None = None
    best_report: CorrelationReport | None = None
    best_threshold = candidates[0]
    for thr in candidates:
        binarized = [1.0 if s > thr else 0.0 for s in data.scores]
        report = pearson_with_p(binarized, [float(y) for y in human_binary])
        key = (report.p_value, -report.pearson, thr)
        if best is None or key < best:
            best = key
            best_report = report
            best_threshold = thr
    assert best_report is not None
    return best_threshold, CorrelationReport(
        pearson=best_report.pearson,
        p_value=best_report.p_value,
        n=best_report.n,
        threshold=best_threshold,
        flags=best_report.flags,
    )


def precision_recall_curve(
    data: LabeledScores,
) -> list[tuple[float, float, float]]:
    """(threshold, precision, recall) points, one per distinct score plus a
    -inf sentinel, sorted by recall descending."""
    thresholds = [float("-inf")] + sorted(set(data.scores))
    points = []
    for thr in thresholds:
        report = classify_metrics(data, thr)
        points.append((thr, report.precision, report.recall))
    points.sort(key=lambda p: (-p[2], p[0]))
    return points


# --- agreement ------------------------------------------------------------


def cohens_kappa(ratings_a: Sequence, ratings_b: Sequence) -> float:
    if len(ratings_a) != len(ratings_b):
        raise LengthMismatch(f"{len(ratings_a)} vs {len(ratings_b)}")
    if not ratings_a:
        raise EmptyInput("no ratings")
    n = len(ratings_a)
    p_o = sum(1 for a, b in zip(ratings_a, ratings_b) if a == b) / n
    categories = set(ratings_a) | set(ratings_b)
    p_e = 0.0
    for cat in categories:
        pa = sum(1 for a in ratings_a if a == cat) / n
        pb = sum(1 for b in ratings_b if b == cat) / n
        p_e += pa * pb
    if p_e == 1.0:
        return 1.0 if p_o == 1.0 else float("nan")
    return (p_o - p_e) / (1.0 - p_e)


def summary_label_from_sentences(sentence_labels: Sequence[int]) -> int:
    """A summary is unfaithful (0) iff any sentence label is 0."""
    if not sentence_labels:
        raise EmptyInput("no sentence labels")
    return 0 if any(y == 0 for y in sentence_labels) else 1
