import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from chartfaith.metaeval import (
    EmptyInput,
    LabeledScores,
    LengthMismatch,
    auc,
    classify_metrics,
    cohens_kappa,
    pearson_with_p,
    precision_recall_curve,
    regularized_incomplete_beta,
    student_t_sf_two_sided,
    summary_label_from_sentences,
    sweep_threshold,
)


# --- independent oracles --------------------------------------------------

def auc_pair_count(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    concordant = sum(1 for p in pos for n in neg if p > n)
    ties = sum(1 for p in pos for n in neg if p == n)
    return (concordant + 0.5 * ties) / (len(pos) * len(neg))


def t_two_sided_by_quadrature(t, df):
    def density(x):
        return (
            math.gamma((df + 1) / 2)
            / (math.sqrt(df * math.pi) * math.gamma(df / 2))
            * (1 + x * x / df) ** (-(df + 1) / 2)
        )

    tail, _ = quad(density, abs(t), math.inf)
    return 2 * tail


def phi_from_table(a, b, c, d):
    denom = math.sqrt((a + b) * (c + d) * (a + c) * (b + d))
    return (a * d - b * c) / denom


# --- classifier metrics ---------------------------------------------------

def test_noop_baseline_identities():
    labels = [1] * 60 + [0] * 40
    data = LabeledScores.of([1.0] * 100, labels)
    report = classify_metrics(data, 0.75)
    assert report.accuracy == pytest.approx(0.60, abs=1e-9)
    assert report.balanced_accuracy == pytest.approx(0.50, abs=1e-9)
    assert report.recall == pytest.approx(1.00, abs=1e-9)
    assert report.precision == pytest.approx(0.60, abs=1e-9)
    assert report.f1 == pytest.approx(0.75, abs=1e-9)
    assert report.auc == pytest.approx(0.50, abs=1e-9)


def test_perfect_classifier():
    labels = [0, 1, 1, 0, 1]
    data = LabeledScores.of([float(y) for y in labels], labels)
    report = classify_metrics(data, 0.5)
    for value in (report.accuracy, report.precision, report.recall, report.f1, report.auc):
        assert value == 1.0


def test_auc_matches_pair_counting():
    rng = random.Random(2024)
    for _ in range(50):
        n = rng.randrange(5, 200)
        labels = [rng.randrange(2) for _ in range(n)]
        if len(set(labels)) < 2:
            labels[0], labels[1] = 0, 1
        scores = [rng.choice([0.0, 0.25, 0.5, rng.random(), 1.0]) for _ in range(n)]
        data = LabeledScores.of(scores, labels)
        value, flags = auc(data)
        assert value == pytest.approx(auc_pair_count(scores, labels), abs=1e-9)
        assert flags == ()


def test_auc_constant_scores():
    data = LabeledScores.of([0.7] * 10, [1, 0] * 5)
    value, _ = auc(data)
    assert value == 0.5


def test_auc_single_class_flagged():
    data = LabeledScores.of([0.1, 0.9], [1, 1])
    value, flags = auc(data)
    assert value == 0.5
    assert "auc_undefined_single_class" in flags


def test_auc_monotone_transform_invariance():
    rng = random.Random(7)
    scores = [rng.random() for _ in range(60)]
    labels = [rng.randrange(2) for _ in range(60)]
    labels[0], labels[1] = 0, 1
    base, _ = auc(LabeledScores.of(scores, labels))
    warped, _ = auc(LabeledScores.of([math.exp(3 * s) for s in scores], labels))
    assert base == pytest.approx(warped, abs=1e-12)


@given(st.integers(1, 9))
def test_all_ones_identities_across_base_rates(tenths):
    p = tenths / 10
    n = 40
    n_pos = int(round(p * n))
    labels = [1] * n_pos + [0] * (n - n_pos)
    report = classify_metrics(LabeledScores.of([1.0] * n, labels), 0.75)
    assert report.precision == pytest.approx(n_pos / n, abs=1e-12)
    assert report.recall == 1.0
    assert report.f1 == pytest.approx(2 * (n_pos / n) / (1 + n_pos / n), abs=1e-12)
    assert report.balanced_accuracy == pytest.approx(0.5, abs=1e-12)
    assert report.auc == 0.5


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        LabeledScores.of([0.1], [1, 0])


# --- incomplete beta / t distribution ------------------------------------

def test_t_cdf_against_quadrature():
    probes = [0.0, 0.05, 0.2, 0.5, 0.8, 1.0, 1.3, 1.7, 2.0, 2.5,
              3.0, 3.5, 4.0, 5.0, 6.0, 7.5, 9.0, 12.0, 20.0, 50.0]
    for df in range(1, 31):
        for t in probes:
            mine = student_t_sf_two_sided(t, df)
            ref = t_two_sided_by_quadrature(t, df)
            assert mine == pytest.approx(ref, abs=1e-6)


def test_incomplete_beta_bounds():
    assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
    # symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    for x in (0.1, 0.37, 0.5, 0.93):
        assert regularized_incomplete_beta(2.5, 4.0, x) == pytest.approx(
            1.0 - regularized_incomplete_beta(4.0, 2.5, 1.0 - x), abs=1e-12
        )


# --- pearson --------------------------------------------------------------

def test_pearson_identity_vector():
    x = [0.1, 0.4, 0.5, 0.7, 0.9, 1.0]
    report = pearson_with_p(x, x)
    assert report.pearson == pytest.approx(1.0)
    assert report.p_value < 1e-6


def test_pearson_degenerate_variance():
    report = pearson_with_p([1.0, 1.0, 1.0], [0.0, 1.0, 0.0])
    assert report.pearson == 0.0
    assert report.p_value == 1.0
    assert "degenerate_variance" in report.flags


def test_pearson_equals_phi_exhaustive():
    # all 2x2 contingency tables with n <= 12 and non-degenerate marginals
    for n in range(3, 13):
        for a in range(n + 1):
            for b in range(n + 1 - a):
                for c in range(n + 1 - a - b):
                    d = n - a - b - c
                    if (a + b) == 0 or (c + d) == 0 or (a + c) == 0 or (b + d) == 0:
                        continue
                    if (a + b) == n or (a + c) == n:
                        continue
                    x = [1.0] * (a + b) + [0.0] * (c + d)
                    y = [1.0] * a + [0.0] * b + [1.0] * c + [0.0] * d
                    report = pearson_with_p(x, y)
                    assert report.pearson == pytest.approx(
                        phi_from_table(a, b, c, d), abs=1e-9
                    )


def test_small_binary_p_value_vs_quadrature():
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randrange(5, 11)
        x = [float(rng.randrange(2)) for _ in range(n)]
        y = [float(rng.randrange(2)) for _ in range(n)]
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        report = pearson_with_p(x, y)
        r = report.pearson
        if abs(r) == 1.0:
            assert report.p_value == 0.0
            continue
        t = r * math.sqrt((n - 2) / (1 - r * r))
        assert report.p_value == pytest.approx(
            t_two_sided_by_quadrature(t, n - 2), abs=1e-6
        )


# --- threshold sweep ------------------------------------------------------

def sweep_reference(scores, labels):
    """Independent exhaustive reimplementation of the sweep rule."""
    distinct = sorted(set(scores))
    candidates = (
        [float("-inf")]
        + [(u + v) / 2 for u, v in zip(distinct, distinct[1:])]
        + [float("inf")]
    )
    best = None
    for thr in candidates:
        binarized = [1.0 if s > thr else 0.0 for s in scores]
        report = pearson_with_p(binarized, [float(y) for y in labels])
        key = (report.p_value, -report.pearson, thr)
        if best is None or key < best[0]:
            best = (key, thr, report)
    return best[1], best[2]


def test_sweep_perfect_separation():
    scores = [0.1, 0.2, 0.8, 0.9]
    labels = [0, 0, 1, 1]
    data = LabeledScores.of(scores, labels)
    thr, report = sweep_threshold(data, labels)
    assert 0.2 < thr < 0.8
    assert report.pearson == pytest.approx(1.0)


def test_sweep_constant_scores_degenerate():
    data = LabeledScores.of([0.5] * 6, [0, 1, 0, 1, 0, 1])
    thr, report = sweep_threshold(data, [0, 1, 0, 1, 0, 1])
    assert "degenerate_variance" in report.flags


def test_sweep_matches_exhaustive_reference():
    rng = random.Random(13)
    for _ in range(20):
        n = 50
        scores = [round(rng.random(), 2) for _ in range(n)]
        labels = [rng.randrange(2) for _ in range(n)]
        labels[0], labels[1] = 0, 1
        data = LabeledScores.of(scores, labels)
        thr, report = sweep_threshold(data, labels)
        ref_thr, ref_report = sweep_reference(scores, labels)
        assert thr == ref_thr
        assert report.pearson == pytest.approx(ref_report.pearson, abs=1e-12)
        assert report.p_value == pytest.approx(ref_report.p_value, abs=1e-12)


def test_sweep_affine_invariance():
    rng = random.Random(29)
    scores = [rng.random() for _ in range(40)]
    labels = [rng.randrange(2) for _ in range(40)]
    labels[0], labels[1] = 0, 1
    data = LabeledScores.of(scores, labels)
    thr, report = sweep_threshold(data, labels)
    scaled = LabeledScores.of([3.5 * s + 2.0 for s in scores], labels)
    thr2, report2 = sweep_threshold(scaled, labels)
    if math.isfinite(thr):
        assert thr2 == pytest.approx(3.5 * thr + 2.0, abs=1e-9)
    assert report2.pearson == pytest.approx(report.pearson, abs=1e-12)
    assert report2.p_value == pytest.approx(report.p_value, abs=1e-12)
    # identical binarization
    assert [s > thr for s in scores] == [s > thr2 for s in scaled.scores]


# --- PR curve -------------------------------------------------------------

def test_pr_curve_perfect_scores():
    data = LabeledScores.of([0.0, 0.0, 1.0, 1.0], [0, 0, 1, 1])
    points = precision_recall_curve(data)
    assert any(p == pytest.approx(1.0) and r == pytest.approx(1.0) for _, p, r in points)


def test_pr_curve_constant_scores():
    data = LabeledScores.of([1.0] * 10, [1] * 6 + [0] * 4)
    points = precision_recall_curve(data)
    recall_one = [(t, p, r) for t, p, r in points if r == 1.0]
    assert recall_one[0][1] == pytest.approx(0.6)


def test_pr_curve_consistent_with_classify_metrics():
    rng = random.Random(44)
    scores = [rng.choice([0.1, 0.3, 0.3, 0.7, rng.random()]) for _ in range(100)]
    labels = [rng.randrange(2) for _ in range(100)]
    labels[0], labels[1] = 0, 1
    data = LabeledScores.of(scores, labels)
    for thr, precision, recall in precision_recall_curve(data):
        report = classify_metrics(data, thr)
        assert precision == report.precision
        assert recall == report.recall


def test_pr_curve_sorted_by_recall_desc():
    rng = random.Random(3)
    scores = [rng.random() for _ in range(30)]
    labels = [rng.randrange(2) for _ in range(30)]
    labels[0], labels[1] = 0, 1
    points = precision_recall_curve(LabeledScores.of(scores, labels))
    recalls = [r for _, _, r in points]
    assert recalls == sorted(recalls, reverse=True)


# --- kappa ----------------------------------------------------------------

def test_kappa_identical():
    assert cohens_kappa([1, 0, 1, 1], [1, 0, 1, 1]) == 1.0
    assert cohens_kappa(["a"] * 5, ["a"] * 5) == 1.0


def test_kappa_hand_worked_2x2():
    # contingency a=20 (yes,yes), b=5 (yes,no), c=10 (no,yes), d=15 (no,no)
    # p_o = 35/50 = 0.70; p_e = 0.5*0.6 + 0.5*0.4 = 0.50
    # kappa = (0.70 - 0.50) / (1 - 0.50) = 0.40
    rater_a = ["y"] * 20 + ["y"] * 5 + ["n"] * 10 + ["n"] * 15
    rater_b = ["y"] * 20 + ["n"] * 5 + ["y"] * 10 + ["n"] * 15
    assert cohens_kappa(rater_a, rater_b) == pytest.approx(0.40, abs=1e-12)


def test_kappa_independent_raters_near_zero():
    rng = random.Random(77)
    n = 20000
    a = [rng.randrange(2) for _ in range(n)]
    b = [rng.randrange(2) for _ in range(n)]
    assert abs(cohens_kappa(a, b)) < 0.05


def test_kappa_degenerate_disagreement():
    # constant raters on disjoint categories: p_e = 0, kappa = p_o = 0
    assert cohens_kappa(["a", "a"], ["b", "b"]) == 0.0
    # both constant on the same category with p_o < 1 is impossible, but a
    # shared constant with one deviation keeps p_e < 1 and stays finite
    assert math.isfinite(cohens_kappa(["a", "a", "a"], ["a", "a", "b"]))


def test_kappa_length_mismatch():
    with pytest.raises(LengthMismatch):
        cohens_kappa([1], [1, 0])


# --- summary label --------------------------------------------------------

def test_summary_label_rules():
    assert summary_label_from_sentences([1, 1, 1]) == 1
    assert summary_label_from_sentences([1, 0, 1]) == 0
    assert summary_label_from_sentences([0, 0, 0]) == 0
    with pytest.raises(EmptyInput):
        summary_label_from_sentences([])
