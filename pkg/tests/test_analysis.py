import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import kendalltau as scipy_kendalltau

from conftest import brute_kendall_tau_b, pruning_fixture, sweep_dataset
from reprofeat.analysis import (
    analyze,
    anova_f,
    clip_negative,
    correlation_prune,
    kendall_tau,
    min_max_normalize,
    mutual_info_continuous,
    mutual_info_scores,
    normalize_scores,
    rank_by_anova,
    select_top_features,
    sweep_top_features,
    tau_matrix,
)
from reprofeat.features import FeatureMatrix


def matrix(X, names=None, mask=None, labels=None):
    X = np.asarray(X, dtype=float)
    names = names or [f"f{j}" for j in range(X.shape[1])]
    mask = np.zeros(X.shape, dtype=bool) if mask is None else mask
    labels = [None] * len(X) if labels is None else [bool(v) for v in labels]
    return FeatureMatrix([str(i) for i in range(len(X))], names, X, mask, labels)


# ------------------------------------------------------------------ tau


def test_tau_examples():
    assert kendall_tau([1, 2, 3], [1, 2, 3]) == 1.0
    assert kendall_tau([1, 2, 3], [3, 2, 1]) == -1.0
    assert kendall_tau([1, 2, 3], [1, 3, 2]) == pytest.approx(1 / 3)


def test_tau_constant_is_nan_and_bad_input_raises():
    assert math.isnan(kendall_tau([1, 1, 1], [1, 2, 3]))
    with pytest.raises(ValueError):
        kendall_tau([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        kendall_tau([1], [1])


vectors = st.integers(2, 50).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 6), min_size=n, max_size=n), st.lists(st.integers(0, 6), min_size=n, max_size=n))
)


@settings(max_examples=200, deadline=None)
@given(vectors)
def test_tau_matches_brute_force_with_ties(xy):
    x, y = xy
    expected = brute_kendall_tau_b(x, y)
    got = kendall_tau(x, y)
    if math.isnan(expected):
        assert math.isnan(got)
    else:
        assert got == pytest.approx(expected, abs=1e-12)


def test_tau_agrees_with_scipy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, y = rng.integers(0, 5, 40), rng.normal(size=40).round(1)
        assert kendall_tau(x, y) == pytest.approx(scipy_kendalltau(x, y).statistic, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40, unique=True), st.randoms(use_true_random=False))
def test_tau_reflexive_and_antisymmetric(x, rnd):
    y = list(x)
    rnd.shuffle(y)
    assert kendall_tau(x, x) == pytest.approx(1.0)
    assert kendall_tau(x, [-v for v in y]) == pytest.approx(-kendall_tau(x, y))


def test_tau_matrix_uses_pairwise_real_rows():
    X = np.array([[1, 1], [2, 2], [3, 3], [4, 0]], dtype=float)
    mask = np.zeros_like(X, dtype=bool)
    mask[3, 1] = True
    assert tau_matrix(matrix(X, mask=mask))[0, 1] == pytest.approx(1.0)


# ------------------------------------------------------------------ pruning


def test_duplicate_columns_drop_exactly_one():
    rng = np.random.default_rng(0)
    x = rng.normal(size=30)
    pruned, drops = correlation_prune(matrix(np.column_stack([x, x, rng.normal(size=30)])))
    assert [d.feature for d in drops] == ["f1"] and pruned.names == ["f0", "f2"]


def test_survivor_has_more_real_values():
    rng = np.random.default_rng(0)
    x = rng.normal(size=30)
    mask = np.zeros((30, 2), dtype=bool)
    mask[:3, 0] = True
    _, drops = correlation_prune(matrix(np.column_stack([x, x]), mask=mask))
    assert [(d.feature, d.partner) for d in drops] == [("f0", "f1")]


def test_weak_correlation_keeps_everything():
    x = np.arange(9.0)
    y = np.array([3, 2, 1, 0, 6, 5, 4, 7, 8.0])  # 9 of 36 pairs discordant
    assert kendall_tau(x, y) == 0.5
    assert correlation_prune(matrix(np.column_stack([x, y])))[1] == []


def test_categorical_columns_are_ignored():
    x = np.arange(10.0)
    pruned, drops = correlation_prune(matrix(np.column_stack([x, x]), names=["subject", "age"]))
    assert drops == [] and pruned.names == ["subject", "age"]


def test_constructed_fixture_gives_33_columns():
    m, pairs, expected = pruning_fixture()
    pruned, drops = correlation_prune(m, 0.8)
    assert pruned.shape[1] == 33
    assert {d.feature for d in drops} == expected
    for a, b in pairs:
        assert (a in pruned.names) != (b in pruned.names)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.3, 0.95))
def test_pruned_output_is_pair_free(seed, threshold):
    rng = np.random.default_rng(seed)
    base = rng.normal(size=(25, 3))
    X = np.hstack([base, base + rng.normal(scale=0.2, size=base.shape), rng.normal(size=(25, 2))])
    mask = rng.random(X.shape) < 0.1
    pruned, _ = correlation_prune(matrix(X, mask=mask), threshold)
    t = tau_matrix(pruned)
    np.fill_diagonal(t, 0)
    assert (t <= threshold).all()


# ------------------------------------------------------------------ ANOVA-F


def test_anova_example():
    f, degenerate = anova_f(np.array([1, 2, 3, 4, 5, 6.0]), [0, 0, 0, 1, 1, 1])
    assert f[0] == pytest.approx(13.5, abs=1e-9) and not degenerate[0]


def test_anova_equal_means_and_constant():
    f, _ = anova_f(np.array([1, 2, 3, 3, 2, 1.0]), [0, 0, 0, 1, 1, 1])
    assert f[0] == pytest.approx(0.0, abs=1e-12)
    f, degenerate = anova_f(np.full(6, 4.0), [0, 0, 0, 1, 1, 1])
    assert f[0] == 0.0 and degenerate[0]


def test_anova_agrees_with_scipy():
    from scipy.stats import f_oneway

    rng = np.random.default_rng(5)
    X, y = rng.normal(size=(50, 4)), rng.integers(0, 2, 50)
    expected = [f_oneway(X[y == 0, j], X[y == 1, j]).statistic for j in range(4)]
    assert anova_f(X, y)[0] == pytest.approx(expected, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.floats(-1e3, 1e3), st.floats(1e-3, 1e3))
def test_anova_shift_and_scale_invariant(seed, shift, scale):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=30), np.repeat([0, 1], 15)
    base = anova_f(x, y)[0][0]
    assert anova_f(x + shift, y)[0][0] == pytest.approx(base, rel=1e-9)
    assert anova_f(x * scale, y)[0][0] == pytest.approx(base, rel=1e-9)


# ------------------------------------------------------------------ MI


def test_mi_gaussian_closed_form():
    rng = np.random.default_rng(0)
    rho = 0.9
    x = rng.normal(size=2000)
    y = rho * x + math.sqrt(1 - rho ** 2) * rng.normal(size=2000)
    assert abs(mutual_info_continuous(x, y, k=3) - (-0.5 * math.log(1 - rho ** 2))) <= 0.1


def test_mi_independent_and_identical():
    rng = np.random.default_rng(1)
    y = np.repeat([0, 1], 1000)
    assert mutual_info_scores(rng.normal(size=(2000, 1)), y)[0] <= 0.05
    assert mutual_info_scores(y[:, None].astype(float), y)[0] == pytest.approx(math.log(2), abs=0.1)


def test_mi_agrees_with_sklearn():
    sklearn = pytest.importorskip("sklearn.feature_selection")
    rng = np.random.default_rng(2)
    y = rng.integers(0, 2, 300)
    X = np.column_stack([y + rng.normal(size=300), rng.normal(size=300), 2 * y + rng.normal(scale=0.5, size=300)])
    ours = mutual_info_scores(X, y, k=3, seed=0)
    theirs = sklearn.mutual_info_classif(X, y, n_neighbors=3, random_state=0)
    assert ours == pytest.approx(theirs, abs=1e-6)


def test_mi_negative_values_clip_to_zero():
    assert clip_negative([-0.003, 0.2]).tolist() == [0.0, 0.2]
    rng = np.random.default_rng(4)
    raw = [mutual_info_scores(rng.normal(size=(60, 1)), np.repeat([0, 1], 30), seed=s, clip=False)[0] for s in range(10)]
    assert min(raw) < 0  # the estimator does go negative on independent data
    clipped = mutual_info_scores(rng.normal(size=(60, 5)), np.repeat([0, 1], 30))
    assert (clipped >= 0).all()


def test_mi_deterministic_given_seed():
    rng = np.random.default_rng(3)
    X, y = rng.integers(0, 3, size=(40, 2)).astype(float), np.repeat([0, 1], 20)
    assert np.array_equal(mutual_info_scores(X, y, seed=9), mutual_info_scores(X, y, seed=9))


# ------------------------------------------------------------------ normalization and selection


def test_normalizations():
    assert normalize_scores([2, 4]).tolist() == [0.5, 1.0]
    assert normalize_scores([0, 0]).tolist() == [0, 0]
    out, constant = min_max_normalize(np.array([[0, 3.0], [5, 3.0], [10, 3.0]]))
    assert out[:, 0].tolist() == [0, 0.5, 1.0] and out[:, 1].tolist() == [0, 0, 0]
    assert constant.tolist() == [False, True]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=20))
def test_normalized_scores_in_unit_interval(scores):
    out = normalize_scores(scores)
    assert ((out >= 0) & (out <= 1)).all()


def planted_signal(seed=0, n=120):
    rng = np.random.default_rng(seed)
    y = np.repeat([0, 1], n // 2)
    X = rng.normal(size=(n, 8))
    for j, effect in zip((5, 2, 7), (2.0, 1.5, 1.0)):
        X[:, j] += effect * y
    return matrix(X, labels=y), y


def test_planted_signal_leads_ranking():
    m, y = planted_signal()
    assert set(rank_by_anova(m, y)[:3]) == {"f5", "f2", "f7"}


def test_selection_rules():
    m, y = planted_signal()
    assert select_top_features(m, y, n_anova=0, mi_extras=["f1"]) == ["f1"]
    top = select_top_features(m, y, n_anova=3, mi_extras=["f5"])
    assert len(top) == 3 and top.count("f5") == 1
    with pytest.raises(KeyError):
        select_top_features(m, y, mi_extras=["missing"])


def test_sweep_plateau_and_determinism():
    X, y = sweep_dataset()
    m = matrix(X, labels=y)
    points = sweep_top_features(m, y, max_k=10, repeats=3, seed=42)
    means = [p.summary["mean"] for p in points]
    assert max(means[:3]) >= 0.95 * max(means)
    again = sweep_top_features(m, y, max_k=10, repeats=3, seed=42)
    assert [p.f1 for p in again] == [p.f1 for p in points]
    single = sweep_top_features(m, y, max_k=1, repeats=1)
    assert len(single) == 1 and len(single[0].f1) == 5


def test_analyze_pipeline():
    rng = np.random.default_rng(0)
    y = np.repeat([0, 1], 60)
    X = rng.normal(size=(120, 12)) + np.linspace(0, 1.5, 12) * y[:, None]
    X[:, 11] = X[:, 10] + rng.normal(scale=0.01, size=120)  # near duplicate, pruned
    X = np.column_stack([X, rng.integers(1000, 3000, 120)])
    names = ["citations_methodology"] + [f"f{j}" for j in range(1, 12)] + ["subject"]
    mask = np.zeros(X.shape, dtype=bool)
    mask[:110, 1] = True  # only 10 real values: not a core feature
    report = analyze(matrix(X, names, mask, y), min_real=15)
    assert "f1" not in report.core_features and len(report.core_features) == 12
    assert [d.feature for d in report.dropped] in (["f10"], ["f11"])
    assert "subject" in report.reduced_features and "subject" not in report.scored_features
    assert len(report.selected_features) == 9 and report.selected_features[-1] == "citations_methodology"
    d = report.to_dict()
    assert {"core_features", "reduced_features", "selected_features", "dropped", "tau", "scores"} <= set(d)
