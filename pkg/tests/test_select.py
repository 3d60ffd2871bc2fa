import math

import numpy as np
import pytest
import scipy.sparse as sp

from phrasesift.errors import DegenerateLabelsError
from phrasesift.labeling import LabelVector
from phrasesift.rescale import FeatureMatrix, rescale_l2
from phrasesift.select import (
    SelectorConfig,
    class_means,
    label_covariance,
    ranked_items,
    score_cooccurrence,
    score_correlation,
    search_lambda,
    select_distinct,
    summarize,
    top_k_distinct,
    PhraseSelector,
)
from phrasesift.solvers import (
    fit_l1lr,
    fit_lasso,
    l1lr_kkt_gaps,
    l1lr_lambda_max,
    lasso_kkt_gaps,
    lasso_lambda_max,
)
from phrasesift.vectorize import PhraseVocabulary


def feats_from_array(array, phrases=None):
    array = np.asarray(array, dtype=float)
    p = array.shape[1]
    phrases = phrases or [f"p{j}" for j in range(p)]
    vocab = PhraseVocabulary(
        phrases=list(phrases),
        ngram_range=(1, max(len(ph.split()) for ph in phrases)),
        doc_freq=(array > 0).sum(axis=0).astype(np.int64),
        total_count=array.sum(axis=0).astype(np.int64),
    )
    return FeatureMatrix(sp.csr_matrix(array), vocab, "raw", np.arange(p))


def labels_of(values):
    return LabelVector(np.asarray(values, dtype=np.int8))


class TestCooccurrence:
    def test_mean_over_positive_rows(self):
        feats = feats_from_array([[1, 0], [3, 2], [9, 9]])
        labels = labels_of([1, 1, -1])
        scores = score_cooccurrence(feats, labels).scores
        assert scores.tolist() == [2.0, 1.0]

    def test_all_zero_column_scores_zero(self):
        feats = feats_from_array([[1, 0], [2, 0]] + [[5, 0]])
        labels = labels_of([1, 1, -1])
        assert score_cooccurrence(feats, labels).scores[1] == 0.0

    def test_unit_norm_rescaling_downweights_common_phrase(self):
        # A appears everywhere (counts 1,1,1,1), B only in positives
        # (1,1,0,0); after unit-norm rescaling B outranks A.
        from phrasesift.vectorize import CountMatrix

        counts_array = np.array([[1, 1], [1, 1], [1, 0], [1, 0]])
        feats0 = feats_from_array(counts_array, phrases=["a", "b"])
        counts = CountMatrix(sp.csr_matrix(counts_array), feats0.vocab)
        feats = rescale_l2(counts)
        labels = labels_of([1, 1, -1, -1])
        scores = score_cooccurrence(feats, labels).scores
        assert scores[0] == pytest.approx(0.5, abs=1e-12)
        assert scores[1] == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert scores[1] > scores[0]

    def test_scores_change_under_column_rescaling(self):
        rng = np.random.default_rng(0)
        array = np.abs(rng.normal(size=(10, 4)))
        labels = labels_of([1] * 5 + [-1] * 5)
        base = score_cooccurrence(feats_from_array(array), labels).scores
        scaled_array = array.copy()
        scaled_array[:, 2] *= 7.0
        scaled = score_cooccurrence(feats_from_array(scaled_array), labels).scores
        assert scaled[2] == pytest.approx(7 * base[2], rel=1e-12)
        assert scaled[2] != base[2]


class TestCorrelation:
    def test_perfect_correlation(self):
        y = [1, -1, 1, -1]
        feats = feats_from_array(np.array([[1, 0], [0, 1], [1, 0], [0, 1]], dtype=float))
        # column 0 equals (y+1)/2, an affine image of y: |r| = 1
        scores = score_correlation(feats, labels_of(y)).scores
        assert scores[0] == pytest.approx(1.0, abs=1e-12)

    def test_constant_column_scores_zero(self):
        feats = feats_from_array([[2, 1], [2, 0], [2, 2]])
        scores = score_correlation(feats, labels_of([1, -1, 1])).scores
        assert scores[0] == 0.0

    def test_hand_computed_pearson(self):
        feats = feats_from_array([[1], [2], [3], [4]])
        scores = score_correlation(feats, labels_of([-1, -1, 1, 1])).scores
        assert scores[0] == pytest.approx(4 / (math.sqrt(5) * 2), abs=1e-12)

    def test_invariant_under_positive_column_rescaling(self):
        rng = np.random.default_rng(3)
        array = rng.normal(size=(20, 5))
        labels = labels_of(np.where(rng.random(20) < 0.5, 1, -1).tolist() if True else [])
        values = np.where(rng.random(20) < 0.5, 1, -1)
        values[0], values[1] = 1, -1  # both classes present
        labels = labels_of(values)
        base = score_correlation(feats_from_array(array), labels).scores
        scaled_array = array * rng.uniform(0.5, 9.0, size=5)
        scaled = score_correlation(feats_from_array(scaled_array), labels).scores
        assert np.allclose(base, scaled, atol=1e-12)

    def test_degenerate_labels_rejected_upstream(self):
        with pytest.raises(DegenerateLabelsError):
            labels_of([1, 1, 1])


class TestCovarianceIdentity:
    def test_exact_identity_on_random_draws(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(4, 60))
            p = int(rng.integers(1, 30))
            array = rng.normal(size=(n, p)) * (rng.random((n, p)) < 0.4)
            values = np.where(rng.random(n) < rng.uniform(0.2, 0.8), 1, -1)
            values[0], values[1] = 1, -1
            feats = feats_from_array(array)
            labels = labels_of(values)
            cov = label_covariance(feats, labels)
            mean_pos, mean_neg = class_means(feats, labels)
            p_hat = labels.n_pos / n
            rhs = 2 * p_hat * (1 - p_hat) * (mean_pos - mean_neg)
            assert np.all(np.abs(cov - rhs) <= 1e-12 * np.maximum(1.0, np.abs(cov)))


class TestDistinctSelection:
    def test_united_states_drops_united(self):
        items = [("united states", 2.0), ("united", 1.5), ("america", 1.0)]
        assert select_distinct(items, k=15) == [("united states", 2.0), ("america", 1.0)]

    def test_longer_candidate_replaces_accepted_subphrase(self):
        items = [("united", 3.0), ("united states", 2.5)]
        assert select_distinct(items, k=15) == [("united states", 2.5)]

    def test_k_nonoverlapping_phrases_returned_exactly(self):
        items = [(f"word{i}", float(10 - i)) for i in range(10)]
        assert len(select_distinct(items, k=4)) == 4

    def test_fewer_phrases_than_k(self):
        feats = feats_from_array([[1, 0, 2], [0, 1, 1]], phrases=["a", "b", "c"])
        scored = score_cooccurrence(feats, labels_of([1, -1]))
        assert len(top_k_distinct(scored, feats, 15)) == 3

    def test_ties_break_by_column_index(self):
        scores = np.array([1.0, 2.0, 1.0])
        items = ranked_items(scores, ["x", "y", "z"])
        assert items == [("y", 2.0), ("x", 1.0), ("z", 1.0)]

    def test_no_subphrase_pairs_in_output(self):
        items = [
            ("the arab spring", 9.0),
            ("arab spring", 8.0),
            ("spring", 7.0),
            ("the arab", 6.5),
            ("world cup", 6.0),
            ("cup", 5.0),
        ]
        chosen = select_distinct(items, k=15)
        phrases = [tuple(p.split()) for p, _ in chosen]
        for a in phrases:
            for b in phrases:
                if a is not b:
                    assert not _contains(a, b)


def _contains(outer, inner):
    if len(inner) > len(outer):
        return False
    return any(outer[s : s + len(inner)] == inner for s in range(len(outer) - len(inner) + 1))


class TestLassoSolver:
    def test_identity_design_closed_form(self):
        X = sp.identity(2, format="csr")
        model = fit_lasso(X, np.array([3.0, -3.0]), 2.0, tol=1e-12)
        assert model.beta[0] == pytest.approx(2.0, abs=1e-10)
        assert model.beta[1] == pytest.approx(-2.0, abs=1e-10)
        assert model.gamma == pytest.approx(0.0, abs=1e-10)

    def test_orthonormal_design_matches_soft_threshold_oracle(self):
        rng = np.random.default_rng(5)
        n, p = 40, 8
        basis = rng.normal(size=(n, p + 1))
        basis[:, 0] = 1.0
        q, _ = np.linalg.qr(basis)
        X = q[:, 1:]  # orthonormal columns, all orthogonal to the intercept
        y = rng.normal(size=n) * 3
        lam = 1.3
        model = fit_lasso(sp.csr_matrix(X), y, lam, tol=1e-13)
        rho = X.T @ (y - y.mean())
        expected = np.sign(rho) * np.maximum(np.abs(rho) - lam / 2, 0.0)
        assert np.allclose(model.dense(), expected, atol=1e-9)
        assert model.gamma == pytest.approx(y.mean(), abs=1e-9)

    def test_full_shrinkage_threshold(self):
        rng = np.random.default_rng(6)
        X = sp.random(30, 12, density=0.4, random_state=2)
        y = rng.normal(size=30)
        lam_max = lasso_lambda_max(X, y)
        model = fit_lasso(X, y, lam_max)
        assert model.support == []
        assert model.gamma == pytest.approx(y.mean(), abs=1e-12)
        below = fit_lasso(X, y, 0.99 * lam_max, tol=1e-12)
        assert below.support_size >= 1

    def test_lambda_zero_matches_normal_equations(self):
        rng = np.random.default_rng(7)
        n, p = 30, 6
        X = rng.normal(size=(n, p))
        y = rng.normal(size=n)
        model = fit_lasso(sp.csr_matrix(X), y, 0.0, tol=1e-13, max_sweeps=100_000)
        design = np.column_stack([np.ones(n), X])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        assert model.gamma == pytest.approx(coef[0], abs=1e-8)
        assert np.allclose(model.dense(), coef[1:], atol=1e-8)

    def test_kkt_certificate_on_random_problems(self):
        rng = np.random.default_rng(8)
        for trial in range(10):
            n, p = int(rng.integers(20, 80)), int(rng.integers(5, 60))
            X = sp.random(n, p, density=0.3, random_state=int(rng.integers(1 << 31)))
            y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
            lam = 0.3 * max(lasso_lambda_max(X, y), 1e-12)
            model = fit_lasso(X, y, lam)
            gaps = lasso_kkt_gaps(X, y, model)
            tol = 1e-5 * max(1.0, lam)
            assert gaps["intercept"] <= tol * n
            assert gaps["support"] <= tol
            assert gaps["inactive"] <= tol

    def test_objective_monotone_per_update(self):
        rng = np.random.default_rng(9)
        X = sp.random(25, 10, density=0.5, random_state=4)
        y = rng.normal(size=25)
        model = fit_lasso(X, y, 0.7, record_objective=True, max_sweeps=500)
        trace = model.objective_trace
        assert trace is not None and len(trace) > 10
        assert np.all(np.diff(trace) <= 1e-9 * max(1.0, trace[0]))

    def test_scale_equivariance_power_of_two(self):
        rng = np.random.default_rng(10)
        X = sp.random(40, 15, density=0.3, random_state=5)
        y = rng.normal(size=40)
        lam = 0.4 * lasso_lambda_max(X, y)
        c = 2.0
        base = fit_lasso(X, y, lam, tol=1e-10)
        scaled = fit_lasso(X, c * y, c * lam, tol=c * 1e-10)
        assert scaled.support == base.support
        assert scaled.gamma == c * base.gamma
        for j, value in base.beta.items():
            assert scaled.beta[j] == c * value

    def test_nan_in_matrix_rejected(self):
        X = sp.csr_matrix(np.array([[1.0, np.nan], [0.0, 1.0]]))
        with pytest.raises(ValueError, match="NaN"):
            fit_lasso(X, np.array([1.0, -1.0]), 0.5)

    def test_nonconvergence_flag_and_warning(self):
        rng = np.random.default_rng(12)
        X = sp.csr_matrix(rng.normal(size=(40, 20)))
        y = rng.normal(size=40)
        with pytest.warns(RuntimeWarning, match="did not converge"):
            model = fit_lasso(X, y, 0.001, tol=1e-14, max_sweeps=2)
        assert not model.converged


def _logistic_objective(X, y, beta, gamma, lam):
    margins = y * (X @ beta + gamma)
    return float(np.sum(np.logaddexp(0.0, -margins)) + lam * np.sum(np.abs(beta)))


class TestL1lrSolver:
    def test_large_lambda_gives_prior_log_odds_intercept(self):
        rng = np.random.default_rng(13)
        X = sp.random(80, 10, density=0.3, random_state=6)
        y = np.where(rng.random(80) < 0.3, 1.0, -1.0)
        lam = 10 * l1lr_lambda_max(X, y)
        model = fit_l1lr(X, y, lam, tol=1e-10)
        expected = math.log((y > 0).sum() / (y < 0).sum())
        assert model.support == []
        assert model.gamma == pytest.approx(expected, abs=1e-6)

    def test_antisymmetric_data_zero_intercept(self):
        rng = np.random.default_rng(14)
        half = rng.normal(size=(15, 4))
        X = sp.csr_matrix(np.vstack([half, -half]))
        y = np.concatenate([np.ones(15), -np.ones(15)])
        model = fit_l1lr(X, y, 0.5, tol=1e-10)
        assert model.gamma == pytest.approx(0.0, abs=1e-8)

    def test_one_feature_matches_grid_search(self):
        rng = np.random.default_rng(15)
        x = rng.normal(size=25)
        y = np.where(x + 0.3 * rng.normal(size=25) > 0, 1.0, -1.0)
        X = sp.csr_matrix(x.reshape(-1, 1))
        lam = 1.0
        model = fit_l1lr(X, y, lam, tol=1e-12)

        def objective(b, g):
            return _logistic_objective(x.reshape(-1, 1), y, np.array([b]), g, lam)

        b_lo, b_hi, g_lo, g_hi = -6.0, 6.0, -6.0, 6.0
        for _ in range(9):
            bs = np.linspace(b_lo, b_hi, 41)
            gs = np.linspace(g_lo, g_hi, 41)
            values = np.array([[objective(b, g) for g in gs] for b in bs])
            bi, gi = np.unravel_index(values.argmin(), values.shape)
            b_step, g_step = bs[1] - bs[0], gs[1] - gs[0]
            b_lo, b_hi = bs[bi] - 2 * b_step, bs[bi] + 2 * b_step
            g_lo, g_hi = gs[gi] - 2 * g_step, gs[gi] + 2 * g_step
        best_b, best_g = bs[bi], gs[gi]
        fitted_b = model.beta.get(0, 0.0)
        assert fitted_b == pytest.approx(best_b, abs=1e-4)
        assert model.gamma == pytest.approx(best_g, abs=1e-4)

    def test_lambda_zero_rejected(self):
        X = sp.csr_matrix(np.ones((4, 1)))
        with pytest.raises(ValueError):
            fit_l1lr(X, np.array([1.0, 1.0, -1.0, -1.0]), 0.0)

    def test_subgradient_conditions_on_random_problems(self):
        rng = np.random.default_rng(16)
        for _ in range(8):
            n, p = int(rng.integers(30, 90)), int(rng.integers(4, 40))
            X = sp.random(n, p, density=0.3, random_state=int(rng.integers(1 << 31)))
            y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
            if abs(y.sum()) == n:
                y[0] = -y[0]
            lam = 0.3 * max(l1lr_lambda_max(X, y), 1e-9)
            model = fit_l1lr(X, y, lam, tol=1e-9)
            gaps = l1lr_kkt_gaps(X, y, model)
            tol = 1e-5 * max(1.0, lam)
            assert gaps["intercept"] <= tol * n
            assert gaps["support"] <= tol
            assert gaps["inactive"] <= tol

    def test_objective_monotone_per_sweep(self):
        rng = np.random.default_rng(17)
        X = sp.random(40, 12, density=0.4, random_state=9)
        y = np.where(rng.random(40) < 0.5, 1.0, -1.0)
        y[:2] = [1.0, -1.0]
        model = fit_l1lr(X, y, 0.2, record_objective=True, max_sweeps=300)
        trace = model.objective_trace
        assert np.all(np.diff(trace) <= 1e-9 * max(1.0, trace[0]))


class TestSearchLambda:
    def _planted_problem(self, seed=21, n=100, p=60, strong=5):
        rng = np.random.default_rng(seed)
        X = sp.random(n, p, density=0.15, random_state=seed, data_rvs=lambda s: np.abs(rng.normal(size=s)) + 0.2)
        beta = np.zeros(p)
        beta[:strong] = rng.uniform(2, 4, size=strong) * np.sign(rng.normal(size=strong))
        y = X @ beta + 0.05 * rng.normal(size=n)
        return X.tocsr(), y

    def test_support_at_most_k_and_maximal(self):
        X, y = self._planted_problem()
        config = SelectorConfig(method="lasso", k=5)
        result = search_lambda(X, y, 5, "lasso", config)
        assert result.support_size <= 5
        feasible = [s for _, s in result.probes if s <= 5]
        assert result.support_size == max(feasible)

    def test_upper_bracket_has_empty_support(self):
        X, y = self._planted_problem(seed=22)
        config = SelectorConfig(method="lasso", k=3)
        result = search_lambda(X, y, 3, "lasso", config)
        first_lam, first_support = result.probes[0]
        assert first_support == 0
        assert first_lam == pytest.approx(lasso_lambda_max(X, y), rel=1e-9)

    def test_huge_k_returns_small_lambda(self):
        X, y = self._planted_problem(seed=23, n=40, p=12)
        config = SelectorConfig(method="lasso", k=500)
        result = search_lambda(X, y, 500, "lasso", config)
        assert result.support_size <= min(40 - 1, 12)
        assert result.lam < lasso_lambda_max(X, y) / 1e6

    def test_k_one_returns_the_single_strongest_column(self):
        rng = np.random.default_rng(25)
        n, p = 120, 30
        X = sp.random(n, p, density=0.3, random_state=25,
                      data_rvs=lambda s: np.abs(rng.normal(size=s)) + 0.2).tocsr()
        beta = np.zeros(p)
        beta[7] = 10.0  # dominant effect
        beta[3] = beta[11] = 1.0
        y = X @ beta + 0.05 * rng.normal(size=n)
        config = SelectorConfig(method="lasso", k=1)
        result = search_lambda(X, y, 1, "lasso", config)
        assert result.support_size == 1
        assert result.model.support == [7]

    def test_dedup_aware_support_counting(self):
        X, y = self._planted_problem(seed=24, n=80, p=10, strong=4)
        phrases = ["alpha", "alpha beta", "beta", "gamma", "delta",
                   "eps", "zeta", "eta", "theta", "iota"]
        config = SelectorConfig(method="lasso", k=3)
        result = search_lambda(X, y, 3, "lasso", config, phrases=phrases)
        from phrasesift.select import distinct_support_size

        assert result.support_size == distinct_support_size(result.model, phrases)
        assert result.support_size <= 3


class TestSummarize:
    def _toy(self):
        rng = np.random.default_rng(30)
        n = 60
        signal = (rng.random(n) < 0.4).astype(float)
        labels = labels_of(np.where(signal > 0, 1, -1))
        columns = [
            signal * rng.integers(1, 3, size=n),          # predictive
            np.ones(n),                                    # common, useless
            rng.integers(0, 2, size=n).astype(float),      # noise
        ]
        feats = feats_from_array(np.column_stack(columns), phrases=["cairo", "the", "random"])
        return feats, labels

    def test_lasso_summary_finds_signal(self):
        feats, labels = self._toy()
        summary = summarize(feats, labels, SelectorConfig(method="lasso", k=2), topic="t")
        assert "cairo" in summary.phrase_list()
        assert summary.lam is not None
        assert len(summary) <= 2

    def test_cooccurrence_on_raw_counts_ranks_by_positive_frequency(self):
        feats = feats_from_array(
            [[4, 1, 0], [2, 1, 0], [0, 1, 9]], phrases=["hot", "flat", "cold"]
        )
        labels = labels_of([1, 1, -1])
        summary = summarize(feats, labels, SelectorConfig(method="cooccurrence", k=2))
        assert summary.phrase_list() == ["hot", "flat"]

    def test_summary_echoes_configuration(self):
        feats, labels = self._toy()
        summary = summarize(
            feats, labels, SelectorConfig(method="correlation", k=3),
            topic="demo", scheme="l2", rule="count:1", unit_kind="article",
        )
        assert (summary.method, summary.scheme, summary.rule, summary.unit_kind) == (
            "correlation", "l2", "count:1", "article",
        )
        assert summary.n_pos == labels.n_pos

    def test_summary_serialization_round_trip(self):
        from phrasesift.select import Summary

        feats, labels = self._toy()
        summary = summarize(feats, labels, SelectorConfig(method="lasso", k=2))
        clone = Summary.from_dict(summary.to_dict())
        assert clone.phrases == summary.phrases
        csv_text = summary.to_csv()
        assert csv_text.splitlines()[0] == "rank,phrase,score,lambda,method"

    def test_selector_estimator_fit_transform(self):
        feats, labels = self._toy()
        selector = PhraseSelector(method="correlation", k=2)
        reduced = selector.fit_transform(feats, labels)
        assert reduced.shape == (feats.n, len(selector.selected_phrases_))
        assert selector.get_params()["k"] == 2
