"""Feature importance: ReliefF and mRMR against pure-loop references."""
import math

import numpy as np
import pytest

from tab2img.dataset import BINARY, CATEGORICAL, NUMERICAL, FeatureKind, TypedDataset
from tab2img.featsel import (
    FeatureSelectionError,
    ensemble_importance,
    mrmr,
    normalize_scores,
    relieff,
)

from oracles import mutual_information_naive, relieff_naive


def _typed(columns, kinds, labels, name="toy"):
    labels = np.array(labels, dtype=object)
    cols = []
    for col, kind in zip(columns, kinds):
        if kind == NUMERICAL:
            cols.append(np.asarray(col, dtype=np.float64))
        else:
            cols.append(np.array([str(v) for v in col], dtype=object))
    kind_objs = tuple(
        FeatureKind(k, () if k == NUMERICAL else tuple(sorted(set(map(str, c)))))
        for k, c in zip(kinds, columns)
    )
    return TypedDataset(
        name=name,
        label_name="label",
        feature_names=tuple(f"f{i}" for i in range(len(columns))),
        kinds=kind_objs,
        columns=tuple(cols),
        labels=labels,
        classes=tuple(sorted(set(labels))),
        missing_mask=np.zeros((len(labels), len(columns)), dtype=bool),
    )


def _random_mixed(rng, n, n_num, n_cat):
    # numerical values on a 1/64 lattice so distance sums are exact floats
    # and neighbor tie-breaks cannot depend on summation order
    columns, kinds = [], []
    for _ in range(n_num):
        columns.append(rng.integers(0, 65, size=n) / 64.0)
        kinds.append(NUMERICAL)
    for _ in range(n_cat):
        columns.append([str(v) for v in rng.integers(0, 3, size=n)])
        kinds.append(CATEGORICAL)
    labels = [("a", "b", "c")[v] for v in rng.integers(0, 3, size=n)]
    return columns, kinds, labels


class TestNormalizeScores:
    def test_positive_scores_only_scaled(self):
        out = normalize_scores(np.array([1.0, 3.0]))
        np.testing.assert_allclose(out, [0.25, 0.75])

    def test_negative_scores_shifted_to_zero(self):
        out = normalize_scores(np.array([-1.0, 0.0, 3.0]))
        np.testing.assert_allclose(out, [0.0, 0.2, 0.8])

    def test_zero_vector_becomes_uniform(self):
        np.testing.assert_allclose(normalize_scores(np.zeros(4)), [0.25] * 4)

    def test_all_equal_negative_becomes_uniform(self):
        np.testing.assert_allclose(normalize_scores(np.full(5, -2.0)), [0.2] * 5)

    def test_sums_to_one(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            out = normalize_scores(rng.normal(size=7))
            assert math.isclose(out.sum(), 1.0, abs_tol=1e-12)
            assert (out >= 0).all()


class TestRelieff:
    def test_matches_naive_reference(self):
        rng = np.random.default_rng(11)
        for trial in range(5):
            columns, kinds, labels = _random_mixed(rng, 36, 3, 2)
            ds = _typed(columns, kinds, labels)
            got = relieff(ds, k_neighbors=4).raw
            want = relieff_naive(ds.columns, [k.kind for k in ds.kinds], list(ds.labels), 4)
            np.testing.assert_allclose(got, want, atol=1e-12, err_msg=f"trial {trial}")

    def test_informative_feature_outscores_noise(self):
        rng = np.random.default_rng(3)
        labels = ["a"] * 20 + ["b"] * 20
        informative = [0.0] * 20 + [1.0] * 20
        noise = rng.integers(0, 65, size=40) / 64.0
        ds = _typed([informative, noise], [NUMERICAL, NUMERICAL], labels)
        iv = relieff(ds, k_neighbors=5)
        assert iv.raw[0] > iv.raw[1]
        assert iv.method == "relieff"

    def test_class_smaller_than_k_rejected(self):
        ds = _typed([[0.1, 0.2, 0.3, 0.4]], [NUMERICAL], ["a", "a", "a", "b"])
        with pytest.raises(FeatureSelectionError, match="needs more than"):
            relieff(ds, k_neighbors=1)

    def test_k_below_one_rejected(self):
        ds = _typed([[0.1, 0.2, 0.3, 0.4]], [NUMERICAL], ["a", "a", "b", "b"])
        with pytest.raises(FeatureSelectionError, match="k_neighbors"):
            relieff(ds, k_neighbors=0)

    def test_binary_feature_uses_mismatch_diff(self):
        # perfectly label-aligned binary: every miss differs, every hit matches
        labels = ["a"] * 6 + ["b"] * 6
        col = ["t"] * 6 + ["f"] * 6
        ds = _typed([col], [BINARY], labels)
        iv = relieff(ds, k_neighbors=2)
        # hits contribute 0; each of 12 samples gains prior/(1-prior) * 1 per miss
        assert math.isclose(iv.raw[0], 1.0, abs_tol=1e-12)


def _mrmr_naive_order(codes, y, select_k):
    rel = [mutual_information_naive(c, y) for c in codes]
    selected, remaining = [], list(range(len(codes)))
    while len(selected) < select_k:
        best_f, best_s = None, -math.inf
        for f in remaining:
            score = rel[f]
            if selected:
                score -= sum(
                    mutual_information_naive(codes[f], codes[s]) for s in selected
                ) / len(selected)
            if score > best_s:
                best_f, best_s = f, score
        selected.append(best_f)
        remaining.remove(best_f)
    return selected


class TestMrmr:
    def test_matches_naive_greedy_on_categorical_data(self):
        rng = np.random.default_rng(23)
        for trial in range(4):
            n, F = 80, 6
            raw_cols = [[str(v) for v in rng.integers(0, 4, size=n)] for _ in range(F)]
            labels = [("x", "y")[v] for v in rng.integers(0, 2, size=n)]
            ds = _typed(raw_cols, [CATEGORICAL] * F, labels)
            select_k = 4
            iv = mrmr(ds, select_k=select_k)
            # reproduce codes independently: sorted level index
            codes = []
            for col in raw_cols:
                level_of = {lv: i for i, lv in enumerate(sorted(set(col)))}
                codes.append([level_of[v] for v in col])
            y_map = {lv: i for i, lv in enumerate(sorted(set(labels)))}
            y = [y_map[v] for v in labels]
            order = _mrmr_naive_order(codes, y, select_k)
            want = np.zeros(F)
            for rank, f in enumerate(order):
                want[f] = select_k - rank
            np.testing.assert_array_equal(iv.raw, want, err_msg=f"trial {trial}")

    def test_first_pick_is_max_relevance(self):
        labels = ["a", "a", "b", "b"] * 10
        aligned = labels[:]  # MI with label = H(label)
        rng = np.random.default_rng(7)
        junk = [str(v) for v in rng.integers(0, 2, size=40)]
        ds = _typed([junk, aligned], [CATEGORICAL, CATEGORICAL], labels)
        iv = mrmr(ds, select_k=2)
        assert iv.raw[1] == 2.0 and iv.raw[0] == 1.0

    def test_tied_scores_choose_lowest_index(self):
        col = ["u", "v"] * 8
        ds = _typed([col, col, col], [CATEGORICAL] * 3, ["a", "b"] * 8)
        iv = mrmr(ds, select_k=1)
        np.testing.assert_array_equal(iv.raw, [1.0, 0.0, 0.0])

    def test_unselected_features_score_zero(self):
        rng = np.random.default_rng(9)
        cols = [[str(v) for v in rng.integers(0, 3, size=30)] for _ in range(5)]
        ds = _typed(cols, [CATEGORICAL] * 5, ["a", "b", "c"] * 10)
        iv = mrmr(ds, select_k=2)
        assert sorted(iv.raw.tolist()) == [0.0, 0.0, 0.0, 1.0, 2.0]

    def test_numerical_features_binned(self):
        rng = np.random.default_rng(31)
        cols = [rng.normal(size=50), rng.normal(size=50)]
        ds = _typed(cols, [NUMERICAL, NUMERICAL], ["a", "b"] * 25)
        iv = mrmr(ds, select_k=2)
        assert sorted(iv.raw.tolist()) == [1.0, 2.0]

    @pytest.mark.parametrize("bad_k", [0, 6, -1])
    def test_select_k_out_of_range_rejected(self, bad_k):
        ds = _typed([[0.1, 0.5, 0.9, 0.2]], [NUMERICAL], ["a", "a", "b", "b"])
        with pytest.raises(FeatureSelectionError, match="select_k"):
            mrmr(ds, select_k=bad_k)


class TestEnsemble:
    def _dataset(self, seed=19, n=40):
        rng = np.random.default_rng(seed)
        columns, kinds, labels = _random_mixed(rng, n, 3, 1)
        return _typed(columns, kinds, labels)

    def test_base_vector_count_and_tags(self):
        iv = ensemble_importance(self._dataset(), rounds=3, seed=1)
        assert len(iv.base_vectors) == 6
        assert [tag for tag, _ in iv.base_vectors] == ["relieff", "mrmr"] * 3
        assert iv.method == "ensemble"

    def test_mean_of_normalized_base_vectors(self):
        iv = ensemble_importance(self._dataset(), rounds=2, seed=4)
        stack = np.array([v for _, v in iv.base_vectors])
        np.testing.assert_allclose(iv.raw, stack.mean(axis=0))
        np.testing.assert_allclose(iv.normalized.sum(), 1.0, atol=1e-12)

    def test_deterministic_for_same_seed(self):
        a = ensemble_importance(self._dataset(), rounds=2, seed=8)
        b = ensemble_importance(self._dataset(), rounds=2, seed=8)
        np.testing.assert_array_equal(a.normalized, b.normalized)
        c = ensemble_importance(self._dataset(), rounds=2, seed=9)
        assert not np.array_equal(a.normalized, c.normalized)

    def test_full_subsample_reduces_to_direct_calls(self):
        ds = self._dataset(n=30)
        iv = ensemble_importance(ds, rounds=1, subsample=1.0, seed=0)
        min_class = min(ds.class_counts().values())
        want_relieff = relieff(ds, k_neighbors=min(10, min_class - 1)).normalized
        want_mrmr = mrmr(ds, select_k=math.ceil(ds.n_features / 2)).normalized
        np.testing.assert_array_equal(iv.base_vectors[0][1], want_relieff)
        np.testing.assert_array_equal(iv.base_vectors[1][1], want_mrmr)

    def test_k_neighbors_override(self):
        ds = self._dataset(n=30)
        iv = ensemble_importance(ds, rounds=1, subsample=1.0, seed=0, k_neighbors=2)
        np.testing.assert_array_equal(
            iv.base_vectors[0][1], relieff(ds, k_neighbors=2).normalized
        )

    def test_adaptive_k_tracks_smallest_class(self):
        # classes of 5/12 with full subsample force k = 4
        rng = np.random.default_rng(2)
        labels = ["a"] * 5 + ["b"] * 12
        cols = [rng.integers(0, 65, size=17) / 64.0 for _ in range(3)]
        ds = _typed(cols, [NUMERICAL] * 3, labels)
        iv = ensemble_importance(ds, rounds=1, subsample=1.0, seed=0)
        np.testing.assert_array_equal(
            iv.base_vectors[0][1], relieff(ds, k_neighbors=4).normalized
        )

    def test_parameter_validation(self):
        ds = self._dataset()
        with pytest.raises(FeatureSelectionError, match="rounds"):
            ensemble_importance(ds, rounds=0)
        with pytest.raises(FeatureSelectionError, match="subsample"):
            ensemble_importance(ds, subsample=0.0)
        with pytest.raises(FeatureSelectionError, match="subsample"):
            ensemble_importance(ds, subsample=1.2)
