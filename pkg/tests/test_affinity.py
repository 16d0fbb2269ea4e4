import numpy as np
import pytest

from mta import EmbeddingSet, PredictionMatrix, text_affinity, vision_affinity

from helpers import make_classes, make_views


def one_hot_rows(indices, k):
    rows = np.zeros((len(indices), k))
    for p, i in enumerate(indices):
        rows[p, i] = 1.0
    return PredictionMatrix(rows)


class TestTextAffinity:
    def test_matching_one_hots(self):
        aff = text_affinity(one_hot_rows([2, 2], 4))
        assert aff.w[0, 1] == 1.0

    def test_disjoint_one_hots(self):
        aff = text_affinity(one_hot_rows([0, 3], 4))
        assert aff.w[0, 1] == 0.0

    def test_zeroed_diagonal(self):
        aff = text_affinity(one_hot_rows([1, 2], 4), "zeroed")
        assert aff.w[0, 0] == 0.0 and aff.w[1, 1] == 0.0

    def test_kept_diagonal_is_squared_norm(self):
        probs = PredictionMatrix(np.full((2, 4), 0.25))
        aff = text_affinity(probs, "kept")
        np.testing.assert_allclose(np.diag(aff.w), 0.25)

    def test_uniform_rows_give_one_over_k(self):
        probs = PredictionMatrix(np.full((3, 5), 0.2))
        aff = text_affinity(probs)
        assert aff.w[0, 1] == pytest.approx(0.2)

    def test_symmetry_exact(self, rng):
        from mta import softmax_predictions

        preds = softmax_predictions(make_views(rng, 20, 12), make_classes(rng, 7, 12))
        aff = text_affinity(preds)
        assert np.array_equal(aff.w, aff.w.T)

    def test_entries_in_unit_interval(self, rng):
        from mta import softmax_predictions

        preds = softmax_predictions(make_views(rng, 15, 9), make_classes(rng, 6, 9))
        for mode in ("zeroed", "kept"):
            w = text_affinity(preds, mode).w
            assert w.min() >= 0.0 and w.max() <= 1.0

    def test_kept_is_positive_semidefinite(self, rng):
        # Gram matrices of the prediction rows; min eigenvalue >= -1e-8
        from mta import softmax_predictions

        for seed in range(10):
            local = np.random.default_rng(seed)
            preds = softmax_predictions(make_views(local, 12, 6), make_classes(local, 5, 6))
            w = text_affinity(preds, "kept").w
            assert np.linalg.eigvalsh(w).min() >= -1e-8


class TestVisionAffinity:
    def test_duplicate_views(self):
        es = EmbeddingSet(np.array([[1.0, 0.0], [1.0, 0.0]]))
        assert vision_affinity(es).w[0, 1] == pytest.approx(1.0)

    def test_orthogonal_views(self):
        es = EmbeddingSet(np.eye(2))
        assert vision_affinity(es).w[0, 1] == pytest.approx(0.0)

    def test_antipodal_views(self):
        es = EmbeddingSet(np.array([[1.0, 0.0], [-1.0, 0.0]]))
        assert vision_affinity(es).w[0, 1] == pytest.approx(-1.0)

    def test_range_and_diagonal(self, rng):
        es = make_views(rng, 10, 4)
        w = vision_affinity(es, "kept").w
        assert w.min() >= -1.0 - 1e-12 and w.max() <= 1.0 + 1e-12
        np.testing.assert_allclose(np.diag(w), 1.0, atol=1e-12)
