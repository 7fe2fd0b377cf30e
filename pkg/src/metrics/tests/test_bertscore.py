import numpy as np
import pytest

from metrics import DimensionError, EmbeddingProvider, HashingEmbeddingProvider, bert_score
from validation import ValidationError


def test_identical_embeddings_score_one():
    vectors = np.eye(3)
    score = bert_score(vectors, vectors)
    assert (score.precision, score.recall, score.f1) == pytest.approx((1.0, 1.0, 1.0))


def test_greedy_matching_by_hand():
    score = bert_score([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0]])
    assert score.recall == pytest.approx(1.0)
    assert score.precision == pytest.approx(0.5)
    assert score.f1 == pytest.approx(2 / 3)


def test_orthogonal_and_negative_similarities_floor_at_zero():
    assert bert_score([[1.0, 0.0]], [[0.0, 1.0]]).f1 == 0.0
    assert bert_score([[1.0, 0.0]], [[-1.0, 0.0]]).f1 == 0.0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        bert_score(np.eye(2), np.eye(3))
    with pytest.raises(ValidationError):
        bert_score(np.zeros((0, 2)), np.eye(2))


def test_permutation_invariance():
    rng = np.random.default_rng(0)
    for _ in range(20):
        cand = rng.normal(size=(5, 4))
        ref = rng.normal(size=(3, 4))
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        ref /= np.linalg.norm(ref, axis=1, keepdims=True)
        base = bert_score(cand, ref)
        shuffled = bert_score(cand[rng.permutation(5)], ref[rng.permutation(3)])
        assert (shuffled.precision, shuffled.recall) == pytest.approx((base.precision, base.recall))


def test_hashing_provider():
    provider = HashingEmbeddingProvider(dimension=16, window=1)
    assert isinstance(provider, EmbeddingProvider)
    tokens = ["a", "b", "a", "c"]
    vectors = provider.embed(tokens)
    assert vectors.shape == (4, 16)
    np.testing.assert_allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-6)
    np.testing.assert_array_equal(vectors, provider.embed(tokens))
    # Same token, different neighbours.
    assert not np.allclose(vectors[0], vectors[2])
    assert provider.embed([]).shape == (0, 16)


def test_hashing_provider_without_context_is_per_token():
    vectors = HashingEmbeddingProvider(dimension=8, window=0).embed(["x", "y", "x"])
    np.testing.assert_array_equal(vectors[0], vectors[2])


def test_abstract_provider_cannot_be_instantiated():
    with pytest.raises(TypeError):
        EmbeddingProvider()
