import numpy as np
import pytest

from decoding import (
    GenerationConfig,
    InvalidK,
    InvalidPenalty,
    apply_repetition_penalty,
    apply_temperature,
    banned_ngram_continuations,
    filter_top_k,
    filter_top_p,
    next_token_log_probs,
)
from validation import ValidationError

PROBS = [0.5, 0.3, 0.15, 0.05]


def test_temperature_one_is_softmax():
    np.testing.assert_allclose(apply_temperature([1, 2, 3], 1), [0.0900, 0.2447, 0.6652], atol=1e-4)


@pytest.mark.parametrize("logits,expected", [([1, 2, 3], [0, 0, 1]), ([5, 5], [1, 0])])
def test_zero_temperature_is_argmax(logits, expected):
    np.testing.assert_array_equal(apply_temperature(logits, 0), expected)


def test_temperature_output_sums_to_one():
    rng = np.random.default_rng(0)
    for temperature in [0, 0.1, 0.5, 1]:
        assert apply_temperature(rng.normal(size=7) * 10, temperature).sum() == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize(
    "seen,expected", [({0}, [1.0, -1.0]), ({1}, [2.0, -2.0]), (set(), [2.0, -1.0]), ({0, 1}, [1.0, -2.0])]
)
def test_repetition_penalty(seen, expected):
    np.testing.assert_array_equal(apply_repetition_penalty([2.0, -1.0], seen, 2), expected)


def test_repetition_penalty_keeps_zero_and_identity():
    np.testing.assert_array_equal(apply_repetition_penalty([0.0, 3.0], {0, 1}, 1), [0.0, 3.0])
    np.testing.assert_array_equal(apply_repetition_penalty([0.0, 3.0], {0}, 4), [0.0, 3.0])
    with pytest.raises(InvalidPenalty):
        apply_repetition_penalty([1.0], {0}, 0.5)


def test_penalty_never_promotes_seen_token():
    rng = np.random.default_rng(1)
    for _ in range(200):
        logits = rng.normal(size=10) * 3
        seen = set(rng.choice(10, size=3, replace=False).tolist())
        penalized = apply_repetition_penalty(logits, seen, float(rng.uniform(1, 4)))
        unseen = [t for t in range(10) if t not in seen]
        for token in seen:
            if logits[token] <= 0:
                continue
            before = sum(logits[u] > logits[token] for u in unseen)
            after = sum(penalized[u] > penalized[token] for u in unseen)
            assert after >= before


@pytest.mark.parametrize(
    "k,expected", [(1, [1, 0, 0, 0]), (2, [0.625, 0.375, 0, 0]), (4, PROBS), (10, PROBS)]
)
def test_top_k(k, expected):
    np.testing.assert_allclose(filter_top_k(PROBS, k), expected)


def test_top_k_boundary_ties_keep_lower_index():
    np.testing.assert_allclose(filter_top_k([0.2, 0.4, 0.2, 0.2], 2), [1 / 3, 2 / 3, 0, 0])


@pytest.mark.parametrize("k", [0, -1, 1.5])
def test_top_k_rejects_non_positive(k):
    with pytest.raises(InvalidK):
        filter_top_k(PROBS, k)


@pytest.mark.parametrize(
    "p,expected", [(0.8, [0.625, 0.375, 0, 0]), (0.5, [1, 0, 0, 0]), (1.0, PROBS), (0.81, [0.5 / 0.95, 0.3 / 0.95, 0.15 / 0.95, 0])]
)
def test_top_p(p, expected):
    np.testing.assert_allclose(filter_top_p(PROBS, p), expected)


def test_filters_keep_relative_order():
    rng = np.random.default_rng(2)
    for _ in range(50):
        probs = rng.dirichlet(np.ones(8))
        for filtered in (filter_top_k(probs, 3), filter_top_p(probs, 0.7)):
            kept = np.flatnonzero(filtered)
            assert np.array_equal(np.argsort(-filtered[kept], kind="stable"), np.argsort(-probs[kept], kind="stable"))


@pytest.mark.parametrize(
    "prefix,n,expected",
    [
        ([1, 2, 3, 1, 2], 3, {3}),
        ([], 3, set()),
        ([1], 3, set()),
        ([1, 1, 1], 1, {1}),
        ([1, 2, 1, 3, 1], 2, {2, 3}),
        ([4, 5, 6], 3, set()),
    ],
)
def test_banned_ngrams(prefix, n, expected):
    assert banned_ngram_continuations(prefix, n) == expected


def test_log_probs_without_transforms_are_log_softmax():
    cfg = GenerationConfig(temperature=0.0)
    log_probs = next_token_log_probs([1.0, 2.0, 3.0], [], [], cfg)
    np.testing.assert_allclose(np.exp(log_probs), [0.0900, 0.2447, 0.6652], atol=1e-4)


def test_log_probs_apply_filters_then_ban():
    cfg = GenerationConfig(top_k=2, no_repeat_ngram_size=1)
    log_probs = next_token_log_probs(np.log(PROBS), [], [0], cfg)
    assert log_probs[0] == -np.inf
    assert log_probs[1] == pytest.approx(np.log(0.375))
    assert np.isneginf(log_probs[2:]).all()


def test_log_probs_penalize_seen_tokens():
    cfg = GenerationConfig(repetition_penalty=2.0)
    log_probs = next_token_log_probs([2.0, 1.5], [0], [], cfg)
    assert log_probs[1] > log_probs[0]


def test_config_validation():
    with pytest.raises(ValidationError):
        GenerationConfig(temperature=1.5)
    with pytest.raises(ValidationError):
        GenerationConfig(repetition_penalty=0.9)
    with pytest.raises(ValidationError):
        GenerationConfig(top_p=0.0)
    with pytest.raises(ValidationError):
        GenerationConfig(no_repeat_ngram_scope="prompt")
    for field in ("temperature", "repetition_penalty", "top_p", "length_penalty"):
        with pytest.raises(ValidationError):
            GenerationConfig(**{field: float("nan")})
    with pytest.raises(TypeError):
        GenerationConfig(num_beams=2.0)
    assert GenerationConfig(max_new_tokens=0).max_new_tokens == 0


def test_replication_preset():
    cfg = GenerationConfig.preset("paper")
    assert (cfg.temperature, cfg.top_k, cfg.top_p, cfg.num_beams) == (0.0, 3, 0.95, 20)
    assert cfg.early_stopping and cfg.no_repeat_ngram_size == 3 and cfg.repetition_penalty == 2.0
    assert cfg.no_repeat_ngram_scope == "generated"
    assert GenerationConfig.preset("paper", num_beams=5).num_beams == 5
    with pytest.raises(ValidationError):
        GenerationConfig.preset("fast")
