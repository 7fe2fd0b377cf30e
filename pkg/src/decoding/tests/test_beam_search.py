import itertools

import numpy as np
import pytest
from scipy.special import log_softmax

from decoding import GenerationConfig, beam_search, next_token_log_probs
from validation import ValidationError


def plain_config(**overrides):
    values = dict(temperature=0.0, num_beams=1, early_stopping=True, max_new_tokens=5)
    values.update(overrides)
    return GenerationConfig(**values)


class TableLogits:
    """Logits that ignore the prefix."""

    def __init__(self, logits):
        self.logits = np.asarray(logits, dtype=np.float64)
        self.calls = 0

    def __call__(self, prefix):
        self.calls += 1
        return self.logits


class HashedLogits:
    """Prefix-dependent pseudo-random logits, stable for a given prefix."""

    def __init__(self, vocab_size, seed):
        self.vocab_size = vocab_size
        self.seed = seed

    def __call__(self, prefix):
        rng = np.random.default_rng([self.seed, *prefix])
        return rng.normal(size=self.vocab_size) * 2


def exhaustive_best(log_probs, eos, max_new_tokens):
    others = [t for t in range(len(log_probs)) if t != eos]
    best = -np.inf
    for length in range(max_new_tokens):
        for body in itertools.product(others, repeat=length):
            best = max(best, sum(log_probs[t] for t in body) + log_probs[eos])
    return best


def greedy(next_logits, prompt, eos, max_new_tokens):
    tokens = []
    for _ in range(max_new_tokens):
        token = int(np.argmax(next_logits(prompt + tokens)))
        tokens.append(token)
        if token == eos:
            break
    return tokens


def test_three_token_oracle():
    logits = [0.3, 0.1, -0.2]
    hypothesis = beam_search(TableLogits(logits), [0], plain_config(num_beams=27, max_new_tokens=3), eos=2)
    assert hypothesis.finished
    assert hypothesis.log_score == exhaustive_best(log_softmax(logits), 2, 3)


def test_oracle_equivalence_on_random_tables():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        vocab_size = int(rng.integers(2, 9))
        max_new_tokens = int(rng.integers(1, 6))
        while vocab_size ** max_new_tokens > 4096:
            max_new_tokens -= 1
        eos = int(rng.integers(vocab_size))
        logits = rng.normal(size=vocab_size) * 2
        cfg = plain_config(num_beams=vocab_size ** max_new_tokens, max_new_tokens=max_new_tokens)
        hypothesis = beam_search(TableLogits(logits), [0], cfg, eos)
        expected = exhaustive_best(log_softmax(logits), eos, max_new_tokens)
        assert hypothesis.log_score == expected, seed


def exhaustive_prefix_best(provider, prompt, eos, max_new_tokens):
    vocab_size = len(provider(prompt))
    others = [t for t in range(vocab_size) if t != eos]
    best = -np.inf
    for length in range(max_new_tokens):
        for body in itertools.product(others, repeat=length):
            score = 0.0
            for position, token in enumerate([*body, eos]):
                score += float(log_softmax(provider(prompt + list(body[:position])))[token])
            best = max(best, score)
    return best


def test_width_sweep_on_a_fixed_table():
    # With prefix-independent logits EOS at the first step is the best finished
    # hypothesis; it is reached once the beam is wider than the tokens ranked above it.
    for seed in range(50):
        rng = np.random.default_rng(seed)
        logits = rng.normal(size=5) * 2
        results = [
            beam_search(TableLogits(logits), [0], plain_config(num_beams=width, max_new_tokens=4), eos=4)
            for width in range(1, 9)
        ]
        flags = [h.finished for h in results]
        assert flags == sorted(flags) and flags[-1], seed
        finished = [h.log_score for h in results if h.finished]
        assert finished == sorted(finished), seed
        assert finished[-1] == log_softmax(logits)[4]


@pytest.mark.parametrize("early_stopping", [True, False])
def test_width_sweep_never_beats_exhaustive_search(early_stopping):
    # Three tokens and two steps: at most four non-EOS candidates exist per step,
    # so from width 5 up the walk never stops early and every prefix survives.
    for seed in range(100):
        provider = HashedLogits(vocab_size=3, seed=seed)
        best = exhaustive_prefix_best(provider, [1], eos=0, max_new_tokens=2)
        for width in range(1, 9):
            cfg = plain_config(num_beams=width, max_new_tokens=2, early_stopping=early_stopping)
            hypothesis = beam_search(provider, [1], cfg, eos=0)
            if width >= 5:
                assert hypothesis.finished and hypothesis.log_score == best, (seed, width)
            elif hypothesis.finished:
                assert hypothesis.log_score <= best, (seed, width)


@pytest.mark.parametrize("seed", range(10))
def test_single_beam_matches_greedy(seed):
    provider = HashedLogits(vocab_size=6, seed=seed)
    prompt = [1, 2]
    hypothesis = beam_search(provider, prompt, plain_config(num_beams=1, max_new_tokens=8), eos=0)
    assert hypothesis.tokens == greedy(provider, prompt, eos=0, max_new_tokens=8)


class RecordingLogits(HashedLogits):
    def __init__(self, vocab_size, seed):
        super().__init__(vocab_size, seed)
        self.steps = []

    def __call__(self, prefix):
        logits = super().__call__(prefix)
        self.steps.append((list(prefix), logits))
        return logits


def test_constraints_hold_over_many_sequences():
    prompt = [5, 6, 7]
    cfg = plain_config(
        num_beams=4, max_new_tokens=10, no_repeat_ngram_size=3, repetition_penalty=2.0, early_stopping=False
    )
    for seed in range(1000):
        provider = RecordingLogits(vocab_size=16, seed=seed)
        hypothesis = beam_search(provider, prompt, cfg, eos=0)
        assert not hypothesis.forced_eos_steps
        trigrams = list(zip(hypothesis.tokens, hypothesis.tokens[1:], hypothesis.tokens[2:]))
        assert len(trigrams) == len(set(trigrams)), seed

        # No seen token with a positive logit overtakes an unseen one that was ahead of it.
        for prefix, logits in provider.steps:
            log_probs = next_token_log_probs(logits, prefix, prefix[len(prompt) :], cfg)
            seen = np.zeros(logits.size, dtype=bool)
            seen[prefix] = True
            allowed = np.isfinite(log_probs)
            for token in np.flatnonzero(seen & allowed & (logits > 0)):
                ahead = ~seen & allowed & (logits > logits[token])
                assert np.all(log_probs[ahead] >= log_probs[token]), seed


def test_scope_all_blocks_prompt_ngrams():
    # Token 1 is the best continuation but would repeat the prompt bigram (0, 1).
    logits = [-5.0, 5.0, 0.0, -1.0]
    blocked = plain_config(max_new_tokens=1, no_repeat_ngram_size=2, no_repeat_ngram_scope="all")
    free = plain_config(max_new_tokens=1, no_repeat_ngram_size=2, no_repeat_ngram_scope="generated")
    assert beam_search(TableLogits(logits), [0, 1, 0], blocked, eos=3).tokens == [2]
    assert beam_search(TableLogits(logits), [0, 1, 0], free, eos=3).tokens == [1]


def test_forced_eos_when_everything_is_filtered():
    logits = [4.0, 0.0]
    cfg = plain_config(top_k=1, no_repeat_ngram_size=1, max_new_tokens=5)
    hypothesis = beam_search(TableLogits(logits), [1], cfg, eos=1)
    assert hypothesis.tokens == [0, 1]
    assert hypothesis.finished
    assert hypothesis.forced_eos_steps == [1]
    assert hypothesis.log_score == pytest.approx(log_softmax(logits)[1])


def test_zero_budget_returns_empty_hypothesis():
    hypothesis = beam_search(TableLogits([1.0, 2.0]), [0], plain_config(max_new_tokens=0), eos=1)
    assert hypothesis.tokens == [] and not hypothesis.finished and hypothesis.log_score == 0.0


def test_budget_exhausted_returns_best_live():
    hypothesis = beam_search(TableLogits([3.0, 0.0, -9.0]), [0], plain_config(num_beams=2, max_new_tokens=2), eos=2)
    assert hypothesis.tokens == [0, 0]
    assert not hypothesis.finished


def test_deterministic():
    provider = HashedLogits(vocab_size=8, seed=3)
    cfg = GenerationConfig.preset("paper", max_new_tokens=6)
    assert beam_search(provider, [1, 2, 3], cfg, eos=0) == beam_search(provider, [1, 2, 3], cfg, eos=0)


def test_batch_provider_is_used():
    class Batched(TableLogits):
        def batch(self, prefixes):
            assert len({len(p) for p in prefixes}) == 1
            return [self.logits for _ in prefixes]

        def __call__(self, prefix):
            raise AssertionError("single-prefix path should not be used")

    hypothesis = beam_search(Batched([0.2, 0.1, 0.0]), [0], plain_config(num_beams=3, max_new_tokens=3), eos=2)
    assert hypothesis.finished


def test_empty_prompt_is_rejected():
    with pytest.raises(ValidationError):
        beam_search(TableLogits([1.0, 0.0]), [], plain_config(), eos=1)


def test_length_penalty_prefers_longer_output():
    # EOS right away scores log p(eos); longer outputs win once scores are length-normalised.
    logits = [1.0, 0.9]
    raw = beam_search(TableLogits(logits), [0], plain_config(num_beams=4, max_new_tokens=4, early_stopping=False), eos=1)
    normalised = beam_search(
        TableLogits(logits), [0], plain_config(num_beams=4, max_new_tokens=4, length_penalty=1.0, early_stopping=True), eos=1
    )
    assert raw.tokens == [1]
    assert len(normalised.tokens) > 1
