import pytest

from data import ArticlePair, format_example
from decoding import CheckpointLogits, GenerationConfig, summarize, summarize_many
from lm_core import ContextOverflow, ModelConfig, TrainConfig, encode_training_example, init_model, train
from tokenizer import BASE_SYMBOLS, SPECIAL_TOKENS, build_vocab

PAIRS = [
    ArticlePair("Mayor opens a new bridge over the river today", "bridge opened"),
    ArticlePair("Local team wins the regional football cup final", "team wins cup"),
    ArticlePair("Heavy snow closes mountain roads for two days", "snow shuts roads"),
]


@pytest.fixture(scope="module")
def memorized():
    vocab = build_vocab([format_example(pair) for pair in PAIRS], BASE_SYMBOLS + len(SPECIAL_TOKENS) + 40)
    config = ModelConfig(len(vocab), d_model=64, n_layers=2, n_heads=4, d_ff=128, max_context=160)
    corpus = [encode_training_example(vocab, pair, max_length=160, summary_only=True) for pair in PAIRS]
    cfg = TrainConfig(learning_rate=3e-3, batch_size=3, epochs=300, seed=0, summary_only_loss=True)
    ckpt = train(init_model(config, seed=0), corpus, cfg)
    return ckpt, vocab


def test_overfit_model_reproduces_summaries(memorized):
    ckpt, vocab = memorized
    cfg = GenerationConfig(num_beams=3, max_new_tokens=20)
    for pair in PAIRS:
        assert summarize(ckpt, vocab, pair.text, cfg) == pair.summary


def test_replication_preset_runs(memorized):
    ckpt, vocab = memorized
    cfg = GenerationConfig.preset("paper", max_new_tokens=10)
    first = summarize(ckpt, vocab, PAIRS[0].text, cfg)
    assert first == summarize(ckpt, vocab, PAIRS[0].text, cfg)


def test_zero_budget_gives_empty_summary(memorized):
    ckpt, vocab = memorized
    assert summarize(ckpt, vocab, PAIRS[0].text, GenerationConfig(max_new_tokens=0)) == ""


def test_zero_shot_prompt_runs(memorized):
    ckpt, vocab = memorized
    output = summarize(ckpt, vocab, PAIRS[1].text, GenerationConfig(num_beams=1, max_new_tokens=5), zero_shot=True)
    assert isinstance(output, str)


def test_budget_larger_than_context(memorized):
    ckpt, vocab = memorized
    with pytest.raises(ContextOverflow):
        summarize(ckpt, vocab, PAIRS[0].text, GenerationConfig(max_new_tokens=160))


def test_summarize_many_keeps_order(memorized):
    ckpt, vocab = memorized
    texts = [pair.text for pair in PAIRS] * 2
    cfg = GenerationConfig(num_beams=2, max_new_tokens=12)
    expected = [summarize(ckpt, vocab, text, cfg) for text in texts]
    assert summarize_many(ckpt, vocab, texts, cfg, workers=3) == expected
    assert summarize_many(ckpt, vocab, texts, cfg, workers=1) == expected


def test_batched_logits_match_single(memorized):
    ckpt, _ = memorized
    provider = CheckpointLogits(ckpt)
    prefixes = [[1, 5, 6, 7], [1, 8, 9, 10]]
    batched = provider.batch(prefixes)
    for row, prefix in zip(batched, prefixes):
        assert row == pytest.approx(provider(prefix), abs=1e-5)


def test_summarize_many_can_return_errors(memorized):
    ckpt, vocab = memorized
    results = summarize_many(
        ckpt, vocab, [PAIRS[0].text], GenerationConfig(max_new_tokens=160), return_exceptions=True
    )
    assert len(results) == 1 and isinstance(results[0], ContextOverflow)
    with pytest.raises(ContextOverflow):
        summarize_many(ckpt, vocab, [PAIRS[0].text], GenerationConfig(max_new_tokens=160))
