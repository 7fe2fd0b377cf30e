import pytest

from data import ArticlePair, CleaningConfig, TooShort, clean, ngram_overlap
from validation import ValidationError


@pytest.mark.parametrize(
    "text,summary,n,expected",
    [
        ("a b c d", "a b", 1, 1.0),
        ("a b", "c d", 1, 0.0),
        ("a b c", "a b x", 2, 0.5),
        ("A B C", "a b", 2, 1.0),
        ("a b", "a a a", 1, 1.0),
    ],
)
def test_ngram_overlap(text, summary, n, expected):
    assert ngram_overlap(text, summary, n) == pytest.approx(expected)


def test_ngram_overlap_too_short():
    with pytest.raises(TooShort):
        ngram_overlap("a b c", "a", 2)


def make_config(**overrides):
    values = dict(min_summary_tokens=2, max_summary_tokens=5, overlap_n=1, min_overlap=0.2, max_overlap=0.9)
    values.update(overrides)
    return CleaningConfig(**values)


def test_clean_filters():
    pairs = [
        ArticlePair("one two three four", "one"),  # too short
        ArticlePair("one two three four", "one two three x y z"),  # too long
        ArticlePair("one two three four", "x y z"),  # overlap 0
        ArticlePair("one two three four", "one two"),  # overlap 1.0, near copy
        ArticlePair("one two three four", "one two new"),  # kept
        ArticlePair("   ", "one two new"),  # empty text
    ]
    kept, stats = clean(pairs, make_config())
    assert kept == [pairs[4]]
    assert stats.total == 6
    assert stats.kept == 1
    assert stats.too_short == 1
    assert stats.too_long == 1
    assert stats.overlap_too_low == 1
    assert stats.overlap_too_high == 1
    assert stats.empty_text == 1
    assert stats.dropped == 5


def test_clean_identity_and_idempotence():
    pairs = [ArticlePair("alpha beta gamma", "alpha delta"), ArticlePair("x y z w", "x q r")]
    cfg = make_config()
    kept, stats = clean(pairs, cfg)
    assert kept == pairs
    assert stats.dropped == 0
    again, _ = clean(kept, cfg)
    assert again == kept


def test_bounds_are_inclusive():
    cfg = make_config(min_summary_tokens=2, max_summary_tokens=3, min_overlap=0.5, max_overlap=0.99)
    pairs = [ArticlePair("a b c", "a x"), ArticlePair("a b c", "a b x")]
    kept, _ = clean(pairs, cfg)
    assert kept == pairs


@pytest.mark.parametrize(
    "overrides",
    [
        dict(min_summary_tokens=5, max_summary_tokens=5),
        dict(min_overlap=0.9, max_overlap=0.1),
        dict(min_overlap=-0.1),
        dict(max_overlap=1.5),
        dict(min_overlap=float("nan")),
        dict(max_overlap=float("nan")),
    ],
)
def test_invalid_config(overrides):
    with pytest.raises(ValidationError):
        make_config(**overrides)


def test_config_types():
    with pytest.raises(TypeError):
        make_config(overlap_n=2.0)
    assert CleaningConfig().dict == {
        "min_summary_tokens": 15,
        "max_summary_tokens": 120,
        "overlap_n": 2,
        "min_overlap": 0.1,
        "max_overlap": 0.9,
    }
