import logging
from dataclasses import asdict, dataclass
from typing import List, Tuple

from validation import ValidationError, validate_number

from .article import ArticlePair

logger = logging.getLogger(__name__)


class TooShort(ValidationError):
    pass


def _words(text: str) -> List[str]:
    return text.lower().split()


def _ngrams(tokens: List[str], n: int) -> set:
    return {tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)}


def ngram_overlap(text: str, summary: str, n: int) -> float:
    """
    Fraction of distinct summary n-grams that also occur in the text.

    Both sides are lowercased and split on whitespace.

    Raises:
        TooShort: If the summary has fewer than `n` tokens.
    """
    validate_number(n, "n", types=int, minimum=1)
    summary_tokens = _words(summary)
    if len(summary_tokens) < n:
        raise TooShort(f"Summary has {len(summary_tokens)} tokens, fewer than n={n}")
    summary_ngrams = _ngrams(summary_tokens, n)
    text_ngrams = _ngrams(_words(text), n)
    return len(summary_ngrams & text_ngrams) / len(summary_ngrams)


class CleaningConfig:
    """
    Thresholds for the summary-length and n-gram-overlap filters.

    The defaults make the filters usable; they are not tuned to any corpus.
    """

    def __init__(
        self,
        min_summary_tokens: int = 15,
        max_summary_tokens: int = 120,
        overlap_n: int = 2,
        min_overlap: float = 0.1,
        max_overlap: float = 0.9,
    ):
        self.min_summary_tokens = min_summary_tokens
        self.max_summary_tokens = max_summary_tokens
        self.overlap_n = overlap_n
        self.min_overlap = min_overlap
        self.max_overlap = max_overlap
        self.validate()

    def __repr__(self) -> str:
        return f"CleaningConfig({self.dict})"

    @property
    def dict(self) -> dict:
        return {
            "min_summary_tokens": self.min_summary_tokens,
            "max_summary_tokens": self.max_summary_tokens,
            "overlap_n": self.overlap_n,
            "min_overlap": self.min_overlap,
            "max_overlap": self.max_overlap,
        }

    def validate(self) -> None:
        if self.min_summary_tokens >= self.max_summary_tokens:
            raise ValidationError(
                f"min_summary_tokens ({self.min_summary_tokens}) must be below "
                f"max_summary_tokens ({self.max_summary_tokens})"
            )
        if self.min_overlap >= self.max_overlap:
            raise ValidationError(
                f"min_overlap ({self.min_overlap}) must be below max_overlap ({self.max_overlap})"
            )

    @property
    def min_summary_tokens(self) -> int:
        return self._min_summary_tokens

    @min_summary_tokens.setter
    def min_summary_tokens(self, value: int) -> None:
        validate_number(value, "min_summary_tokens", types=int, minimum=1)
        self._min_summary_tokens = value

    @property
    def max_summary_tokens(self) -> int:
        return self._max_summary_tokens

    @max_summary_tokens.setter
    def max_summary_tokens(self, value: int) -> None:
        validate_number(value, "max_summary_tokens", types=int, minimum=1)
        self._max_summary_tokens = value

    @property
    def overlap_n(self) -> int:
        return self._overlap_n

    @overlap_n.setter
    def overlap_n(self, value: int) -> None:
        validate_number(value, "overlap_n", types=int, minimum=1)
        self._overlap_n = value

    @property
    def min_overlap(self) -> float:
        return self._min_overlap

    @min_overlap.setter
    def min_overlap(self, value: float) -> None:
        validate_number(value, "min_overlap", minimum=0, maximum=1)
        self._min_overlap = float(value)

    @property
    def max_overlap(self) -> float:
        return self._max_overlap

    @max_overlap.setter
    def max_overlap(self, value: float) -> None:
        validate_number(value, "max_overlap", minimum=0, maximum=1)
        self._max_overlap = float(value)


@dataclass
class CleaningStats:
    total: int = 0
    kept: int = 0
    empty_text: int = 0
    too_short: int = 0
    too_long: int = 0
    overlap_too_low: int = 0
    overlap_too_high: int = 0

    @property
    def dropped(self) -> int:
        return self.total - self.kept

    @property
    def dict(self) -> dict:
        return asdict(self)


def _rejection(pair: ArticlePair, cfg: CleaningConfig) -> str:
    """Name of the first filter `pair` fails, or an empty string."""
    if not pair.text.strip():
        return "empty_text"
    length = len(_words(pair.summary))
    if length < cfg.min_summary_tokens:
        return "too_short"
    if length > cfg.max_summary_tokens:
        return "too_long"
    try:
        overlap = ngram_overlap(pair.text, pair.summary, cfg.overlap_n)
    except TooShort:
        return "too_short"
    if overlap < cfg.min_overlap:
        return "overlap_too_low"
    if overlap > cfg.max_overlap:
        return "overlap_too_high"
    return ""


def clean(pairs: List[ArticlePair], cfg: CleaningConfig) -> Tuple[List[ArticlePair], CleaningStats]:
    """
    Keeps the pairs whose summary length and n-gram overlap fall inside the
    configured bounds (inclusive). Order is preserved.

    Returns:
        The kept pairs and the per-filter drop counts.
    """
    cfg.validate()
    stats = CleaningStats(total=len(pairs))
    kept = []
    for pair in pairs:
        reason = _rejection(pair, cfg)
        if reason:
            setattr(stats, reason, getattr(stats, reason) + 1)
        else:
            kept.append(pair)
    stats.kept = len(kept)
    logger.info("Cleaning kept %d of %d pairs", stats.kept, stats.total)
    return kept, stats
