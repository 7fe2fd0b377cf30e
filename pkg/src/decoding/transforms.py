import numbers
from typing import Iterable, Sequence, Set

import numpy as np
from scipy.special import log_softmax, logsumexp, softmax

from validation import ValidationError

from .config import GenerationConfig

# Slack for cumulative sums such as 0.5 + 0.3 landing just under 0.8.
TOP_P_TOLERANCE = 1e-12


class InvalidPenalty(ValidationError):
    pass


class InvalidK(ValidationError):
    pass


def apply_temperature(logits: Sequence[float], temperature: float) -> np.ndarray:
    """
    Turns logits into probabilities at `temperature`.

    Zero temperature is the argmax limit: a one-hot vector at the first
    maximal logit.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if not 0 <= temperature <= 1:
        raise ValidationError(f"temperature must be in [0, 1], got {temperature}")
    if temperature == 0:
        probs = np.zeros_like(logits)
        probs[int(np.argmax(logits))] = 1.0
        return probs
    return softmax(logits / temperature)


def apply_repetition_penalty(logits: Sequence[float], seen: Iterable[int], penalty: float) -> np.ndarray:
    """
    Penalizes the logits of `seen` tokens: positive logits are divided by
    `penalty`, negative ones multiplied, zeros left alone.

    Raises:
        InvalidPenalty: If `penalty` is below 1.
    """
    if penalty < 1:
        raise InvalidPenalty(f"repetition penalty must be >= 1, got {penalty}")
    penalized = np.array(logits, dtype=np.float64)
    indices = np.fromiter(set(seen), dtype=np.int64)
    if penalty == 1 or indices.size == 0:
        return penalized
    values = penalized[indices]
    penalized[indices] = np.where(values > 0, values / penalty, values * penalty)
    return penalized


def _top_k_mask(scores: np.ndarray, k: int) -> np.ndarray:
    keep = np.zeros(scores.shape, dtype=bool)
    keep[np.argsort(-scores, kind="stable")[:k]] = True
    return keep


def _top_p_mask(probs: np.ndarray, p: float) -> np.ndarray:
    keep = np.zeros(probs.shape, dtype=bool)
    if p >= 1:
        keep[:] = True
        return keep
    order = np.argsort(-probs, kind="stable")
    reached = np.cumsum(probs[order]) >= p - TOP_P_TOLERANCE
    count = int(np.argmax(reached)) + 1 if reached.any() else len(order)
    keep[order[:count]] = True
    return keep


def _renormalize(probs: np.ndarray, keep: np.ndarray) -> np.ndarray:
    filtered = np.where(keep, probs, 0.0)
    return filtered / filtered.sum()


def filter_top_k(probs: Sequence[float], k: int) -> np.ndarray:
    """
    Keeps the `k` most probable entries, lower index first on ties, and
    renormalizes.

    Raises:
        InvalidK: If `k` is not a positive integer.
    """
    if not isinstance(k, numbers.Integral) or isinstance(k, bool) or k < 1:
        raise InvalidK(f"top-k needs a positive integer, got {k!r}")
    probs = np.asarray(probs, dtype=np.float64)
    if k >= probs.size:
        return probs.copy()
    return _renormalize(probs, _top_k_mask(probs, k))


def filter_top_p(probs: Sequence[float], p: float) -> np.ndarray:
    """Keeps the shortest most-probable prefix whose mass reaches `p` and renormalizes."""
    if not 0 < p <= 1:
        raise ValidationError(f"top-p must be in (0, 1], got {p}")
    probs = np.asarray(probs, dtype=np.float64)
    if p >= 1:
        return probs.copy()
    return _renormalize(probs, _top_p_mask(probs, p))


def banned_ngram_continuations(prefix: Sequence[int], n: int) -> Set[int]:
    """
    Tokens that would complete an n-gram already present in `prefix`.

    Example:
        >>> sorted(banned_ngram_continuations([1, 2, 3, 1, 2], 3))
        [3]
    """
    if n < 1:
        raise ValidationError(f"n-gram size must be >= 1, got {n}")
    prefix = list(prefix)
    if len(prefix) < n - 1:
        return set()
    suffix = prefix[len(prefix) - n + 1 :] if n > 1 else []
    banned = set()
    for start in range(len(prefix) - n + 1):
        if prefix[start : start + n - 1] == suffix:
            banned.add(prefix[start + n - 1])
    return banned


def _restrict(log_probs: np.ndarray, keep: np.ndarray) -> np.ndarray:
    restricted = np.where(keep, log_probs, -np.inf)
    return restricted - logsumexp(restricted)


def next_token_log_probs(
    logits: Sequence[float],
    seen: Iterable[int],
    ngram_context: Sequence[int],
    cfg: GenerationConfig,
) -> np.ndarray:
    """
    Per-token log-probabilities for extending one beam.

    The transforms run in a fixed order: repetition penalty, temperature,
    top-k, top-p, then the n-gram ban. Banned tokens get -inf without
    renormalizing what is left; so do tokens removed by the filters.

    Args:
        logits: Raw model logits for the next position.
        seen: Tokens the repetition penalty applies to.
        ngram_context: Tokens checked for repeated n-grams.
        cfg: Generation settings.
    """
    scores = np.asarray(logits, dtype=np.float64)
    if cfg.repetition_penalty != 1:
        scores = apply_repetition_penalty(scores, seen, cfg.repetition_penalty)
    # Zero temperature ranks by the untempered distribution.
    log_probs = log_softmax(scores / cfg.temperature if cfg.temperature > 0 else scores)

    if cfg.top_k is not None and cfg.top_k < log_probs.size:
        log_probs = _restrict(log_probs, _top_k_mask(log_probs, cfg.top_k))
    if cfg.top_p is not None and cfg.top_p < 1:
        log_probs = _restrict(log_probs, _top_p_mask(np.exp(log_probs), cfg.top_p))

    if cfg.no_repeat_ngram_size is not None:
        banned = banned_ngram_continuations(ngram_context, cfg.no_repeat_ngram_size)
        if banned:
            log_probs = log_probs.copy()
            log_probs[list(banned)] = -np.inf
    return log_probs
