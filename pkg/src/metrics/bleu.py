import math

from validation import validate_number

from .text import ngrams, token_pair


def bleu(candidate: str, reference: str, max_n: int = 4) -> float:
    """
    Single-reference sentence BLEU.

    Clipped n-gram precisions for n = 1..max_n are combined by a uniform
    geometric mean and scaled by the brevity penalty. Orders longer than the
    candidate are left out of the mean, so identical short texts still
    score 1.

    Args:
        candidate: Generated text.
        reference: Human-written text.
        max_n: Highest n-gram order; 1 gives clipped unigram precision.

    Returns:
        float: Score in [0, 1]. An empty candidate or any zero precision gives 0.
    """
    validate_number(max_n, "max_n", types=int, minimum=1)
    candidate_tokens, reference_tokens = token_pair(candidate, reference)
    c, r = len(candidate_tokens), len(reference_tokens)
    if c == 0:
        return 0.0

    orders = range(1, min(max_n, c) + 1)
    log_precision = 0.0
    for n in orders:
        candidate_grams = ngrams(candidate_tokens, n)
        clipped = sum((candidate_grams & ngrams(reference_tokens, n)).values())
        if clipped == 0:
            return 0.0
        log_precision += math.log(clipped / sum(candidate_grams.values())) / len(orders)

    brevity_penalty = 1.0 if c > r else math.exp(1 - r / c)
    return brevity_penalty * math.exp(log_precision)
