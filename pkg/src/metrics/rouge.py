from validation import validate_number

from .prf import PRF
from .text import lcs_length, ngrams, token_pair


def rouge_n(candidate: str, reference: str, n: int) -> PRF:
    """
    ROUGE-N: clipped n-gram overlap between `candidate` and `reference`.

    Texts with fewer than `n` tokens score zero with `short_text` set.
    """
    validate_number(n, "n", types=int, minimum=1)
    candidate_tokens, reference_tokens = token_pair(candidate, reference)
    if len(candidate_tokens) < n or len(reference_tokens) < n:
        return PRF.short()
    candidate_grams = ngrams(candidate_tokens, n)
    reference_grams = ngrams(reference_tokens, n)
    matches = sum((candidate_grams & reference_grams).values())
    return PRF.from_counts(matches, sum(candidate_grams.values()), sum(reference_grams.values()))


def rouge_l(candidate: str, reference: str) -> PRF:
    """ROUGE-L from the longest common subsequence of the two token lists."""
    candidate_tokens, reference_tokens = token_pair(candidate, reference)
    if not candidate_tokens or not reference_tokens:
        return PRF.short()
    return PRF.from_counts(lcs_length(candidate_tokens, reference_tokens), len(candidate_tokens), len(reference_tokens))
