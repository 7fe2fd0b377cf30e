import re
from collections import Counter
from typing import List, Sequence, Tuple

_PUNCTUATION = re.compile(r"[^\w\s]|_")


def tokenize_for_metrics(text: str) -> List[str]:
    """Lowercases `text`, replaces punctuation with spaces and splits on whitespace."""
    return _PUNCTUATION.sub(" ", text.lower()).split()


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    """Counts the n-grams of `tokens` as tuples."""
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def lcs_length(first: Sequence[str], second: Sequence[str]) -> int:
    """Length of the longest common subsequence, by dynamic programming over the shorter side."""
    if len(first) < len(second):
        first, second = second, first
    previous = [0] * (len(second) + 1)
    for token in first:
        current = [0]
        for j, other in enumerate(second, start=1):
            current.append(previous[j - 1] + 1 if token == other else max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def token_pair(candidate: str, reference: str) -> Tuple[List[str], List[str]]:
    return tokenize_for_metrics(candidate), tokenize_for_metrics(reference)
