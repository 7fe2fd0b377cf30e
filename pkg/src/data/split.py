from typing import List, Tuple

import numpy as np

from validation import ValidationError, validate_number

from .article import ArticlePair


class TooFewExamples(ValidationError):
    pass


def split(
    pairs: List[ArticlePair], test_fraction: float, seed: int
) -> Tuple[List[ArticlePair], List[ArticlePair]]:
    """
    Partitions `pairs` into train and test halves.

    A seeded shuffle decides membership: the first round(test_fraction * N)
    shuffled positions form the test half. Both halves keep the input order.

    Args:
        pairs: The corpus to split.
        test_fraction: Share of the corpus used for testing, strictly between 0 and 1.
        seed: Seed of the shuffle.

    Returns:
        (train, test)

    Raises:
        TooFewExamples: If fewer than two pairs are given.
    """
    validate_number(
        test_fraction,
        "test_fraction",
        minimum=0,
        maximum=1,
        exclusive_minimum=True,
        exclusive_maximum=True,
    )
    validate_number(seed, "seed", types=int, minimum=0)
    if len(pairs) < 2:
        raise TooFewExamples(f"Need at least 2 pairs to split, got {len(pairs)}")

    n_test = int(round(test_fraction * len(pairs)))
    order = np.random.default_rng(seed).permutation(len(pairs))
    is_test = np.zeros(len(pairs), dtype=bool)
    is_test[order[:n_test]] = True

    train = [pair for pair, test in zip(pairs, is_test) if not test]
    test = [pair for pair, test in zip(pairs, is_test) if test]
    return train, test
