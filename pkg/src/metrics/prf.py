from dataclasses import dataclass


def f1_score(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


@dataclass(frozen=True)
class PRF:
    """
    Precision, recall and F1 of one comparison.

    `short_text` marks a score forced to zero because a text had too few
    tokens to be compared.
    """

    precision: float
    recall: float
    f1: float
    short_text: bool = False

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> "PRF":
        return cls(precision, recall, f1_score(precision, recall))

    @classmethod
    def from_counts(cls, matches: int, candidate_total: int, reference_total: int) -> "PRF":
        """PRF of `matches` shared units out of the candidate and reference totals."""
        if candidate_total == 0 or reference_total == 0:
            return cls.short()
        return cls.from_pr(matches / candidate_total, matches / reference_total)

    @classmethod
    def short(cls) -> "PRF":
        return cls(0.0, 0.0, 0.0, short_text=True)
