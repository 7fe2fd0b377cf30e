import hashlib
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from validation import ValidationError, validate_number

from .prf import PRF


class DimensionError(ValidationError):
    pass


class EmbeddingProvider(ABC):
    """Maps a token list to one unit-norm contextual vector per token."""

    @property
    @abstractmethod
    def dimension(self) -> int:
        pass

    @abstractmethod
    def embed(self, tokens: Sequence[str]) -> np.ndarray:
        """Returns a (len(tokens), dimension) array of unit-norm rows."""


class HashingEmbeddingProvider(EmbeddingProvider):
    """
    Deterministic pseudo-embeddings without a pretrained encoder.

    Each token's vector is drawn from a generator seeded by a hash of the
    token and its `window` neighbours on both sides, so equal contexts give
    equal vectors.
    """

    def __init__(self, dimension: int = 64, window: int = 1):
        validate_number(dimension, "dimension", types=int, minimum=1)
        validate_number(window, "window", types=int, minimum=0)
        self._dimension = dimension
        self.window = window

    @property
    def dimension(self) -> int:
        return self._dimension

    def _vector(self, context: Sequence[str]) -> np.ndarray:
        digest = hashlib.blake2b("\x1f".join(context).encode("utf-8"), digest_size=8).digest()
        vector = np.random.default_rng(int.from_bytes(digest, "little")).normal(size=self._dimension)
        return vector / np.linalg.norm(vector)

    def embed(self, tokens: Sequence[str]) -> np.ndarray:
        rows = [
            self._vector(tokens[max(0, i - self.window) : i + self.window + 1]) for i in range(len(tokens))
        ]
        return np.array(rows).reshape(len(tokens), self._dimension)


def bert_score(cand_emb: np.ndarray, ref_emb: np.ndarray) -> PRF:
    """
    Greedy cosine matching of candidate and reference token embeddings.

    Precision averages, over candidate vectors, the best similarity to any
    reference vector; recall does the same from the reference side.
    Similarities are clamped to [0, 1].

    Raises:
        DimensionError: If the two sides have different vector sizes.
    """
    cand_emb = np.atleast_2d(np.asarray(cand_emb, dtype=np.float64))
    ref_emb = np.atleast_2d(np.asarray(ref_emb, dtype=np.float64))
    if cand_emb.size == 0 or ref_emb.size == 0:
        raise ValidationError("bert_score needs at least one vector on each side")
    if cand_emb.shape[1] != ref_emb.shape[1]:
        raise DimensionError(f"Embedding sizes differ: {cand_emb.shape[1]} vs {ref_emb.shape[1]}")

    similarity = np.clip(cand_emb @ ref_emb.T, 0.0, 1.0)
    return PRF.from_pr(float(similarity.max(axis=1).mean()), float(similarity.max(axis=0).mean()))
