import logging
import re
from collections import Counter
from functools import lru_cache
from typing import Iterable, Iterator, List, Sequence, Tuple

from validation import ValidationError, validate_number

from .vocab import (
    BASE_SYMBOLS,
    BOS,
    EOS,
    SEP,
    SPECIAL_TOKENS,
    PAD,
    TokenSequence,
    Vocab,
)

logger = logging.getLogger(__name__)

# Letter runs, digit runs and punctuation runs each keep one optional leading
# space; whitespace before a word stays with the word.
PRETOKENIZE_PATTERN = re.compile(r" ?[^\W\d_]+| ?\d+| ?(?:[^\s\w]|_)+|\s+(?!\S)|\s+")

# PAD has no text literal, so it never appears in encoded text.
_TEXT_SPECIALS = (BOS, SEP, EOS)
_SPECIAL_PATTERN = re.compile("(" + "|".join(re.escape(token) for token in _TEXT_SPECIALS) + ")")
_SPECIAL_BYTES = frozenset(token.encode("utf-8") for token in SPECIAL_TOKENS)


class CorpusEmpty(ValidationError):
    pass


class VocabTooSmall(ValidationError):
    pass


def split_specials(text: str) -> Iterator[Tuple[str, bool]]:
    """Yields (segment, is_special) pieces of `text` in order."""
    for index, segment in enumerate(_SPECIAL_PATTERN.split(text)):
        if index % 2 == 1:
            yield segment, True
        elif segment:
            yield segment, False


def pretokenize(text: str) -> List[str]:
    """Splits special-free text into the chunks BPE merges never cross."""
    return PRETOKENIZE_PATTERN.findall(text)


def _merge_word(word: Tuple[bytes, ...], pair: Tuple[bytes, bytes]) -> Tuple[bytes, ...]:
    left, right = pair
    merged = []
    i = 0
    while i < len(word):
        if i < len(word) - 1 and word[i] == left and word[i + 1] == right:
            merged.append(left + right)
            i += 2
        else:
            merged.append(word[i])
            i += 1
    return tuple(merged)


def build_vocab(corpus: Sequence[str], target_size: int) -> Vocab:
    """
    Learns byte-level BPE merges from `corpus`.

    The most frequent adjacent pair is merged first; equal counts are broken by
    the lexicographic order of the pair so the result depends only on the
    corpus and `target_size`.

    Args:
        corpus: Training texts. Special-token literals are treated as atomic and
            never contribute to merges.
        target_size: Upper bound for the final vocabulary size, specials and
            the 256 base bytes included.

    Returns:
        Vocab: The learned vocabulary.

    Raises:
        CorpusEmpty: If the corpus holds no text.
        VocabTooSmall: If `target_size` cannot fit the base symbols and specials.
    """
    validate_number(target_size, "target_size", types=int, minimum=1)
    minimum_size = BASE_SYMBOLS + len(SPECIAL_TOKENS)
    if target_size < minimum_size:
        raise VocabTooSmall(f"target_size must be at least {minimum_size}, got {target_size}")
    if not corpus or not any(corpus):
        raise CorpusEmpty("Cannot build a vocabulary from an empty corpus")

    word_counts: Counter = Counter()
    for text in corpus:
        for segment, special in split_specials(text):
            if special:
                continue
            for chunk in pretokenize(segment):
                word_counts[chunk.encode("utf-8")] += 1

    words = {tuple(bytes([b]) for b in chunk): count for chunk, count in word_counts.items()}
    merges: List[Tuple[bytes, bytes]] = []

    for _ in range(target_size - minimum_size):
        pair_counts: Counter = Counter()
        for word, count in words.items():
            for pair in zip(word, word[1:]):
                pair_counts[pair] += count

        candidates = [
            (-count, pair) for pair, count in pair_counts.items() if pair[0] + pair[1] not in _SPECIAL_BYTES
        ]
        if not candidates:
            break
        _, best = min(candidates)
        merges.append(best)

        merged_words = {}
        for word, count in words.items():
            new_word = _merge_word(word, best) if best[0] in word else word
            merged_words[new_word] = merged_words.get(new_word, 0) + count
        words = merged_words

    logger.info("Learned %d merges from %d distinct chunks", len(merges), len(word_counts))
    return Vocab(merges)


@lru_cache(maxsize=65536)
def _encode_chunk(vocab: Vocab, chunk: str) -> Tuple[int, ...]:
    ranks = vocab.merge_ranks
    word = [bytes([b]) for b in chunk.encode("utf-8")]
    while len(word) > 1:
        best_rank = None
        best_pair = None
        for pair in zip(word, word[1:]):
            rank = ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank, best_pair = rank, pair
        if best_pair is None:
            break
        word = list(_merge_word(tuple(word), best_pair))
    token_to_id = vocab.token_to_id
    return tuple(token_to_id[token] for token in word)


def encode(vocab: Vocab, text: str) -> TokenSequence:
    """
    Encodes `text` into token ids.

    BOS, SEP and EOS literals map to their single reserved id. Everything else
    is segmented with the learned merges, applied lowest rank first.
    """
    if not isinstance(text, str):
        raise TypeError(f"text must be a str, got {type(text).__name__}")
    ids: TokenSequence = []
    for segment, special in split_specials(text):
        if special:
            ids.append(vocab.special_id(segment))
            continue
        for chunk in pretokenize(segment):
            ids.extend(_encode_chunk(vocab, chunk))
    return ids


def decode(vocab: Vocab, seq: Iterable[int]) -> str:
    """
    Concatenates the byte strings of `seq`, dropping PAD.

    Raises:
        UnknownTokenId: If an id is outside the vocabulary.
    """
    pad_id = vocab.special_id(PAD)
    buffer = bytearray()
    for token_id in seq:
        token = vocab.token_bytes(token_id)
        if token_id == pad_id:
            continue
        buffer.extend(token)
    return buffer.decode("utf-8", errors="replace")
