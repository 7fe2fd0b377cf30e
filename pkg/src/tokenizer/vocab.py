import numbers
import os
from types import MappingProxyType
from typing import Dict, List, Mapping, Sequence, Tuple

from validation import ValidationError, validate_collection

TokenSequence = List[int]

PAD = "<pad>"
BOS = "<s>"
SEP = "<|sep|>"
EOS = "</s>"
# Order fixes the reserved ids: PAD=0, BOS=1, SEP=2, EOS=3.
SPECIAL_TOKENS: Tuple[str, ...] = (PAD, BOS, SEP, EOS)
BASE_SYMBOLS = 256

FORMAT_TAG = "bpe-v1"


class UnknownTokenId(ValidationError):
    pass


class VocabFormatError(ValidationError):
    pass


class Vocab:
    """
    Byte-level BPE vocabulary.

    Ids are dense: the special tokens come first, then the 256 single bytes,
    then one id per merge in the order the merges were learned.
    """

    def __init__(self, merges: Sequence[Tuple[bytes, bytes]] = ()):
        """
        Args:
            merges: Ordered (left, right) byte-string pairs. Both sides of every
                merge must already be tokens when the merge is reached.

        Raises:
            VocabFormatError: If a merge references an unknown token, repeats a
                token or produces a special-token literal.
        """
        special_bytes = {token.encode("utf-8") for token in SPECIAL_TOKENS}

        id_to_bytes: List[bytes] = [token.encode("utf-8") for token in SPECIAL_TOKENS]
        token_to_id: Dict[bytes, int] = {}
        for byte in range(BASE_SYMBOLS):
            token_to_id[bytes([byte])] = len(id_to_bytes)
            id_to_bytes.append(bytes([byte]))

        ranks: Dict[Tuple[bytes, bytes], int] = {}
        for rank, merge in enumerate(merges):
            try:
                validate_collection(
                    merge, collection_type=tuple, element_count=2, element_types=bytes, name="Merge"
                )
            except ValidationError as e:
                raise VocabFormatError(f"Merge {rank}: {e}") from e
            left, right = merge
            if left not in token_to_id or right not in token_to_id:
                raise VocabFormatError(f"Merge {rank} uses a token that does not exist yet: {merge!r}")
            merged = left + right
            if merged in token_to_id:
                raise VocabFormatError(f"Merge {rank} produces an existing token: {merged!r}")
            if merged in special_bytes:
                raise VocabFormatError(f"Merge {rank} produces a special-token literal: {merged!r}")
            ranks[merge] = rank
            token_to_id[merged] = len(id_to_bytes)
            id_to_bytes.append(merged)

        self._merges = tuple(merges)
        self._ranks = ranks
        self._token_to_id = token_to_id
        self._id_to_bytes = tuple(id_to_bytes)
        self._special_ids = {token: idx for idx, token in enumerate(SPECIAL_TOKENS)}
        self._hash = hash(self._merges)

    def __repr__(self) -> str:
        return f"Vocab(size={len(self)}, merges={len(self._merges)})"

    def __len__(self) -> int:
        return len(self._id_to_bytes)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocab) and self._merges == other._merges

    def __hash__(self) -> int:
        return self._hash

    @property
    def merges(self) -> Tuple[Tuple[bytes, bytes], ...]:
        return self._merges

    @property
    def merge_ranks(self) -> Mapping[Tuple[bytes, bytes], int]:
        return MappingProxyType(self._ranks)

    @property
    def token_to_id(self) -> Mapping[bytes, int]:
        """Regular (non-special) tokens keyed by their byte string."""
        return MappingProxyType(self._token_to_id)

    @property
    def special_tokens(self) -> Mapping[str, int]:
        return MappingProxyType(self._special_ids)

    def special_id(self, token: str) -> int:
        try:
            return self._special_ids[token]
        except KeyError:
            raise KeyError(f"Not a special token: {token!r}") from None

    def token_bytes(self, token_id: int) -> bytes:
        if not isinstance(token_id, numbers.Integral) or not 0 <= token_id < len(self._id_to_bytes):
            raise UnknownTokenId(f"Token id {token_id} is outside vocabulary of size {len(self)}")
        return self._id_to_bytes[int(token_id)]

    @property
    def pad_id(self) -> int:
        return self._special_ids[PAD]

    @property
    def bos_id(self) -> int:
        return self._special_ids[BOS]

    @property
    def sep_id(self) -> int:
        return self._special_ids[SEP]

    @property
    def eos_id(self) -> int:
        return self._special_ids[EOS]

    def save(self, path: str) -> None:
        """
        Writes the vocabulary as `bpe-v1` text: a header with the vocabulary
        size, the special tokens one per line, then one hex-encoded merge per line.
        """
        lines = [f"{FORMAT_TAG} {len(self)}"]
        lines.extend(SPECIAL_TOKENS)
        lines.extend(f"{left.hex()} {right.hex()}" for left, right in self._merges)
        with open(path, "w", encoding="utf-8", newline="\n") as file:
            file.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str) -> "Vocab":
        if not os.path.exists(path):
            raise FileNotFoundError(f"Vocabulary file not found: {path}")
        with open(path, "r", encoding="utf-8", newline="") as file:
            lines = file.read().split("\n")
        if lines and lines[-1] == "":
            lines.pop()

        if not lines:
            raise VocabFormatError(f"Empty vocabulary file: {path}")
        header = lines[0].split(" ")
        if len(header) != 2 or header[0] != FORMAT_TAG or not header[1].isdigit():
            raise VocabFormatError(f"Bad vocabulary header in {path}: {lines[0]!r}")
        size = int(header[1])

        specials = tuple(lines[1 : 1 + len(SPECIAL_TOKENS)])
        if specials != SPECIAL_TOKENS:
            raise VocabFormatError(f"Special tokens in {path} do not match {SPECIAL_TOKENS}")

        merges = []
        for number, line in enumerate(lines[1 + len(SPECIAL_TOKENS) :], start=2 + len(SPECIAL_TOKENS)):
            parts = line.split(" ")
            try:
                if len(parts) != 2:
                    raise ValueError("expected two fields")
                merges.append((bytes.fromhex(parts[0]), bytes.fromhex(parts[1])))
            except ValueError as e:
                raise VocabFormatError(f"{path}:{number}: bad merge line {line!r} ({e})") from e

        vocab = cls(merges)
        if len(vocab) != size:
            raise VocabFormatError(f"Header of {path} declares {size} tokens, found {len(vocab)}")
        return vocab
