from .vocab import (
    Vocab,
    TokenSequence,
    SPECIAL_TOKENS,
    PAD,
    BOS,
    SEP,
    EOS,
    BASE_SYMBOLS,
    UnknownTokenId,
    VocabFormatError,
)
from .bpe import build_vocab, encode, decode, pretokenize, CorpusEmpty, VocabTooSmall
