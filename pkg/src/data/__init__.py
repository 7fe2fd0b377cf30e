from .article import ArticlePair
from .corpus import iter_records, load_corpus, write_records, write_corpus, ParseError, SchemaError
from .cleaning import CleaningConfig, CleaningStats, ngram_overlap, clean, TooShort
from .split import split, TooFewExamples
from .formatting import (
    format_example,
    format_prompt,
    format_zero_shot_prompt,
    PROMPT_HEAD,
    PROMPT_TAIL,
    EXAMPLE_END,
)
