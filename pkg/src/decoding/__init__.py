from .config import GenerationConfig
from .transforms import (
    InvalidPenalty,
    InvalidK,
    apply_temperature,
    apply_repetition_penalty,
    filter_top_k,
    filter_top_p,
    banned_ngram_continuations,
    next_token_log_probs,
)
from .beam_search import Hypothesis, beam_search
from .summarize import CheckpointLogits, summarize, summarize_many
