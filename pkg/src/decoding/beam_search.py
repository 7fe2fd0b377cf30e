import logging
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.special import log_softmax

from tokenizer import TokenSequence
from validation import ValidationError

from .config import GenerationConfig
from .transforms import next_token_log_probs

logger = logging.getLogger(__name__)

LogitsProvider = Callable[[Sequence[int]], np.ndarray]


@dataclass
class Hypothesis:
    """
    A generated continuation.

    Attributes:
        tokens: Generated ids after the prompt, ending with EOS when finished.
        log_score: Sum of the selected tokens' log-probabilities.
        finished: Whether EOS was emitted.
        forced_eos_steps: Steps at which every token was filtered out and EOS
            was appended instead.
    """

    tokens: TokenSequence = field(default_factory=list)
    log_score: float = 0.0
    finished: bool = False
    forced_eos_steps: List[int] = field(default_factory=list)

    def score(self, length_penalty: float = 0.0) -> float:
        if length_penalty == 0 or not self.tokens:
            return self.log_score
        return self.log_score / len(self.tokens) ** length_penalty


@dataclass(frozen=True)
class _Candidate:
    log_score: float
    token: int
    beam: int
    forced: bool

    @property
    def rank(self) -> Tuple[float, int, int]:
        return -self.log_score, self.token, self.beam


def _step_logits(next_logits: LogitsProvider, prefixes: List[TokenSequence]) -> List[np.ndarray]:
    batch = getattr(next_logits, "batch", None)
    if batch is not None:
        return [np.asarray(row, dtype=np.float64) for row in batch(prefixes)]
    return [np.asarray(next_logits(prefix), dtype=np.float64) for prefix in prefixes]


def _beam_candidates(
    hypothesis: Hypothesis,
    beam: int,
    logits: np.ndarray,
    prompt: TokenSequence,
    cfg: GenerationConfig,
    eos: int,
) -> List[_Candidate]:
    generated = hypothesis.tokens
    seen = list(prompt) + generated if cfg.penalize_prompt_tokens else generated
    ngram_context = list(prompt) + generated if cfg.no_repeat_ngram_scope == "all" else generated
    log_probs = next_token_log_probs(logits, seen, ngram_context, cfg)

    allowed = np.flatnonzero(np.isfinite(log_probs))
    if allowed.size == 0:
        forced = hypothesis.log_score + float(log_softmax(logits)[eos])
        return [_Candidate(forced, eos, beam, True)]

    # At most num_beams non-EOS extensions of one beam can survive the step.
    others = allowed[allowed != eos]
    best = others[np.argsort(-log_probs[others], kind="stable")[: cfg.num_beams]]
    candidates = [_Candidate(hypothesis.log_score + float(log_probs[t]), int(t), beam, False) for t in best]
    if np.isfinite(log_probs[eos]):
        candidates.append(_Candidate(hypothesis.log_score + float(log_probs[eos]), eos, beam, False))
    return candidates


def _is_done(live: List[Hypothesis], finished: List[Hypothesis], cfg: GenerationConfig) -> bool:
    if not live:
        return True
    if cfg.early_stopping:
        return len(finished) >= cfg.num_beams
    if not finished:
        return False
    best_finished = max(h.score(cfg.length_penalty) for h in finished)
    return live[0].score(cfg.length_penalty) <= best_finished


def beam_search(
    next_logits: LogitsProvider,
    prompt: Sequence[int],
    cfg: GenerationConfig,
    eos: int,
) -> Hypothesis:
    """
    Deterministic beam search over a next-token logits provider.

    At each step every live beam proposes its allowed extensions; the pooled
    candidates are walked best first, ties going to the lower token id and
    then the lower beam index. EOS candidates are moved to the finished pool
    and the rest refill the live beams until num_beams of them are live.

    Args:
        next_logits: Maps a full prefix (prompt plus generated tokens) to the
            logits of the next token. If it has a `batch(prefixes)` method,
            all live beams of a step are evaluated with one call.
        prompt: Conditioning tokens; must not be empty.
        cfg: Generation settings.
        eos: Id that ends a hypothesis.

    Returns:
        Hypothesis: The best finished hypothesis, or the best live one when
        nothing finished within max_new_tokens.
    """
    prompt = list(prompt)
    if not prompt:
        raise ValidationError("beam_search needs a non-empty prompt")

    live = [Hypothesis()]
    finished: List[Hypothesis] = []

    for step in range(cfg.max_new_tokens):
        rows = _step_logits(next_logits, [prompt + h.tokens for h in live])
        candidates = []
        for beam, (hypothesis, logits) in enumerate(zip(live, rows)):
            candidates.extend(_beam_candidates(hypothesis, beam, logits, prompt, cfg, eos))
        candidates.sort(key=lambda c: c.rank)

        next_live = []
        for candidate in candidates:
            parent = live[candidate.beam]
            forced_steps = parent.forced_eos_steps + [step] if candidate.forced else list(parent.forced_eos_steps)
            extended = Hypothesis(parent.tokens + [candidate.token], candidate.log_score, False, forced_steps)
            if candidate.token == eos:
                extended.finished = True
                finished.append(extended)
                if candidate.forced:
                    logger.debug("Forced EOS on beam %d at step %d", candidate.beam, step)
            else:
                next_live.append(extended)
                if len(next_live) == cfg.num_beams:
                    break

        live = next_live
        if _is_done(live, finished, cfg):
            break

    if finished:
        return min(finished, key=lambda h: (-h.score(cfg.length_penalty), len(h.tokens), h.tokens))
    return live[0]
