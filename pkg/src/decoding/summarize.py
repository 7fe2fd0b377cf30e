import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Union

import numpy as np
import torch
from tqdm import tqdm

from data import format_zero_shot_prompt
from lm_core import Checkpoint, ContextOverflow, encode_prompt, forward
from tokenizer import EOS, TokenSequence, Vocab, decode, encode
from validation import ValidationError, validate_number

from .beam_search import beam_search
from .config import GenerationConfig

logger = logging.getLogger(__name__)


class CheckpointLogits:
    """Next-token logits of a frozen checkpoint, one prefix or a batch of equal-length prefixes."""

    def __init__(self, ckpt: Checkpoint):
        self.ckpt = ckpt

    def __call__(self, prefix: Sequence[int]) -> np.ndarray:
        return forward(self.ckpt, prefix)[-1]

    def batch(self, prefixes: List[TokenSequence]) -> np.ndarray:
        if len({len(prefix) for prefix in prefixes}) != 1:
            return np.stack([self(prefix) for prefix in prefixes])
        ids = torch.tensor(prefixes, dtype=torch.long)
        if ids.size(1) > self.ckpt.config.max_context:
            raise ContextOverflow(
                f"Prefix of {ids.size(1)} tokens exceeds max_context {self.ckpt.config.max_context}"
            )
        with torch.no_grad():
            logits = self.ckpt.model.eval()(ids)[:, -1]
        return logits.to(torch.float64).numpy()


def _zero_shot_prompt(vocab: Vocab, text: str, budget: int) -> TokenSequence:
    ids = encode(vocab, format_zero_shot_prompt(text))
    if budget < 1:
        raise ContextOverflow(f"No room for a prompt within a budget of {budget} tokens")
    return ids[max(0, len(ids) - budget) :]


def summarize(
    ckpt: Checkpoint,
    vocab: Vocab,
    article_text: str,
    cfg: GenerationConfig,
    zero_shot: bool = False,
) -> str:
    """
    Generates a summary of `article_text` as the continuation of its prompt.

    The article is truncated from the front so the prompt and max_new_tokens
    fit the model context. Only the generated tokens are decoded, without the
    closing EOS.

    Args:
        zero_shot: Use the "text then TL;DR:" prompt an untuned model answers,
            instead of the fine-tuning template.

    Raises:
        ContextOverflow: If the prompt template and budget do not fit max_context.
    """
    budget = ckpt.config.max_context - 1 - cfg.max_new_tokens
    if zero_shot:
        prompt = _zero_shot_prompt(vocab, article_text, budget)
    else:
        prompt = encode_prompt(vocab, article_text, max_length=budget)
    prompt = [vocab.bos_id] + prompt

    eos = vocab.eos_id
    hypothesis = beam_search(CheckpointLogits(ckpt), prompt, cfg, eos)
    if hypothesis.forced_eos_steps:
        logger.info("EOS was forced at steps %s", hypothesis.forced_eos_steps)
    tokens = hypothesis.tokens[:-1] if hypothesis.finished else hypothesis.tokens
    return decode(vocab, tokens).replace(EOS, "").strip()


def summarize_many(
    ckpt: Checkpoint,
    vocab: Vocab,
    texts: Sequence[str],
    cfg: GenerationConfig,
    workers: int = 1,
    zero_shot: bool = False,
    progress: bool = False,
    return_exceptions: bool = False,
) -> List[Union[str, ValidationError]]:
    """
    Summarizes every text; results keep the input order for any number of workers.

    With `return_exceptions`, a text that cannot be summarized (for example
    one whose prompt overflows the context) yields its ValidationError in
    place of a summary instead of aborting the batch.
    """
    validate_number(workers, "workers", types=int, minimum=1)

    def run(text: str) -> Union[str, ValidationError]:
        try:
            return summarize(ckpt, vocab, text, cfg, zero_shot=zero_shot)
        except ValidationError as e:
            if not return_exceptions:
                raise
            logger.warning("Could not summarize text: %s", e)
            return e

    if workers == 1:
        return [run(text) for text in tqdm(texts, desc="summaries", disable=not progress)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(tqdm(executor.map(run, texts), total=len(texts), desc="summaries", disable=not progress))
