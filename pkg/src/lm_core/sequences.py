from typing import List, Optional, Tuple

from data import EXAMPLE_END, PROMPT_HEAD, PROMPT_TAIL, ArticlePair
from tokenizer import TokenSequence, Vocab, encode

from .errors import ContextOverflow


def encode_prompt(vocab: Vocab, text: str, max_length: Optional[int] = None) -> TokenSequence:
    """
    Encodes `Text:{text} <|sep|> Summary:` piece by piece.

    The template pieces are encoded separately so the prompt tokens are the
    same whether the article is followed by a summary or not. When the result
    is longer than `max_length`, article tokens are dropped from the front.

    Raises:
        ContextOverflow: If even an empty article does not fit.
    """
    head = encode(vocab, PROMPT_HEAD)
    body = encode(vocab, text)
    tail = encode(vocab, PROMPT_TAIL)
    if max_length is not None and len(head) + len(body) + len(tail) > max_length:
        keep = max_length - len(head) - len(tail)
        if keep < 0:
            raise ContextOverflow(f"Prompt template alone needs {len(head) + len(tail)} tokens, budget is {max_length}")
        body = body[len(body) - keep :] if keep else []
    return head + body + tail


def encode_training_example(
    vocab: Vocab, pair: ArticlePair, max_length: int, summary_only: bool = False
) -> Tuple[TokenSequence, List[bool]]:
    """
    Encodes `<s>Text:{text} <|sep|> Summary:{summary} </s>` for training.

    The article is truncated from the front so the sequence fits `max_length`;
    the summary is never shortened.

    Returns:
        (ids, loss_mask): loss_mask[t] marks token t as a training target. The
        BOS position is never a target; prompt tokens are targets unless
        `summary_only` is set.

    Raises:
        ContextOverflow: If the summary leaves no room for the prompt template.
    """
    continuation = encode(vocab, pair.summary) + encode(vocab, EXAMPLE_END)
    prompt = encode_prompt(vocab, pair.text, max_length - 1 - len(continuation))
    ids = [vocab.bos_id] + prompt + continuation
    mask = [False] + [not summary_only] * len(prompt) + [True] * len(continuation)
    return ids, mask
