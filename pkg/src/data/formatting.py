"""
Sequence templates for fine-tuning and inference.

Training sequences read `<s>Text:{text} <|sep|> Summary:{summary} </s>`;
at inference the model continues `Text:{text} <|sep|> Summary:`.
"""
from tokenizer import BOS, EOS, SEP

from .article import ArticlePair

PROMPT_HEAD = "Text:"
PROMPT_TAIL = f" {SEP} Summary:"
EXAMPLE_END = f" {EOS}"

ZERO_SHOT_TRIGGER = "TL;DR:"


def format_prompt(text: str) -> str:
    return f"{PROMPT_HEAD}{text}{PROMPT_TAIL}"


def format_example(pair: ArticlePair) -> str:
    return f"{BOS}{format_prompt(pair.text)}{pair.summary}{EXAMPLE_END}"


def format_zero_shot_prompt(text: str, trigger: str = ZERO_SHOT_TRIGGER) -> str:
    """Prompt for a model that was never fine-tuned: the article, then a trigger word."""
    return f"{text}\n{trigger}"
