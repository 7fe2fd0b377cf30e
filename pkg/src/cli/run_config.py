import argparse
import configparser
import logging
import os
from typing import Dict, Optional

from data import CleaningConfig
from decoding import GenerationConfig
from lm_core import ModelConfig, TrainConfig
from validation import ValidationError

logger = logging.getLogger(__name__)

_SECTION = "run"

CLEANING_KEYS = ("min_summary_tokens", "max_summary_tokens", "overlap_n", "min_overlap", "max_overlap")
MODEL_KEYS = ("d_model", "n_layers", "n_heads", "d_ff", "max_context", "dropout")
TRAIN_KEYS = ("learning_rate", "batch_size", "epochs", "seed", "grad_clip", "max_length")
GENERATION_KEYS = (
    "temperature",
    "top_k",
    "top_p",
    "num_beams",
    "early_stopping",
    "no_repeat_ngram_size",
    "repetition_penalty",
    "max_new_tokens",
    "length_penalty",
    "penalize_prompt_tokens",
    "no_repeat_ngram_scope",
)


class UsageError(Exception):
    """Bad command line or configuration file contents."""


def read_config_file(path: str) -> Dict[str, str]:
    """
    Reads a flat `key = value` file. Keys may use dashes or underscores;
    `#` and `;` start comment lines.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    with open(path, "r", encoding="utf-8") as file:
        try:
            parser.read_string(f"[{_SECTION}]\n" + file.read(), source=path)
        except configparser.Error as e:
            raise UsageError(f"Cannot parse config file {path}: {e}") from e
    return {key.replace("-", "_"): value for key, value in parser[_SECTION].items()}


def _coerce(action: argparse.Action, key: str, raw: str):
    if action.nargs == 0:
        state = configparser.ConfigParser.BOOLEAN_STATES.get(raw.strip().lower())
        if state is None:
            raise UsageError(f"{key} expects a boolean, got {raw!r}")
        return state
    try:
        value = action.type(raw) if action.type is not None else raw
    except (TypeError, ValueError) as e:
        raise UsageError(f"{key}: invalid value {raw!r}") from e
    if action.choices is not None and value not in action.choices:
        raise UsageError(f"{key} must be one of {list(action.choices)}, got {raw!r}")
    return value


def apply_config_file(parser: argparse.ArgumentParser, values: Dict[str, str]) -> None:
    """
    Installs file values as defaults of `parser`, converted the way the
    matching option converts its command-line argument, so explicit flags
    still win.

    Raises:
        UsageError: For keys no option of `parser` accepts.
    """
    actions = {action.dest: action for action in parser._actions if action.dest not in ("help", "config")}
    defaults = {}
    for key, raw in values.items():
        if key not in actions:
            raise UsageError(f"Unknown config key '{key}'")
        defaults[key] = _coerce(actions[key], key, raw)
    parser.set_defaults(**defaults)
    logger.debug("Config file defaults: %s", defaults)


def _build(factory, *args, **kwargs):
    try:
        return factory(*args, **kwargs)
    except (TypeError, ValidationError) as e:
        raise UsageError(str(e)) from e


class RunConfig:
    """
    The merged settings of one command: every config record the pipeline
    uses plus the file paths, built from parsed arguments.
    """

    def __init__(self, args: argparse.Namespace):
        self.args = args

    def __repr__(self) -> str:
        return f"RunConfig({self.dict})"

    @property
    def dict(self) -> dict:
        return dict(vars(self.args))

    def _given(self, keys) -> dict:
        return {key: getattr(self.args, key) for key in keys if getattr(self.args, key, None) is not None}

    def get(self, key: str, default=None):
        value = getattr(self.args, key, None)
        return default if value is None else value

    def cleaning_config(self) -> CleaningConfig:
        return _build(CleaningConfig, **self._given(CLEANING_KEYS))

    def model_config(self, vocab_size: int) -> ModelConfig:
        return _build(ModelConfig, vocab_size, **self._given(MODEL_KEYS))

    def train_config(self) -> TrainConfig:
        return _build(TrainConfig, summary_only_loss=self.get("loss_on") == "summary", **self._given(TRAIN_KEYS))

    def generation_config(self) -> GenerationConfig:
        given = self._given(GENERATION_KEYS)
        preset: Optional[str] = self.get("preset")
        if preset is not None:
            return _build(GenerationConfig.preset, preset, **given)
        return _build(GenerationConfig, **given)
