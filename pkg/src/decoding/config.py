from typing import Optional

from validation import ValidationError, validate_number

NGRAM_SCOPES = ("generated", "all")


def _check_bool(value: bool, name: str) -> None:
    if not isinstance(value, bool):
        raise TypeError(f"{name} must be a bool, got {type(value).__name__}")


class GenerationConfig:
    """
    Beam search settings.

    Attributes:
        temperature: In [0, 1]. Zero means deterministic ranking by the plain
            model probabilities.
        top_k: Keep only the k most probable tokens per beam, or None.
        top_p: Keep the smallest probability mass reaching p, or None.
        num_beams: Live hypotheses kept per step.
        early_stopping: Stop once num_beams hypotheses have finished.
        no_repeat_ngram_size: Forbid repeating any n-gram of this size, or None.
        repetition_penalty: Sign-split logit penalty for already seen tokens; 1 disables it.
        max_new_tokens: Generation budget. Zero yields an empty output.
        length_penalty: Finished scores are divided by len ** length_penalty; 0 keeps raw sums.
        penalize_prompt_tokens: Whether prompt tokens count as seen for the repetition penalty.
        no_repeat_ngram_scope: "generated" checks n-grams in generated tokens only, "all"
            also in the prompt.
    """

    def __init__(
        self,
        temperature: float = 0.0,
        top_k: Optional[int] = None,
        top_p: Optional[float] = None,
        num_beams: int = 4,
        early_stopping: bool = True,
        no_repeat_ngram_size: Optional[int] = None,
        repetition_penalty: float = 1.0,
        max_new_tokens: int = 64,
        length_penalty: float = 0.0,
        penalize_prompt_tokens: bool = True,
        no_repeat_ngram_scope: str = "generated",
    ):
        self.temperature = temperature
        self.top_k = top_k
        self.top_p = top_p
        self.num_beams = num_beams
        self.early_stopping = early_stopping
        self.no_repeat_ngram_size = no_repeat_ngram_size
        self.repetition_penalty = repetition_penalty
        self.max_new_tokens = max_new_tokens
        self.length_penalty = length_penalty
        self.penalize_prompt_tokens = penalize_prompt_tokens
        self.no_repeat_ngram_scope = no_repeat_ngram_scope

    @classmethod
    def preset(cls, name: str, **overrides) -> "GenerationConfig":
        """
        Named settings. "paper" is the published replication setup; its top-k
        and top-p values are the swapped reading of the reported pair
        (k is a count, p a fraction).
        """
        if name != "paper":
            raise ValidationError(f"Unknown generation preset {name!r}")
        values = dict(
            temperature=0.0,
            top_k=3,
            top_p=0.95,
            num_beams=20,
            early_stopping=True,
            no_repeat_ngram_size=3,
            repetition_penalty=2.0,
        )
        values.update(overrides)
        return cls(**values)

    def __repr__(self) -> str:
        return f"GenerationConfig({self.dict})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GenerationConfig) and self.dict == other.dict

    @property
    def dict(self) -> dict:
        return {
            "temperature": self.temperature,
            "top_k": self.top_k,
            "top_p": self.top_p,
            "num_beams": self.num_beams,
            "early_stopping": self.early_stopping,
            "no_repeat_ngram_size": self.no_repeat_ngram_size,
            "repetition_penalty": self.repetition_penalty,
            "max_new_tokens": self.max_new_tokens,
            "length_penalty": self.length_penalty,
            "penalize_prompt_tokens": self.penalize_prompt_tokens,
            "no_repeat_ngram_scope": self.no_repeat_ngram_scope,
        }

    @property
    def temperature(self) -> float:
        return self._temperature

    @temperature.setter
    def temperature(self, value: float) -> None:
        validate_number(value, "temperature", minimum=0, maximum=1)
        self._temperature = float(value)

    @property
    def top_k(self) -> Optional[int]:
        return self._top_k

    @top_k.setter
    def top_k(self, value: Optional[int]) -> None:
        validate_number(value, "top_k", types=int, minimum=1, allow_none=True)
        self._top_k = value

    @property
    def top_p(self) -> Optional[float]:
        return self._top_p

    @top_p.setter
    def top_p(self, value: Optional[float]) -> None:
        validate_number(value, "top_p", minimum=0, maximum=1, exclusive_minimum=True, allow_none=True)
        self._top_p = None if value is None else float(value)

    @property
    def num_beams(self) -> int:
        return self._num_beams

    @num_beams.setter
    def num_beams(self, value: int) -> None:
        validate_number(value, "num_beams", types=int, minimum=1)
        self._num_beams = value

    @property
    def early_stopping(self) -> bool:
        return self._early_stopping

    @early_stopping.setter
    def early_stopping(self, value: bool) -> None:
        _check_bool(value, "early_stopping")
        self._early_stopping = value

    @property
    def no_repeat_ngram_size(self) -> Optional[int]:
        return self._no_repeat_ngram_size

    @no_repeat_ngram_size.setter
    def no_repeat_ngram_size(self, value: Optional[int]) -> None:
        validate_number(value, "no_repeat_ngram_size", types=int, minimum=1, allow_none=True)
        self._no_repeat_ngram_size = value

    @property
    def repetition_penalty(self) -> float:
        return self._repetition_penalty

    @repetition_penalty.setter
    def repetition_penalty(self, value: float) -> None:
        validate_number(value, "repetition_penalty", minimum=1)
        self._repetition_penalty = float(value)

    @property
    def max_new_tokens(self) -> int:
        return self._max_new_tokens

    @max_new_tokens.setter
    def max_new_tokens(self, value: int) -> None:
        validate_number(value, "max_new_tokens", types=int, minimum=0)
        self._max_new_tokens = value

    @property
    def length_penalty(self) -> float:
        return self._length_penalty

    @length_penalty.setter
    def length_penalty(self, value: float) -> None:
        validate_number(value, "length_penalty")
        self._length_penalty = float(value)

    @property
    def penalize_prompt_tokens(self) -> bool:
        return self._penalize_prompt_tokens

    @penalize_prompt_tokens.setter
    def penalize_prompt_tokens(self, value: bool) -> None:
        _check_bool(value, "penalize_prompt_tokens")
        self._penalize_prompt_tokens = value

    @property
    def no_repeat_ngram_scope(self) -> str:
        return self._no_repeat_ngram_scope

    @no_repeat_ngram_scope.setter
    def no_repeat_ngram_scope(self, value: str) -> None:
        if not isinstance(value, str):
            raise TypeError(f"no_repeat_ngram_scope must be a str, got {type(value).__name__}")
        if value not in NGRAM_SCOPES:
            raise ValidationError(f"no_repeat_ngram_scope must be one of {NGRAM_SCOPES}, got {value!r}")
        self._no_repeat_ngram_scope = value
