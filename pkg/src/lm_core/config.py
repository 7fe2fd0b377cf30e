from typing import Optional, Union

from validation import ValidationError, validate_number

from .errors import ConfigError


def _checked(validator, *args, **kwargs) -> None:
    try:
        validator(*args, **kwargs)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


class ModelConfig:
    """
    Hyperparameters of the decoder-only transformer.

    The defaults are a desk-scale model that trains on one CPU core.
    """

    def __init__(
        self,
        vocab_size: int,
        d_model: int = 128,
        n_layers: int = 4,
        n_heads: int = 4,
        d_ff: int = 512,
        max_context: int = 512,
        dropout: float = 0.0,
    ):
        self.vocab_size = vocab_size
        self.d_model = d_model
        self.n_layers = n_layers
        self.n_heads = n_heads
        self.d_ff = d_ff
        self.max_context = max_context
        self.dropout = dropout
        self.validate()

    def __repr__(self) -> str:
        return f"ModelConfig({self.dict})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ModelConfig) and self.dict == other.dict

    @property
    def dict(self) -> dict:
        return {
            "vocab_size": self.vocab_size,
            "d_model": self.d_model,
            "n_layers": self.n_layers,
            "n_heads": self.n_heads,
            "d_ff": self.d_ff,
            "max_context": self.max_context,
            "dropout": self.dropout,
        }

    def validate(self) -> None:
        if self.d_model % self.n_heads != 0:
            raise ConfigError(f"d_model ({self.d_model}) must be divisible by n_heads ({self.n_heads})")

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads

    def _positive(self, value: int, name: str) -> int:
        _checked(validate_number, value, name, types=int, minimum=1)
        return value

    @property
    def vocab_size(self) -> int:
        return self._vocab_size

    @vocab_size.setter
    def vocab_size(self, value: int) -> None:
        self._vocab_size = self._positive(value, "vocab_size")

    @property
    def d_model(self) -> int:
        return self._d_model

    @d_model.setter
    def d_model(self, value: int) -> None:
        self._d_model = self._positive(value, "d_model")

    @property
    def n_layers(self) -> int:
        return self._n_layers

    @n_layers.setter
    def n_layers(self, value: int) -> None:
        self._n_layers = self._positive(value, "n_layers")

    @property
    def n_heads(self) -> int:
        return self._n_heads

    @n_heads.setter
    def n_heads(self, value: int) -> None:
        self._n_heads = self._positive(value, "n_heads")

    @property
    def d_ff(self) -> int:
        return self._d_ff

    @d_ff.setter
    def d_ff(self, value: int) -> None:
        self._d_ff = self._positive(value, "d_ff")

    @property
    def max_context(self) -> int:
        return self._max_context

    @max_context.setter
    def max_context(self, value: int) -> None:
        self._max_context = self._positive(value, "max_context")

    @property
    def dropout(self) -> float:
        return self._dropout

    @dropout.setter
    def dropout(self, value: float) -> None:
        _checked(validate_number, value, "dropout", minimum=0, maximum=1, exclusive_maximum=True)
        self._dropout = float(value)


class TrainConfig:
    """
    Optimisation settings for fine-tuning.

    Attributes:
        learning_rate: Adam step size. Zero is allowed and leaves the weights untouched.
        batch_size: Sequences per optimizer step.
        epochs: Passes over the corpus.
        seed: Seeds batch order and dropout.
        grad_clip: Global gradient-norm bound, or None to disable clipping.
        max_length: Training-time truncation length; None means the model's max_context.
        summary_only_loss: Restrict the loss to summary tokens instead of the whole sequence.
    """

    def __init__(
        self,
        learning_rate: float = 1e-3,
        batch_size: int = 8,
        epochs: int = 10,
        seed: int = 0,
        grad_clip: Optional[Union[int, float]] = 1.0,
        max_length: Optional[int] = None,
        summary_only_loss: bool = False,
    ):
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.seed = seed
        self.grad_clip = grad_clip
        self.max_length = max_length
        self.summary_only_loss = summary_only_loss

    def __repr__(self) -> str:
        return f"TrainConfig({self.dict})"

    @property
    def dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "seed": self.seed,
            "grad_clip": self.grad_clip,
            "max_length": self.max_length,
            "summary_only_loss": self.summary_only_loss,
        }

    @property
    def learning_rate(self) -> float:
        return self._learning_rate

    @learning_rate.setter
    def learning_rate(self, value: float) -> None:
        _checked(validate_number, value, "learning_rate", minimum=0)
        self._learning_rate = float(value)

    @property
    def batch_size(self) -> int:
        return self._batch_size

    @batch_size.setter
    def batch_size(self, value: int) -> None:
        _checked(validate_number, value, "batch_size", types=int, minimum=1)
        self._batch_size = value

    @property
    def epochs(self) -> int:
        return self._epochs

    @epochs.setter
    def epochs(self, value: int) -> None:
        _checked(validate_number, value, "epochs", types=int, minimum=0)
        self._epochs = value

    @property
    def seed(self) -> int:
        return self._seed

    @seed.setter
    def seed(self, value: int) -> None:
        _checked(validate_number, value, "seed", types=int, minimum=0)
        self._seed = value

    @property
    def grad_clip(self) -> Optional[float]:
        return self._grad_clip

    @grad_clip.setter
    def grad_clip(self, value: Optional[float]) -> None:
        _checked(validate_number, value, "grad_clip", minimum=0, exclusive_minimum=True, allow_none=True)
        self._grad_clip = None if value is None else float(value)

    @property
    def max_length(self) -> Optional[int]:
        return self._max_length

    @max_length.setter
    def max_length(self, value: Optional[int]) -> None:
        _checked(validate_number, value, "max_length", types=int, minimum=2, allow_none=True)
        self._max_length = value

    @property
    def summary_only_loss(self) -> bool:
        return self._summary_only_loss

    @summary_only_loss.setter
    def summary_only_loss(self, value: bool) -> None:
        if not isinstance(value, bool):
            raise TypeError(f"summary_only_loss must be a bool, got {type(value).__name__}")
        self._summary_only_loss = value
