from validation import ValidationError


class ConfigError(ValidationError):
    pass


class ContextOverflow(ValidationError):
    pass


class EmptyLossMask(ValidationError):
    pass


class CheckpointFormatError(ValidationError):
    pass


class DivergenceError(ArithmeticError):
    """Raised when the training loss stops being finite."""

    def __init__(self, step: int, value: float):
        super().__init__(f"Non-finite loss {value} at step {step}")
        self.step = step
        self.value = value
