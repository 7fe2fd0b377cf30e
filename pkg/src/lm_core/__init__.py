from .errors import ConfigError, ContextOverflow, EmptyLossMask, DivergenceError, CheckpointFormatError
from .config import ModelConfig, TrainConfig
from .model import DecoderLM, CausalSelfAttention
from .checkpoint import Checkpoint, init_model, parameter_count
from .training import forward, loss, train, masked_cross_entropy, batch_loss
from .sequences import encode_prompt, encode_training_example
