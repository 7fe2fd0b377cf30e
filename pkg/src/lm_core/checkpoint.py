import copy
import json
import logging
import math
import os
import struct
from collections import OrderedDict
from typing import Dict, List, Optional

import numpy as np
import torch

from .config import ModelConfig
from .errors import CheckpointFormatError
from .model import DecoderLM

logger = logging.getLogger(__name__)

MAGIC = b"DLMC"
VERSION = 1
INIT_STD = 0.02


def parameter_count(config: ModelConfig) -> int:
    """Closed-form number of trainable parameters for `config`."""
    d, ff, vocab = config.d_model, config.d_ff, config.vocab_size
    per_layer = 4 * d * d + 2 * d * ff + 9 * d + ff
    return vocab * d + config.max_context * d + config.n_layers * per_layer + 2 * d + d * vocab


class Checkpoint:
    """
    A model configuration together with its learned parameters.

    The wrapped module is treated as frozen: training works on a copy and
    returns a new checkpoint.
    """

    def __init__(
        self,
        config: ModelConfig,
        model: DecoderLM,
        training_step: int = 0,
        epoch_losses: Optional[List[float]] = None,
    ):
        if not isinstance(config, ModelConfig):
            raise TypeError("config must be a ModelConfig")
        if not isinstance(model, DecoderLM):
            raise TypeError("model must be a DecoderLM")
        if not isinstance(training_step, int) or training_step < 0:
            raise ValueError(f"training_step must be a non-negative int, got {training_step!r}")
        self.config = config
        self.model = model.eval()
        self.training_step = training_step
        self.epoch_losses = list(epoch_losses or [])

    def __repr__(self) -> str:
        return (
            f"Checkpoint(config={self.config}, training_step={self.training_step}, "
            f"parameters={self.num_parameters})"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Checkpoint):
            return False
        if self.config != other.config or self.training_step != other.training_step:
            return False
        if self.epoch_losses != other.epoch_losses:
            return False
        mine, theirs = self.parameters, other.parameters
        return mine.keys() == theirs.keys() and all(torch.equal(mine[k], theirs[k]) for k in mine)

    __hash__ = None

    @property
    def parameters(self) -> Dict[str, torch.Tensor]:
        return OrderedDict((name, p.detach()) for name, p in self.model.named_parameters())

    @property
    def num_parameters(self) -> int:
        return sum(p.numel() for p in self.model.parameters())

    def clone(self) -> "Checkpoint":
        return Checkpoint(self.config, copy.deepcopy(self.model), self.training_step, self.epoch_losses)

    def save(self, path: str) -> None:
        """
        Writes the checkpoint container: magic, version byte, a length-prefixed
        JSON header, then every parameter as name, shape and little-endian
        float32 data.
        """
        parameters = self.parameters
        header = {
            "config": self.config.dict,
            "training_step": self.training_step,
            "epoch_losses": self.epoch_losses,
            "tensor_count": len(parameters),
        }
        header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")

        with open(path, "wb") as file:
            file.write(MAGIC)
            file.write(struct.pack("<BI", VERSION, len(header_bytes)))
            file.write(header_bytes)
            for name, tensor in parameters.items():
                name_bytes = name.encode("utf-8")
                file.write(struct.pack("<H", len(name_bytes)))
                file.write(name_bytes)
                file.write(struct.pack("<B", tensor.dim()))
                file.write(struct.pack(f"<{tensor.dim()}I", *tensor.shape))
                file.write(tensor.to(torch.float32).cpu().numpy().astype("<f4").tobytes())
        logger.info("Saved checkpoint to %s", path)

    @classmethod
    def load(cls, path: str) -> "Checkpoint":
        if not os.path.exists(path):
            raise FileNotFoundError(f"Checkpoint not found: {path}")
        with open(path, "rb") as file:
            data = file.read()

        try:
            if data[:4] != MAGIC:
                raise CheckpointFormatError(f"{path} is not a checkpoint file")
            version, header_length = struct.unpack_from("<BI", data, 4)
            if version != VERSION:
                raise CheckpointFormatError(f"Unsupported checkpoint version {version} in {path}")
            offset = 4 + struct.calcsize("<BI")
            header = json.loads(data[offset : offset + header_length].decode("utf-8"))
            offset += header_length

            config = ModelConfig(**header["config"])
            state = OrderedDict()
            for _ in range(header["tensor_count"]):
                (name_length,) = struct.unpack_from("<H", data, offset)
                offset += 2
                name = data[offset : offset + name_length].decode("utf-8")
                offset += name_length
                (ndim,) = struct.unpack_from("<B", data, offset)
                offset += 1
                shape = struct.unpack_from(f"<{ndim}I", data, offset)
                offset += 4 * ndim
                count = math.prod(shape)
                values = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
                offset += 4 * count
                state[name] = torch.from_numpy(values.astype(np.float32).reshape(shape))
        except (struct.error, KeyError, ValueError, UnicodeDecodeError) as e:
            if isinstance(e, CheckpointFormatError):
                raise
            raise CheckpointFormatError(f"Corrupt checkpoint {path}: {e}") from e

        if offset != len(data):
            raise CheckpointFormatError(f"Trailing bytes in checkpoint {path}")

        model = DecoderLM(config)
        try:
            model.load_state_dict(state, strict=True)
        except RuntimeError as e:
            raise CheckpointFormatError(f"Checkpoint {path} does not match its config: {e}") from e
        if not all(torch.isfinite(p).all() for p in model.parameters()):
            raise CheckpointFormatError(f"Checkpoint {path} holds non-finite values")
        return cls(config, model, header["training_step"], header["epoch_losses"])


def _is_residual_projection(name: str) -> bool:
    return name.endswith("attn.proj.weight") or name.endswith("mlp.fc_out.weight")


def init_model(config: ModelConfig, seed: int, dtype: torch.dtype = torch.float32) -> Checkpoint:
    """
    Creates a freshly initialised checkpoint.

    Weights are drawn from N(0, 0.02^2), residual output projections are scaled
    down by sqrt(2 * n_layers), layer norms start at identity and biases at zero.
    Every draw comes from a generator seeded with `seed`.
    """
    config.validate()
    with torch.random.fork_rng(devices=[]):
        model = DecoderLM(config)

    generator = torch.Generator().manual_seed(seed)
    residual_std = INIT_STD / math.sqrt(2 * config.n_layers)
    with torch.no_grad():
        for name, parameter in model.named_parameters():
            if name.endswith(".bias"):
                parameter.zero_()
            elif ".ln_" in name or name.startswith("ln_f"):
                parameter.fill_(1.0)
            else:
                std = residual_std if _is_residual_projection(name) else INIT_STD
                parameter.copy_(torch.randn(parameter.shape, generator=generator) * std)

    return Checkpoint(config, model.to(dtype))
