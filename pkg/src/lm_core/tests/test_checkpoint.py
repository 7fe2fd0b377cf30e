import struct

import pytest
import torch

from lm_core import Checkpoint, CheckpointFormatError, ModelConfig, TrainConfig, init_model, train


def small_checkpoint():
    config = ModelConfig(vocab_size=9, d_model=4, n_layers=1, n_heads=2, d_ff=8, max_context=6)
    return init_model(config, seed=7)


def test_save_load_roundtrip(tmp_path):
    ckpt = train(small_checkpoint(), [([1, 2, 3, 4], [False, True, True, True])], TrainConfig(epochs=2))
    path = tmp_path / "model.ckpt"
    ckpt.save(str(path))
    loaded = Checkpoint.load(str(path))
    assert loaded == ckpt
    assert loaded.training_step == 2
    assert loaded.epoch_losses == ckpt.epoch_losses


def test_save_is_byte_identical(tmp_path):
    first, second = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    small_checkpoint().save(str(first))
    small_checkpoint().save(str(second))
    assert first.read_bytes() == second.read_bytes()


def test_header_layout(tmp_path):
    path = tmp_path / "model.ckpt"
    small_checkpoint().save(str(path))
    data = path.read_bytes()
    assert data[:4] == b"DLMC"
    version, header_length = struct.unpack_from("<BI", data, 4)
    assert version == 1
    assert b'"vocab_size": 9' in data[9 : 9 + header_length]


def test_float64_checkpoint_saves_as_float32(tmp_path):
    config = ModelConfig(vocab_size=9, d_model=4, n_layers=1, n_heads=2, d_ff=8, max_context=6)
    ckpt = init_model(config, seed=1, dtype=torch.float64)
    path = tmp_path / "model.ckpt"
    ckpt.save(str(path))
    loaded = Checkpoint.load(str(path))
    for name, tensor in ckpt.parameters.items():
        assert torch.equal(loaded.parameters[name], tensor.float())


@pytest.mark.parametrize("mutate", [lambda d: b"XXXX" + d[4:], lambda d: d[:4] + b"\x02" + d[5:], lambda d: d[:-3], lambda d: d + b"\x00"])
def test_load_rejects_corrupt_files(tmp_path, mutate):
    path = tmp_path / "model.ckpt"
    small_checkpoint().save(str(path))
    path.write_bytes(mutate(path.read_bytes()))
    with pytest.raises(CheckpointFormatError):
        Checkpoint.load(str(path))
