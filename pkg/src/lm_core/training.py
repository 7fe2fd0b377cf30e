import copy
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import torch
from torch.nn import functional as F
from tqdm import tqdm

from tokenizer import PAD, SPECIAL_TOKENS, TokenSequence
from validation import ValidationError

from .checkpoint import Checkpoint
from .config import TrainConfig
from .errors import ContextOverflow, DivergenceError, EmptyLossMask

logger = logging.getLogger(__name__)

PAD_ID = SPECIAL_TOKENS.index(PAD)

TrainingExample = Tuple[TokenSequence, Sequence[bool]]


def _check_ids(ckpt: Checkpoint, tokens: Sequence[int]) -> None:
    if len(tokens) > ckpt.config.max_context:
        raise ContextOverflow(
            f"Sequence of {len(tokens)} tokens exceeds max_context {ckpt.config.max_context}"
        )
    vocab_size = ckpt.config.vocab_size
    for token in tokens:
        if not 0 <= token < vocab_size:
            raise ValidationError(f"Token id {token} is outside vocabulary of size {vocab_size}")


def forward(ckpt: Checkpoint, tokens: Sequence[int]) -> np.ndarray:
    """
    Next-token logits for every prefix of `tokens`.

    Returns:
        np.ndarray: (len(tokens), vocab_size) float64 matrix; row t is
        conditioned on tokens[0..t] only.

    Raises:
        ContextOverflow: If `tokens` is longer than max_context.
    """
    _check_ids(ckpt, tokens)
    if not tokens:
        return np.zeros((0, ckpt.config.vocab_size))
    ids = torch.tensor([list(tokens)], dtype=torch.long)
    with torch.no_grad():
        logits = ckpt.model.eval()(ids)[0]
    return logits.to(torch.float64).numpy()


def masked_cross_entropy(logits: torch.Tensor, targets: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """
    Mean cross-entropy over the positions where `mask` is true.

    Args:
        logits: (..., vocab_size) predictions.
        targets: (...) target ids aligned with `logits`.
        mask: (...) booleans selecting the positions that count.

    Raises:
        EmptyLossMask: If no position is selected.
    """
    if not bool(mask.any()):
        raise EmptyLossMask("Loss mask selects no target position")
    losses = F.cross_entropy(logits.reshape(-1, logits.size(-1)), targets.reshape(-1), reduction="none")
    return losses[mask.reshape(-1)].mean()


def batch_loss(model: torch.nn.Module, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Teacher-forced loss of a padded (batch, tokens) id tensor; mask[b, t] selects target t."""
    logits = model(ids[:, :-1])
    return masked_cross_entropy(logits, ids[:, 1:], mask[:, 1:])


def loss(ckpt: Checkpoint, tokens: Sequence[int], loss_mask: Sequence[bool]) -> float:
    """
    Mean cross-entropy of predicting tokens[t] from tokens[:t] over the
    positions t where loss_mask[t] is true.

    Raises:
        ValidationError: If the mask length differs from the sequence length.
        EmptyLossMask: If no target position is selected.
    """
    if len(loss_mask) != len(tokens):
        raise ValidationError(f"loss_mask has {len(loss_mask)} entries for {len(tokens)} tokens")
    _check_ids(ckpt, tokens)
    if len(tokens) < 2 or not any(loss_mask[1:]):
        raise EmptyLossMask("Loss mask selects no target position")
    ids = torch.tensor([list(tokens)], dtype=torch.long)
    mask = torch.tensor([list(loss_mask)], dtype=torch.bool)
    with torch.no_grad():
        value = batch_loss(ckpt.model.eval(), ids, mask)
    return float(value)


def _collate(examples: List[TrainingExample], pad_id: int) -> Tuple[torch.Tensor, torch.Tensor]:
    length = max(len(ids) for ids, _ in examples)
    ids = torch.full((len(examples), length), pad_id, dtype=torch.long)
    mask = torch.zeros((len(examples), length), dtype=torch.bool)
    for row, (tokens, loss_mask) in enumerate(examples):
        ids[row, : len(tokens)] = torch.tensor(list(tokens), dtype=torch.long)
        mask[row, : len(loss_mask)] = torch.tensor(list(loss_mask), dtype=torch.bool)
    return ids, mask


def train(
    ckpt: Checkpoint,
    corpus: List[TrainingExample],
    cfg: TrainConfig,
    on_epoch: Optional[Callable[[int, float], None]] = None,
    progress: bool = False,
    pad_id: int = PAD_ID,
) -> Checkpoint:
    """
    Fine-tunes a copy of `ckpt` with Adam on teacher-forced next-token loss.

    Args:
        ckpt: Starting checkpoint; left untouched.
        corpus: (ids, loss_mask) pairs, already truncated to fit max_context.
        cfg: Optimisation settings.
        on_epoch: Called with (epoch index, mean batch loss) after every epoch.
        progress: Show a tqdm bar over epochs.
        pad_id: Id used to pad batches; padded positions never count.

    Returns:
        Checkpoint: The trained copy with its step counter and loss history extended.

    Raises:
        ContextOverflow: If a sequence is longer than max_context.
        DivergenceError: If the loss becomes non-finite.
    """
    if not corpus:
        raise ValidationError("Training corpus is empty")
    for tokens, loss_mask in corpus:
        if len(loss_mask) != len(tokens):
            raise ValidationError(f"loss_mask has {len(loss_mask)} entries for {len(tokens)} tokens")
        _check_ids(ckpt, tokens)

    model = copy.deepcopy(ckpt.model)
    step = ckpt.training_step
    epoch_losses = list(ckpt.epoch_losses)
    if cfg.epochs == 0:
        return Checkpoint(ckpt.config, model, step, epoch_losses)

    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate, betas=(0.9, 0.999), eps=1e-8)
    order_generator = torch.Generator().manual_seed(cfg.seed)

    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(cfg.seed)
        for epoch in tqdm(range(cfg.epochs), desc="epochs", disable=not progress):
            order = torch.randperm(len(corpus), generator=order_generator).tolist()
            batch_losses = []
            for start in range(0, len(order), cfg.batch_size):
                ids, mask = _collate([corpus[i] for i in order[start : start + cfg.batch_size]], pad_id)
                value = batch_loss(model, ids, mask)
                if not math.isfinite(value.item()):
                    raise DivergenceError(step, value.item())

                optimizer.zero_grad(set_to_none=True)
                value.backward()
                if cfg.grad_clip is not None:
                    torch.nn.utils.clip_grad_norm_(model.parameters(), cfg.grad_clip)
                optimizer.step()
                step += 1
                batch_losses.append(value.item())

            mean_loss = sum(batch_losses) / len(batch_losses)
            epoch_losses.append(mean_loss)
            logger.info("epoch %d: mean loss %.6f", epoch + 1, mean_loss)
            if on_epoch is not None:
                on_epoch(epoch, mean_loss)

    model.eval()
    return Checkpoint(ckpt.config, model, step, epoch_losses)
