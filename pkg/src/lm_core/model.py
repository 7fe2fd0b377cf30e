import math

import torch
import torch.nn as nn
from torch.nn import functional as F

from .config import ModelConfig
from .errors import ContextOverflow


class CausalSelfAttention(nn.Module):
    """
    Multi-head self-attention where position t only sees positions <= t.

    Setting `record_attention` keeps the last attention weights in
    `attention_weights`. Off by default.
    """

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.n_heads = config.n_heads
        self.d_model = config.d_model
        self.qkv = nn.Linear(config.d_model, 3 * config.d_model)
        self.proj = nn.Linear(config.d_model, config.d_model)
        self.attn_dropout = nn.Dropout(config.dropout)
        self.resid_dropout = nn.Dropout(config.dropout)
        self.register_buffer(
            "causal_mask",
            torch.tril(torch.ones(config.max_context, config.max_context, dtype=torch.bool)),
            persistent=False,
        )
        self.record_attention = False
        self.attention_weights = None

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        batch, tokens, channels = x.size()
        head_dim = channels // self.n_heads

        q, k, v = self.qkv(x).split(self.d_model, dim=2)
        q = q.view(batch, tokens, self.n_heads, head_dim).transpose(1, 2)
        k = k.view(batch, tokens, self.n_heads, head_dim).transpose(1, 2)
        v = v.view(batch, tokens, self.n_heads, head_dim).transpose(1, 2)

        scores = (q @ k.transpose(-2, -1)) / math.sqrt(head_dim)
        scores = scores.masked_fill(~self.causal_mask[:tokens, :tokens], float("-inf"))
        weights = torch.softmax(scores, dim=-1)
        if self.record_attention:
            self.attention_weights = weights.detach()

        out = self.attn_dropout(weights) @ v
        out = out.transpose(1, 2).contiguous().view(batch, tokens, channels)
        return self.resid_dropout(self.proj(out))


class FeedForward(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.fc_in = nn.Linear(config.d_model, config.d_ff)
        self.fc_out = nn.Linear(config.d_ff, config.d_model)
        self.dropout = nn.Dropout(config.dropout)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.dropout(self.fc_out(F.gelu(self.fc_in(x))))


class Block(nn.Module):
    """Pre-layer-norm transformer block."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.ln_1 = nn.LayerNorm(config.d_model)
        self.attn = CausalSelfAttention(config)
        self.ln_2 = nn.LayerNorm(config.d_model)
        self.mlp = FeedForward(config)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(self.ln_1(x))
        return x + self.mlp(self.ln_2(x))


class DecoderLM(nn.Module):
    """
    GPT-style decoder-only language model.

    Token and learned positional embeddings, a stack of pre-LN blocks, a final
    layer norm and an untied output projection to vocabulary logits.
    """

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.token_embedding = nn.Embedding(config.vocab_size, config.d_model)
        self.position_embedding = nn.Embedding(config.max_context, config.d_model)
        self.dropout = nn.Dropout(config.dropout)
        self.blocks = nn.ModuleList([Block(config) for _ in range(config.n_layers)])
        self.ln_f = nn.LayerNorm(config.d_model)
        self.lm_head = nn.Linear(config.d_model, config.vocab_size, bias=False)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        """
        Args:
            ids: Token ids of shape (batch, tokens).

        Returns:
            Logits of shape (batch, tokens, vocab_size); row t predicts token t + 1.
        """
        tokens = ids.size(1)
        if tokens > self.config.max_context:
            raise ContextOverflow(
                f"Sequence of {tokens} tokens exceeds max_context {self.config.max_context}"
            )
        positions = torch.arange(tokens, device=ids.device)
        x = self.dropout(self.token_embedding(ids) + self.position_embedding(positions))
        for block in self.blocks:
            x = block(x)
        return self.lm_head(self.ln_f(x))
