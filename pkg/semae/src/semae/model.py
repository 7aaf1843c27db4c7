"""Quantized-latent autoencoder.

The encoder maps a 64-pixel image to d latent values in [0, 1]; each is
quantized to one of L equally spaced levels, so the code transmits
d * log2(L) bits per image. Training keeps quantization differentiable with
a flag-selectable relaxation: additive uniform noise spanning one quantizer
bin ("noise"), a straight-through estimator ("ste"), or the soft-to-hard
schedule "anneal" (noise for the first half of training, straight-through
after) which avoids the dead-code collapse that pure straight-through
suffers at 2 levels. Evaluation always applies hard nearest-level rounding.
"""

from __future__ import annotations

import math

import torch
from torch import nn

from .data import NUM_PIXELS

RELAXATIONS = ("ste", "noise", "anneal")
ANNEAL_FRACTION = 0.25  # share of training spent in the noise phase


def rate_bits(levels: int, dims: int) -> float:
    """Code length of one image: dims * log2(levels)."""
    return dims * math.log2(levels)


def hard_quantize(h: torch.Tensor, levels: int) -> torch.Tensor:
    return torch.round(h * (levels - 1)) / (levels - 1)


class QuantizedAutoencoder(nn.Module):
    def __init__(self, levels: int, dims: int, hidden: int = 128, relaxation: str = "ste"):
        super().__init__()
        if levels < 2 or dims < 1:
            raise ValueError("need levels >= 2 and dims >= 1")
        if relaxation not in RELAXATIONS:
            raise ValueError(f"relaxation must be one of {RELAXATIONS}")
        self.levels = levels
        self.dims = dims
        self.relaxation = relaxation
        self.encoder = nn.Sequential(
            nn.Linear(NUM_PIXELS, hidden),
            nn.ReLU(),
            nn.Linear(hidden, hidden // 2),
            nn.ReLU(),
            nn.Linear(hidden // 2, dims),
            nn.Sigmoid(),
        )
        self.decoder = nn.Sequential(
            nn.Linear(dims, hidden // 2),
            nn.ReLU(),
            nn.Linear(hidden // 2, hidden),
            nn.ReLU(),
            nn.Linear(hidden, NUM_PIXELS),
            nn.Sigmoid(),
        )

    @property
    def rate_bits(self) -> float:
        return rate_bits(self.levels, self.dims)

    def quantize(self, h: torch.Tensor, training: bool, progress: float = 1.0) -> torch.Tensor:
        if not training:
            return hard_quantize(h, self.levels)
        mode = self.relaxation
        if mode == "anneal":
            mode = "noise" if progress < ANNEAL_FRACTION else "ste"
        if mode == "noise":
            noise = (torch.rand_like(h) - 0.5) / (self.levels - 1)
            return (h + noise).clamp(0.0, 1.0)
        hard = hard_quantize(h, self.levels)
        return h + (hard - h).detach()

    def forward(self, x: torch.Tensor, training: bool | None = None, progress: float = 1.0) -> torch.Tensor:
        if training is None:
            training = self.training
        code = self.quantize(self.encoder(x), training, progress)
        return self.decoder(code)

    def codes(self, x: torch.Tensor) -> torch.Tensor:
        """Hard-quantized latent levels as integers, one row per image."""
        with torch.no_grad():
            h = self.encoder(x)
            return torch.round(h * (self.levels - 1)).to(torch.int64)
