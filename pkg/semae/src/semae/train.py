"""Training and evaluation of the composite-loss autoencoder.

The objective is MSE(x, y) + gamma * KL(onehot(label) || classifier(y)):
the first term prices pixel fidelity, the second prices the divergence
between the true label (a point-mass semantic posterior) and the frozen
classifier's belief on the reconstruction. gamma = 0 is the plain
rate-constrained autoencoder; growing gamma trades pixel fidelity for
semantic fidelity. With a one-hot reference the KL term reduces to the
classifier's negative log-likelihood at the true label, reported in nats
(so chance level sits near ln 10 ~ 2.30).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch.nn import functional as F

from .classifier import DigitClassifier
from .data import load_split
from .model import QuantizedAutoencoder, rate_bits


@dataclass(frozen=True)
class ExperimentConfig:
    levels: int
    dims: int
    gamma: float
    epochs: int = 300
    batch_size: int = 128
    seed: int = 0
    restarts: int = 3  # independent fits; keep the best training objective
    relaxation: str = "anneal"
    hidden: int = 128
    lr: float = 2e-3
    label_smoothing: float = 0.0  # optional KL stabilizer, off by default

    def __post_init__(self) -> None:
        if self.levels < 2 or self.dims < 1:
            raise ValueError("need levels >= 2 and dims >= 1")
        if self.gamma < 0.0:
            raise ValueError("gamma must be >= 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0.0 <= self.label_smoothing < 1.0:
            raise ValueError("label_smoothing must lie in [0, 1)")

    @property
    def rate_bits(self) -> float:
        return rate_bits(self.levels, self.dims)


@dataclass(frozen=True)
class RunMetrics:
    mse: float
    kl: float
    accuracy: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.accuracy <= 1.0 or self.mse < 0.0 or self.kl < 0.0:
            raise ValueError(f"invalid metrics {self}")


def _semantic_nll(logits: torch.Tensor, labels: torch.Tensor, smoothing: float) -> torch.Tensor:
    log_probs = F.log_softmax(logits, dim=1)
    nll = F.nll_loss(log_probs, labels, reduction="mean")
    if smoothing <= 0.0:
        return nll
    smooth = -log_probs.mean(dim=1).mean()
    return (1.0 - smoothing) * nll + smoothing * smooth


def _fit_once(config: ExperimentConfig, classifier: DigitClassifier, seed: int, x, y) -> QuantizedAutoencoder:
    torch.manual_seed(seed)
    model = QuantizedAutoencoder(config.levels, config.dims, hidden=config.hidden, relaxation=config.relaxation)
    opt = torch.optim.Adam(model.parameters(), lr=config.lr)
    sched = torch.optim.lr_scheduler.StepLR(opt, step_size=max(1, config.epochs * 2 // 3), gamma=0.1)
    model.train()
    for epoch in range(config.epochs):
        progress = epoch / max(1, config.epochs - 1)
        perm = torch.randperm(x.shape[0])
        for start in range(0, perm.numel(), config.batch_size):
            idx = perm[start : start + config.batch_size]
            batch_x, batch_y = x[idx], y[idx]
            opt.zero_grad()
            recon = model(batch_x, training=True, progress=progress)
            loss = F.mse_loss(recon, batch_x)
            if config.gamma > 0.0:
                loss = loss + config.gamma * _semantic_nll(classifier(recon), batch_y, config.label_smoothing)
            loss.backward()
            opt.step()
        sched.step()
    model.eval()
    return model


def _train_objective(config: ExperimentConfig, classifier: DigitClassifier, model: QuantizedAutoencoder, x, y) -> float:
    """Composite objective on the training split under hard quantization."""
    with torch.no_grad():
        recon = model(x, training=False)
        value = float(F.mse_loss(recon, x))
        if config.gamma > 0.0:
            value += config.gamma * float(_semantic_nll(classifier(recon), y, config.label_smoothing))
    return value


def train(config: ExperimentConfig, classifier: DigitClassifier) -> QuantizedAutoencoder:
    """Fit encoder/decoder on the training split; the classifier stays frozen.

    Discrete-code training is restart-sensitive (codes can die early), so
    the fit runs config.restarts times from seeds seed, seed+1, ... and the
    model with the best training objective is kept. The same selection rule
    applies to every gamma, so arms stay comparable.
    """
    x_tr, y_tr, _, _ = load_split(seed=0)
    x = torch.from_numpy(x_tr)
    y = torch.from_numpy(y_tr)
    classifier.eval()

    best_model = None
    best_value = math.inf
    for attempt in range(config.restarts):
        model = _fit_once(config, classifier, config.seed + attempt, x, y)
        value = _train_objective(config, classifier, model, x, y)
        if value < best_value:
            best_model, best_value = model, value
    return best_model


def evaluate(model: QuantizedAutoencoder, classifier: DigitClassifier, seed: int = 0) -> RunMetrics:
    """Held-out metrics under hard quantization."""
    _, _, x_te, y_te = load_split(seed=0)
    x = torch.from_numpy(x_te)
    y = torch.from_numpy(y_te)
    model.eval()
    classifier.eval()
    with torch.no_grad():
        recon = model(x, training=False)
        mse = float(F.mse_loss(recon, x))
        logits = classifier(recon)
        kl = float(F.nll_loss(F.log_softmax(logits, dim=1), y, reduction="mean"))
        accuracy = float((logits.argmax(dim=1) == y).float().mean())
    return RunMetrics(mse=mse, kl=kl, accuracy=accuracy)


def save_checkpoint(path, model: QuantizedAutoencoder, config: ExperimentConfig) -> None:
    torch.save({"state_dict": model.state_dict(), "config": asdict(config)}, path)


def load_checkpoint(path) -> tuple[QuantizedAutoencoder, ExperimentConfig]:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    config = ExperimentConfig(**payload["config"])
    model = QuantizedAutoencoder(config.levels, config.dims, hidden=config.hidden, relaxation=config.relaxation)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, config


def load_config_file(path) -> list[ExperimentConfig]:
    """Read one config or a list of configs from a flat JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    entries = payload if isinstance(payload, list) else [payload]
    return [ExperimentConfig(**entry) for entry in entries]


def latent_entropy_bits(model: QuantizedAutoencoder, x: np.ndarray) -> float:
    """Plug-in entropy of the discrete code over a dataset (diagnostic only)."""
    codes = model.codes(torch.from_numpy(x)).numpy()
    flat = [tuple(row) for row in codes]
    _, counts = np.unique(np.array(flat, dtype=np.int64), axis=0, return_counts=True)
    probs = counts / counts.sum()
    return float(-(probs * np.log2(probs)).sum())
