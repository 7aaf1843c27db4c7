"""Sweep over (rate, gamma) configurations and export the results.

Produces a CSV with one row per configuration (levels, dims, rate, gamma,
mse, kl, accuracy), optional qualitative image grids (original row plus one
reconstruction row per gamma), and a converter that rewrites the rows into
the rate-distortion CSV schema used by the semrd command line
(d_p, d_o, rate_bits, achieved_dp, achieved_do, status, seed) so both
toolkits' outputs can be joined: the semantic column carries the KL value,
the symbolic column the MSE.
"""

from __future__ import annotations

import csv

import numpy as np
import torch

from .classifier import DigitClassifier
from .data import IMAGE_SIDE, load_split
from .train import evaluate, train

TABLE_HEADER = ["L", "dim", "rate_bits", "gamma", "mse", "kl", "accuracy"]
RD_HEADER = ["d_p", "d_o", "rate_bits", "achieved_dp", "achieved_do", "status", "seed"]


def run_configs(configs, classifier: DigitClassifier):
    """Train and evaluate every config; returns [(config, metrics, model)]."""
    out = []
    for config in configs:
        model = train(config, classifier)
        out.append((config, evaluate(model, classifier), model))
    return out


def sweep_table(configs, classifier: DigitClassifier, path):
    """Run every configuration and write the one-row-per-config CSV."""
    results = run_configs(configs, classifier)
    write_table(path, results)
    return results


def write_table(path, results) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TABLE_HEADER)
        for config, metrics, _ in results:
            writer.writerow(
                [
                    config.levels,
                    config.dims,
                    f"{config.rate_bits:.6f}",
                    f"{config.gamma:.6f}",
                    f"{metrics.mse:.6f}",
                    f"{metrics.kl:.6f}",
                    f"{metrics.accuracy:.6f}",
                ]
            )


def export_rd_schema(path, results) -> None:
    """Rewrite sweep rows into the semrd CLI's CSV schema for joint reporting."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RD_HEADER)
        for config, metrics, _ in results:
            writer.writerow(
                [
                    f"{metrics.kl:.6f}",
                    f"{metrics.mse:.6f}",
                    f"{config.rate_bits:.6f}",
                    f"{metrics.kl:.6f}",
                    f"{metrics.mse:.6f}",
                    "simulated",
                    config.seed,
                ]
            )


def save_image_grid(path, results, num_examples: int = 8) -> None:
    """PNG grid: top row originals, one reconstruction row per configuration."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    _, _, x_te, _ = load_split(seed=0)
    x = torch.from_numpy(x_te[:num_examples])
    rows = [("original", x.numpy())]
    for config, _, model in results:
        with torch.no_grad():
            recon = model(x, training=False).numpy()
        rows.append((f"rate {config.rate_bits:g}, gamma {config.gamma:g}", recon))

    fig, axes = plt.subplots(len(rows), num_examples, figsize=(num_examples, len(rows) * 1.2))
    axes = np.atleast_2d(axes)
    for r, (label, images) in enumerate(rows):
        for c in range(num_examples):
            ax = axes[r, c]
            ax.imshow(images[c].reshape(IMAGE_SIDE, IMAGE_SIDE), cmap="gray", vmin=0.0, vmax=1.0)
            ax.set_xticks([])
            ax.set_yticks([])
            if c == 0:
                ax.set_ylabel(label, fontsize=6, rotation=0, ha="right", va="center")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
