"""Quantized-latent autoencoder experiment with a semantic loss term."""

from .classifier import DigitClassifier, load_classifier, save_classifier, train_classifier
from .model import QuantizedAutoencoder, hard_quantize, rate_bits
from .sweep import export_rd_schema, run_configs, save_image_grid, sweep_table, write_table
from .train import (
    ExperimentConfig,
    RunMetrics,
    evaluate,
    latent_entropy_bits,
    load_checkpoint,
    load_config_file,
    save_checkpoint,
    train,
)

__version__ = "0.1.0"
