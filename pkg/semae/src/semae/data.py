"""Handwritten-digit corpus, loaded locally and split deterministically.

Uses the scikit-learn digits set (1797 8x8 grayscale images, 10 classes),
scaled to [0, 1]. The split is stratified and fixed by seed so every run of
the experiment sees the same train/test partition.
"""

from __future__ import annotations

import numpy as np
from sklearn.datasets import load_digits
from sklearn.model_selection import train_test_split

IMAGE_SIDE = 8
NUM_PIXELS = IMAGE_SIDE * IMAGE_SIDE
NUM_CLASSES = 10


def load_split(test_fraction: float = 0.2, seed: int = 0):
    """Return (x_train, y_train, x_test, y_test) as float32/int64 arrays."""
    digits = load_digits()
    x = (digits.data / 16.0).astype(np.float32)
    y = digits.target.astype(np.int64)
    x_tr, x_te, y_tr, y_te = train_test_split(
        x, y, test_size=test_fraction, random_state=seed, stratify=y
    )
    return x_tr, y_tr, x_te, y_te
