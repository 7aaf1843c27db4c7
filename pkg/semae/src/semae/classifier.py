"""Frozen digit classifier used as the semantic probe.

Trained once on clean images and then held fixed: during the autoencoder
experiment its softmax output plays the role of the semantic posterior given
a reconstruction. A small convolutional net clears the accuracy floor on
this corpus where plain MLP probes hover just below it. The training script
refuses to save a checkpoint below 97% clean test accuracy.
"""

from __future__ import annotations

import torch
from torch import nn

from .data import IMAGE_SIDE, NUM_CLASSES, load_split

ACCURACY_FLOOR = 0.97


class DigitClassifier(nn.Module):
    def __init__(self):
        super().__init__()
        self.net = nn.Sequential(
            nn.Conv2d(1, 16, 3, padding=1),
            nn.ReLU(),
            nn.Conv2d(16, 32, 3, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
            nn.Flatten(),
            nn.Linear(32 * (IMAGE_SIDE // 2) ** 2, 64),
            nn.ReLU(),
            nn.Linear(64, NUM_CLASSES),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x.view(-1, 1, IMAGE_SIDE, IMAGE_SIDE))


def train_classifier(epochs: int = 60, seed: int = 0) -> tuple[DigitClassifier, float]:
    torch.manual_seed(seed)
    x_tr, y_tr, x_te, y_te = load_split(seed=0)
    x_tr_t, y_tr_t = torch.from_numpy(x_tr), torch.from_numpy(y_tr)
    x_te_t, y_te_t = torch.from_numpy(x_te), torch.from_numpy(y_te)

    model = DigitClassifier()
    opt = torch.optim.Adam(model.parameters(), lr=1e-3)
    sched = torch.optim.lr_scheduler.StepLR(opt, step_size=max(1, epochs * 2 // 3), gamma=0.1)
    loss_fn = nn.CrossEntropyLoss()
    batch = 128
    for _ in range(epochs):
        perm = torch.randperm(x_tr_t.shape[0])
        for start in range(0, perm.numel(), batch):
            idx = perm[start : start + batch]
            opt.zero_grad()
            loss = loss_fn(model(x_tr_t[idx]), y_tr_t[idx])
            loss.backward()
            opt.step()
        sched.step()

    model.eval()
    with torch.no_grad():
        accuracy = float((model(x_te_t).argmax(dim=1) == y_te_t).float().mean())
    return model, accuracy


def save_classifier(path, epochs: int = 60, seed: int = 0) -> float:
    model, accuracy = train_classifier(epochs=epochs, seed=seed)
    if accuracy < ACCURACY_FLOOR:
        raise RuntimeError(f"classifier reached only {accuracy:.4f} on clean test data (< {ACCURACY_FLOOR})")
    torch.save({"state_dict": model.state_dict(), "clean_test_accuracy": accuracy}, path)
    return accuracy


def load_classifier(path) -> tuple[DigitClassifier, float]:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    model = DigitClassifier()
    model.load_state_dict(payload["state_dict"])
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model, float(payload["clean_test_accuracy"])
