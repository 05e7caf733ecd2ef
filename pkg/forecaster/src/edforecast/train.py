"""Training and inference loops (Adam on MSE, fixed epoch budget, seeded)."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np
import torch

from .data import SourceDataset
from .model import EncoderDecoder, ForecasterConfig


@dataclass
class TrainingReport:
    epoch_losses: list[float] = field(default_factory=list)
    final_test_mse: float = float("nan")
    wall_seconds: float = 0.0

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "train_mse"])
            for i, loss in enumerate(self.epoch_losses, start=1):
                writer.writerow([i, repr(loss)])
            writer.writerow(["final_test_mse", repr(self.final_test_mse)])
            writer.writerow(["wall_seconds", repr(self.wall_seconds)])


def seed_everything(seed: int) -> None:
    torch.manual_seed(seed)
    np.random.seed(seed % 2**32)


def train(dataset: SourceDataset, config: ForecasterConfig) -> tuple[EncoderDecoder, TrainingReport]:
    """Fit the model on the dataset's training split.

    Free-running decoding is used during training as well, matching the
    recursive inference mode, so the loss sees the same feedback loop the
    exported predictions will use.
    """
    expected = (config.r + 1) * config.k
    if dataset.chi.shape[1] != expected or dataset.psi.shape[1] != config.u:
        raise ValueError(
            f"dataset shapes {dataset.chi.shape[1]}/{dataset.psi.shape[1]} do not match "
            f"config (r+1)*k={expected}, u={config.u}"
        )
    seed_everything(config.seed)
    model = EncoderDecoder(config)
    chi_train, psi_train = dataset.train_arrays()
    x = torch.from_numpy(np.ascontiguousarray(chi_train))
    y = torch.from_numpy(np.ascontiguousarray(psi_train))
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = torch.nn.MSELoss()
    report = TrainingReport()
    t0 = time.perf_counter()
    n = len(x)
    generator = torch.Generator().manual_seed(config.seed)
    model.train()
    for _ in range(config.epochs):
        order = torch.randperm(n, generator=generator)
        epoch_loss = 0.0
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            optimizer.zero_grad()
            pred = model(x[idx])
            loss = loss_fn(pred, y[idx])
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.detach()) * len(idx)
        mean_loss = epoch_loss / n
        if not np.isfinite(mean_loss):
            raise ArithmeticError(f"training diverged: epoch loss {mean_loss}")
        report.epoch_losses.append(mean_loss)
    model.eval()
    report.final_test_mse = evaluate(model, dataset)
    report.wall_seconds = time.perf_counter() - t0
    return model, report


def evaluate(model: EncoderDecoder, dataset: SourceDataset) -> float:
    """Normalized MSE on the test split under recursive decoding."""
    chi_test, psi_test = dataset.test_arrays()
    if len(chi_test) == 0:
        return float("nan")
    with torch.no_grad():
        pred = model(torch.from_numpy(np.ascontiguousarray(chi_test)))
    return float(torch.mean((pred - torch.from_numpy(np.ascontiguousarray(psi_test))) ** 2))


def predict_rows(model: EncoderDecoder, dataset: SourceDataset):
    """Interchange rows for the test split: de-normalized Gbps, clamped at 0."""
    chi_test, _ = dataset.test_arrays()
    epochs = dataset.test_epochs()
    with torch.no_grad():
        pred = model(torch.from_numpy(np.ascontiguousarray(chi_test))).numpy()
    gbps = np.maximum(dataset.denormalize(pred.astype(np.float64)), 0.0)
    rows = []
    for i, epoch in enumerate(epochs):
        for step in range(1, model.config.u + 1):
            rows.append((dataset.source_id, int(epoch), step, float(gbps[i, step - 1])))
    return rows
