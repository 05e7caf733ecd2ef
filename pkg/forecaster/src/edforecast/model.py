"""Encoder-decoder recurrent model for multi-step sequence regression.

The encoder LSTM reads the r+1 past/present intervals (each a vector of k
fluctuations) and hands its final hidden/cell state to the decoder LSTM,
which rolls forward u steps feeding each step's own prediction back in
(free-running, both in training and at inference).  Each decoder output
passes through a time-distributed dense layer and a linear head.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn


@dataclass(frozen=True)
class ForecasterConfig:
    hidden_units: int = 30
    dense_units: int = 20
    learning_rate: float = 0.001
    batch_size: int = 16
    epochs: int = 500
    r: int = 3
    k: int = 6
    u: int = 4
    seed: int = 0

    def __post_init__(self):
        for field in ("hidden_units", "dense_units", "batch_size", "r", "k", "u"):
            if getattr(self, field) < 1:
                raise ValueError(f"{field} must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


class EncoderDecoder(nn.Module):
    def __init__(self, config: ForecasterConfig):
        super().__init__()
        self.config = config
        self.encoder = nn.LSTM(input_size=config.k, hidden_size=config.hidden_units,
                               batch_first=True)
        self.decoder = nn.LSTM(input_size=1, hidden_size=config.hidden_units,
                               batch_first=True)
        self.dense = nn.Linear(config.hidden_units, config.dense_units)
        self.head = nn.Linear(config.dense_units, 1)

    def forward(self, chi: torch.Tensor) -> torch.Tensor:
        """chi: (batch, (r+1)*k) flat windows -> (batch, u) predictions.

        The first decoder input is the present interval's maximum (the last k
        chi values), the natural y_t analogue in normalized units; afterwards
        each step consumes the previous step's own output.
        """
        cfg = self.config
        batch = chi.shape[0]
        seq = chi.view(batch, cfg.r + 1, cfg.k)
        _, (h, c) = self.encoder(seq)
        step_in = seq[:, -1, :].max(dim=1).values.view(batch, 1, 1)
        outputs = []
        for _ in range(cfg.u):
            out, (h, c) = self.decoder(step_in, (h, c))
            y = self.head(torch.relu(self.dense(out[:, -1, :])))
            outputs.append(y)
            step_in = y.view(batch, 1, 1)
        return torch.cat(outputs, dim=1)


def save_model(path: str, model: EncoderDecoder) -> None:
    torch.save({"config": model.config.to_dict(), "state": model.state_dict()}, path)


def load_model(path: str) -> EncoderDecoder:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    model = EncoderDecoder(ForecasterConfig(**payload["config"]))
    model.load_state_dict(payload["state"])
    model.eval()
    return model
