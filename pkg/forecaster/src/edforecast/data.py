"""Windowed-dataset file contract.

One csv per source: ``t_index, chi_0..chi_{(r+1)k-1}, psi_0..psi_{u-1}``
(values already min-max normalized), plus a ``manifest.json`` recording the
chronological split sizes and the per-source normalizer (min/max Gbps).
Lines starting with '#' are comments.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SourceDataset:
    source_id: str
    t_index: np.ndarray   # (n,)
    chi: np.ndarray       # (n, (r+1)*k)
    psi: np.ndarray       # (n, u)
    n_train: int
    norm_min: float
    norm_max: float

    @property
    def n(self) -> int:
        return len(self.t_index)

    def train_arrays(self):
        return self.chi[: self.n_train], self.psi[: self.n_train]

    def test_arrays(self):
        return self.chi[self.n_train :], self.psi[self.n_train :]

    def test_epochs(self):
        return self.t_index[self.n_train :]

    def denormalize(self, values: np.ndarray) -> np.ndarray:
        return values * (self.norm_max - self.norm_min) + self.norm_min


def load_csv(path: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    header = rows[0]
    if header[0] != "t_index":
        raise ValueError(f"{path}: unexpected header {header[:2]}")
    n_chi = sum(1 for c in header if c.startswith("chi_"))
    n_psi = sum(1 for c in header if c.startswith("psi_"))
    if n_chi == 0 or n_psi == 0:
        raise ValueError(f"{path}: header has no chi_/psi_ columns")
    t_index, chi, psi = [], [], []
    for row in rows[1:]:
        t_index.append(int(row[0]))
        values = [float(v) for v in row[1:]]
        chi.append(values[:n_chi])
        psi.append(values[n_chi : n_chi + n_psi])
    return (
        np.asarray(t_index, dtype=np.int64),
        np.asarray(chi, dtype=np.float32),
        np.asarray(psi, dtype=np.float32),
    )


def source_from_filename(path: str) -> str:
    stem = os.path.splitext(os.path.basename(path))[0]
    return stem[len("dataset_"):] if stem.startswith("dataset_") else stem


def load_source(dataset_path: str, manifest_path: str | None = None,
                source_id: str | None = None) -> SourceDataset:
    """Load one source's dataset; the manifest defaults to the sibling file."""
    if manifest_path is None:
        manifest_path = os.path.join(os.path.dirname(dataset_path), "manifest.json")
    if source_id is None:
        source_id = source_from_filename(dataset_path)
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    try:
        info = manifest["sources"][source_id]
    except KeyError:
        raise ValueError(f"{manifest_path}: no source {source_id!r}") from None
    t_index, chi, psi = load_csv(dataset_path)
    if len(t_index) != info["patterns"]:
        raise ValueError(
            f"{dataset_path}: {len(t_index)} rows but manifest says {info['patterns']}"
        )
    return SourceDataset(
        source_id=source_id,
        t_index=t_index,
        chi=chi,
        psi=psi,
        n_train=info["train_patterns"],
        norm_min=info["normalizer"]["min"],
        norm_max=info["normalizer"]["max"],
    )


def write_predictions(path: str, rows, append: bool = False) -> None:
    """Interchange rows ``(source_id, t_index, step, predicted_gbps)``."""
    exists = os.path.exists(path)
    mode = "a" if append and exists else "w"
    with open(path, mode, encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if mode == "w":
            writer.writerow(["source_id", "t_index", "step", "predicted_gbps"])
        for source, t, step, gbps in rows:
            writer.writerow([source, t, step, repr(float(gbps))])
