"""Sliding-window dataset construction.

Groups a per-source trace into planning intervals of k fluctuations and emits
one (chi, psi) pair per present interval t: chi holds the raw fluctuations of
intervals t-r..t (oldest first) and psi the per-interval maxima of intervals
t+1..t+u.  Also provides the train/test split, min-max normalization fitted on
the training portion, and the csv export consumed by the forecaster.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DatasetSizeError, NormalizationError
from .traces import TrafficTrace


@dataclass(frozen=True)
class WindowSample:
    """One (chi, psi) training pattern anchored at present interval ``t_index``."""

    t_index: int
    chi: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "chi", np.asarray(self.chi, dtype=np.float64))
        object.__setattr__(self, "psi", np.asarray(self.psi, dtype=np.float64))


def interval_fluctuations(trace: TrafficTrace, interval: int, k: int) -> np.ndarray:
    """The k raw fluctuations of one planning interval."""
    lo = interval * k
    if lo < 0 or lo + k > len(trace):
        raise IndexError(f"interval {interval} (k={k}) outside trace of {len(trace)} samples")
    return trace.samples[lo : lo + k]


def interval_max(trace: TrafficTrace, interval: int, k: int) -> float:
    """Maximum fluctuation within one planning interval (the psi ground truth)."""
    return float(interval_fluctuations(trace, interval, k).max())


def num_intervals(trace_len: int, k: int) -> int:
    return trace_len // k


def window_count(trace_len: int, r: int, k: int, u: int) -> int:
    """Number of complete sliding-window patterns: floor(len/k) - r - u."""
    return max(0, num_intervals(trace_len, k) - r - u)


def samples_for_patterns(n_patterns: int, r: int, k: int, u: int) -> int:
    """Trace length (in raw samples) that yields exactly ``n_patterns`` windows."""
    return (n_patterns + r + u) * k


def build_dataset(trace: TrafficTrace, r: int, k: int, u: int) -> list[WindowSample]:
    """Build the ordered window dataset for one source.

    Trailing samples that do not fill a complete interval of k are dropped.
    Valid present intervals are t = r .. floor(len/k) - u - 1, one sample each.
    """
    if r < 1 or k < 1 or u < 1:
        raise ValueError("r, k, u must all be >= 1")
    n_int = num_intervals(len(trace), k)
    if k * (r + 1 + u) > len(trace):
        raise DatasetSizeError(
            f"trace of {len(trace)} samples too short for one window "
            f"(needs k*(r+1+u) = {k * (r + 1 + u)})"
        )
    samples = []
    for t in range(r, n_int - u):
        chi = trace.samples[(t - r) * k : (t + 1) * k]
        psi = np.array(
            [trace.samples[(t + 1 + j) * k : (t + 2 + j) * k].max() for j in range(u)]
        )
        samples.append(WindowSample(t, chi.copy(), psi))
    return samples


def split(dataset: list[WindowSample], train_fraction: float) -> tuple[list[WindowSample], list[WindowSample]]:
    """Chronological split: the first floor(n * train_fraction) samples train."""
    if not dataset:
        raise DatasetSizeError("cannot split an empty dataset")
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n_train = int(len(dataset) * train_fraction)
    return dataset[:n_train], dataset[n_train:]


@dataclass(frozen=True)
class Normalizer:
    """Affine map sending [min, max] Gbps onto [0, 1] (values outside the fitted
    range map outside [0, 1]; no clamping)."""

    min: float
    max: float

    def __post_init__(self):
        if not self.min < self.max:
            raise NormalizationError(f"degenerate range [{self.min}, {self.max}]")

    def apply(self, values):
        return (np.asarray(values, dtype=np.float64) - self.min) / (self.max - self.min)

    def invert(self, values):
        return np.asarray(values, dtype=np.float64) * (self.max - self.min) + self.min


def fit_normalizer(samples: list[WindowSample]) -> Normalizer:
    """Min-max statistics over every chi and psi value of the given samples.

    Call with the training split only so test values never leak into the range.
    """
    if not samples:
        raise NormalizationError("cannot fit a normalizer on an empty dataset")
    lo = min(min(s.chi.min(), s.psi.min()) for s in samples)
    hi = max(max(s.chi.max(), s.psi.max()) for s in samples)
    return Normalizer(float(lo), float(hi))


def normalize_samples(samples: list[WindowSample], norm: Normalizer) -> list[WindowSample]:
    return [WindowSample(s.t_index, norm.apply(s.chi), norm.apply(s.psi)) for s in samples]


def dataset_header(r: int, k: int, u: int) -> list[str]:
    n_chi = (r + 1) * k
    return (
        ["t_index"]
        + [f"chi_{i}" for i in range(n_chi)]
        + [f"psi_{j}" for j in range(u)]
    )


def export_dataset_csv(samples: list[WindowSample], path: str, r: int, k: int, u: int,
                       config_note: dict | None = None) -> None:
    """Write one source's window dataset: ``t_index, chi_0.., psi_0..``.

    This file is the primary<->forecaster boundary.  An optional leading
    ``# eonplan-config: {...}`` comment embeds the resolved run configuration;
    readers skip lines starting with '#'.
    """
    header = dataset_header(r, k, u)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if config_note is not None:
            fh.write("# eonplan-config: " + json.dumps(config_note, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in samples:
            if len(s.chi) != (r + 1) * k or len(s.psi) != u:
                raise ValueError("sample shape does not match r/k/u")
            writer.writerow([s.t_index] + [repr(float(v)) for v in s.chi] + [repr(float(v)) for v in s.psi])


def load_dataset_csv(path: str) -> list[WindowSample]:
    """Read a dataset csv back into WindowSamples (chi/psi widths from header)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and not row[0].lstrip().startswith("#")]
    header = rows[0]
    n_chi = sum(1 for c in header if c.startswith("chi_"))
    n_psi = sum(1 for c in header if c.startswith("psi_"))
    samples = []
    for row in rows[1:]:
        t = int(row[0])
        vals = [float(v) for v in row[1:]]
        samples.append(WindowSample(t, np.array(vals[:n_chi]), np.array(vals[n_chi : n_chi + n_psi])))
    return samples
