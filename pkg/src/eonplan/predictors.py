"""Uniform predictor contract for the planner.

Every backend answers the same question: at planning epoch t, what are the u
predicted bit-rates (Gbps) for each connection's source?  Backends:

* ``file`` — values read verbatim from a predictions interchange csv
  (``source_id, t_index, step, predicted_gbps``), as produced by the external
  forecaster.
* ``oracle`` — true per-interval maxima of the future trace (perfect foresight).
* ``persistence`` — the present interval's maximum repeated u times (sanity
  baseline, not part of paper-style comparisons by default).

Bit-rate scaling (the x50 of the Abilene scenario) happens here, uniformly for
all backends, so forecaster output stays in native Gbps.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CoverageError, HorizonError
from .traces import TrafficTrace
from .windowing import interval_max, num_intervals

PREDICTIONS_HEADER = ("source_id", "t_index", "step", "predicted_gbps")


@dataclass(frozen=True)
class PredictionMatrix:
    """Per-connection u-step bit-rate predictions for one planning epoch."""

    epoch: int
    rows: dict[str, tuple[float, ...]] = field(repr=False)

    def __post_init__(self):
        for cid, values in self.rows.items():
            if any(v < 0 or not np.isfinite(v) for v in values):
                raise ValueError(f"connection {cid}: prediction values must be finite and >= 0")

    def steps(self, connection_id: str) -> tuple[float, ...]:
        return self.rows[connection_id]


class OraclePredictor:
    """Perfect foresight: the true maxima of intervals t+1..t+u (equals psi_t)."""

    name = "oracle"

    def __init__(self, traces: dict[str, TrafficTrace], k: int, u: int):
        self.traces = traces
        self.k = k
        self.u = u

    def raw(self, source_id: str, epoch: int) -> tuple[float, ...]:
        trace = self.traces[source_id]
        if (epoch + 1 + self.u) * self.k > len(trace):
            raise HorizonError(
                f"epoch {epoch}: oracle needs intervals up to {epoch + self.u}, "
                f"trace {source_id} has {num_intervals(len(trace), self.k)}"
            )
        return tuple(interval_max(trace, epoch + 1 + j, self.k) for j in range(self.u))


class PersistencePredictor:
    """Max of the present interval's k true fluctuations, repeated u times."""

    name = "persistence"

    def __init__(self, traces: dict[str, TrafficTrace], k: int, u: int):
        self.traces = traces
        self.k = k
        self.u = u

    def raw(self, source_id: str, epoch: int) -> tuple[float, ...]:
        trace = self.traces[source_id]
        if (epoch + 1) * self.k > len(trace):
            raise HorizonError(f"epoch {epoch} beyond trace {source_id}")
        return (interval_max(trace, epoch, self.k),) * self.u


class FilePredictor:
    """Predictions interchange file backend; values are returned verbatim."""

    name = "file"

    def __init__(self, path: str, u: int):
        self.path = path
        self.u = u
        self._table: dict[tuple[str, int], dict[int, float]] = {}
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
        if not rows or [c.strip().lower() for c in rows[0]] != list(PREDICTIONS_HEADER):
            raise CoverageError(
                f"{path}: expected header {','.join(PREDICTIONS_HEADER)!r}"
            )
        for row in rows[1:]:
            source, t_index, step, gbps = row[0], int(row[1]), int(row[2]), float(row[3])
            self._table.setdefault((source, t_index), {})[step] = gbps

    def raw(self, source_id: str, epoch: int) -> tuple[float, ...]:
        steps = self._table.get((source_id, epoch))
        missing = [
            (source_id, epoch, s)
            for s in range(1, self.u + 1)
            if steps is None or s not in steps
        ]
        if missing:
            raise CoverageError(f"{self.path}: missing rows {missing}")
        return tuple(steps[s] for s in range(1, self.u + 1))

    def validate_coverage(self, source_ids, epochs) -> None:
        """Raise CoverageError listing every missing (source, epoch, step)."""
        missing = []
        for source in source_ids:
            for epoch in epochs:
                steps = self._table.get((source, epoch), {})
                missing.extend(
                    (source, epoch, s) for s in range(1, self.u + 1) if s not in steps
                )
        if missing:
            head = ", ".join(map(str, missing[:8]))
            more = f" (+{len(missing) - 8} more)" if len(missing) > 8 else ""
            raise CoverageError(f"{self.path}: missing rows {head}{more}")


class PredictorGateway:
    """Applies the scenario bit-rate scale on top of a backend; read-only."""

    def __init__(self, backend, scale: float = 1.0):
        if scale <= 0:
            raise ValueError("scale must be > 0")
        self.backend = backend
        self.scale = scale

    @property
    def name(self) -> str:
        return self.backend.name

    def predict(self, epoch: int, connections: list[tuple[str, str]]) -> PredictionMatrix:
        """``connections`` is a list of (connection_id, source_id) pairs."""
        rows = {}
        for cid, source in connections:
            rows[cid] = tuple(self.scale * v for v in self.backend.raw(source, epoch))
        return PredictionMatrix(epoch, rows)


def write_predictions_csv(path: str, rows, config_note: dict | None = None) -> None:
    """Write interchange rows ``(source_id, t_index, step, predicted_gbps)``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if config_note is not None:
            fh.write("# eonplan-config: " + json.dumps(config_note, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(PREDICTIONS_HEADER)
        for source, t_index, step, gbps in rows:
            writer.writerow([source, t_index, step, repr(float(gbps))])


def make_noisy_prediction_rows(traces: dict[str, TrafficTrace], epochs, k: int, u: int,
                               sigma: float, seed: int, shrink: float = 0.90):
    """Trained-forecaster stand-in in native Gbps, one row per (source, epoch, step).

    Mimics two error modes of MSE-trained regressors on interval maxima:
    extremes are shrunk toward the training-window mean level (peak shaving,
    ``shrink`` < 1) and a seeded relative Gaussian jitter (``sigma``) rides on
    top.  Negatives clamp to 0.
    """
    rng = np.random.default_rng(seed)
    rows = []
    first_epoch = min(epochs)
    for source in sorted(traces):
        trace = traces[source]
        history = [interval_max(trace, t, k) for t in range(first_epoch)]
        center = float(np.mean(history)) if history else 0.0
        for epoch in epochs:
            for j in range(u):
                truth = interval_max(trace, epoch + 1 + j, k)
                shaved = center + shrink * (truth - center)
                noisy = max(0.0, shaved * (1.0 + sigma * rng.standard_normal()))
                rows.append((source, epoch, j + 1, noisy))
    return rows
