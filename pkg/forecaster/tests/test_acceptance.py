"""Acceptance: convergence at paper hyperparameters and interchange integrity.

Convergence retrains the first three source datasets (D_1..D_3) from the
repo's data/datasets export with the stock configuration; expect a few
minutes per source on CPU.  Interchange integrity validates the combined
predictions file produced by scripts/train_all.py.
"""

import csv
import os

import numpy as np
import pytest

from edforecast.data import load_source
from edforecast.model import ForecasterConfig
from edforecast.train import train

ROOT = os.path.join(os.path.dirname(__file__), "..", "..")
DATASETS = os.path.join(ROOT, "data", "datasets")
PREDICTIONS = os.path.join(ROOT, "data", "predictions", "predictions_all.csv")

FIRST_THREE = ("ATLAM5", "ATLAng", "CHINng")  # D_1, D_2, D_3


def ok(name, detail=""):
    print(f"[PASS] {name}" + (f" -- {detail}" if detail else ""))


@pytest.mark.skipif(not os.path.isdir(DATASETS), reason="run `eonplan ingest` first")
class TestForecasterConvergence:
    def test_paper_config_reaches_low_test_mse(self):
        results = {}
        for source in FIRST_THREE:
            dataset = load_source(os.path.join(DATASETS, f"dataset_{source}.csv"))
            assert dataset.n == 800 and dataset.n_train == 640
            model, report = train(dataset, ForecasterConfig(seed=0))
            assert len(report.epoch_losses) == 500
            assert report.final_test_mse <= 0.02, (
                f"{source}: test mse {report.final_test_mse:.5f} > 0.02"
            )
            first50 = float(np.mean(report.epoch_losses[:50]))
            last50 = float(np.mean(report.epoch_losses[-50:]))
            assert last50 < first50
            results[source] = (report.final_test_mse, report.wall_seconds)
        detail = ", ".join(
            f"{s}: mse {mse:.4f} in {secs / 60:.1f}min" for s, (mse, secs) in results.items()
        )
        ok("forecaster-convergence", detail)


@pytest.mark.skipif(
    not os.path.exists(PREDICTIONS), reason="run scripts/train_all.py first"
)
class TestInterchangeIntegrity:
    def test_full_horizon_coverage(self):
        table = {}
        with open(PREDICTIONS, encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        assert rows[0] == ["source_id", "t_index", "step", "predicted_gbps"]
        for source, t, step, gbps in rows[1:]:
            value = float(gbps)
            assert np.isfinite(value) and value >= 0.0
            table.setdefault(source, {}).setdefault(int(t), set()).add(int(step))
        assert len(table) == 12, f"expected 12 sources, found {sorted(table)}"
        epochs = None
        for source, per_epoch in table.items():
            assert len(per_epoch) == 160, f"{source}: {len(per_epoch)} epochs"
            if epochs is None:
                epochs = sorted(per_epoch)
                assert epochs == list(range(epochs[0], epochs[0] + 160))
            else:
                assert sorted(per_epoch) == epochs
            for t, steps in per_epoch.items():
                assert steps == {1, 2, 3, 4}, f"{source}@{t}: steps {sorted(steps)}"
        ok("interchange-integrity", f"12 sources x 160 epochs x 4 steps at epochs {epochs[0]}..{epochs[-1]}")

    def test_loss_curves_trend_downward(self):
        pred_dir = os.path.dirname(PREDICTIONS)
        curves = [f for f in os.listdir(pred_dir) if f.startswith("loss_")]
        assert len(curves) == 12
        for name in curves:
            losses = []
            with open(os.path.join(pred_dir, name), encoding="utf-8", newline="") as fh:
                for row in csv.reader(fh):
                    if row and row[0].isdigit():
                        losses.append(float(row[1]))
            assert len(losses) == 500
            assert np.mean(losses[-50:]) < np.mean(losses[:50])
        ok("loss-curve-shape", "last-50 mean < first-50 mean for all 12 sources")
