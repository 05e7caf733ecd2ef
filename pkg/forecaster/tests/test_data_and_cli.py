import csv
import json

import numpy as np
import pytest

from conftest import make_dataset, write_dataset_files
from edforecast.cli import main
from edforecast.data import load_source, write_predictions


class TestDataContract:
    def test_load_round_trip(self, tmp_path):
        ds = make_dataset(n=40, n_train=30)
        csv_path, manifest_path = write_dataset_files(tmp_path, ds, r=1, k=2, u=2)
        back = load_source(csv_path, manifest_path)
        assert back.source_id == "SRC"
        assert back.n_train == 30
        assert np.allclose(back.chi, ds.chi)
        assert np.allclose(back.psi, ds.psi)
        assert (back.norm_min, back.norm_max) == (1.0, 9.0)

    def test_manifest_defaults_to_sibling(self, tmp_path):
        ds = make_dataset(n=20, n_train=15)
        csv_path, _ = write_dataset_files(tmp_path, ds, 1, 2, 2)
        assert load_source(csv_path).n == 20

    def test_row_count_must_match_manifest(self, tmp_path):
        ds = make_dataset(n=20, n_train=15)
        csv_path, manifest_path = write_dataset_files(tmp_path, ds, 1, 2, 2)
        manifest = json.loads(open(manifest_path).read())
        manifest["sources"]["SRC"]["patterns"] = 19
        open(manifest_path, "w").write(json.dumps(manifest))
        with pytest.raises(ValueError, match="manifest"):
            load_source(csv_path, manifest_path)

    def test_unknown_source_rejected(self, tmp_path):
        ds = make_dataset(n=20, n_train=15)
        csv_path, manifest_path = write_dataset_files(tmp_path, ds, 1, 2, 2)
        with pytest.raises(ValueError, match="OTHER"):
            load_source(csv_path, manifest_path, source_id="OTHER")

    def test_denormalize(self):
        ds = make_dataset()
        assert ds.denormalize(np.array(0.5)) == 0.5 * 8 + 1

    def test_write_predictions_append(self, tmp_path):
        path = str(tmp_path / "p.csv")
        write_predictions(path, [("A", 1, 1, 2.0)])
        write_predictions(path, [("B", 1, 1, 3.0)], append=True)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["source_id", "t_index", "step", "predicted_gbps"]
        assert len(rows) == 3


class TestCli:
    def test_train_then_export(self, tmp_path, capsys):
        ds = make_dataset(n=60, n_train=48)
        csv_path, manifest_path = write_dataset_files(tmp_path, ds, 1, 2, 2)
        model_path = str(tmp_path / "m.pt")
        code = main([
            "train", "--dataset", csv_path, "--manifest", manifest_path,
            "--out-model", model_path, "--loss-curve", str(tmp_path / "loss.csv"),
            "--r", "1", "--k", "2", "--u", "2",
            "--hidden-units", "12", "--dense-units", "6", "--epochs", "30", "--seed", "1",
        ])
        assert code == 0
        assert "test mse" in capsys.readouterr().out
        out_path = str(tmp_path / "pred.csv")
        code = main([
            "export", "--model", model_path, "--test", csv_path,
            "--manifest", manifest_path, "--out", out_path,
        ])
        assert code == 0
        with open(out_path) as fh:
            rows = [r for r in csv.reader(fh)][1:]
        assert len(rows) == (60 - 48) * 2
        assert {int(r[2]) for r in rows} == {1, 2}
        epochs = sorted({int(r[1]) for r in rows})
        assert epochs == list(ds.test_epochs())

    def test_bad_dataset_exit_2(self, tmp_path):
        bad = tmp_path / "nope.csv"
        assert main(["train", "--dataset", str(bad), "--out-model", str(tmp_path / "m.pt")]) == 2
