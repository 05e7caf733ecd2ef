import csv
import json

import pytest

from eonplan import abilene
from eonplan.cli import EXIT_CONFIG, EXIT_OK, main


@pytest.fixture(scope="module")
def small_trace_csv(tmp_path_factory):
    """Two-day, 12-source csv trace; small enough for fast CLI runs."""
    tmp = tmp_path_factory.mktemp("traces")
    traces = abilene.synth_traces(seed=0, days=2)
    path = tmp / "abilene_2d.csv"
    abilene.write_trace_csv(traces, str(path), seed=0)
    return str(path)


def run(argv):
    return main(argv)


class TestIngest:
    def test_writes_datasets_and_manifest(self, small_trace_csv, tmp_path):
        out = tmp_path / "ds"
        code = run([
            "ingest", "--trace", small_trace_csv, "--out", str(out),
            "--patterns", "60",
        ])
        assert code == EXIT_OK
        manifest = json.loads((out / "manifest.json").read_text())
        assert len(manifest["sources"]) == 12
        info = manifest["sources"]["ATLAM5"]
        assert info["patterns"] == 60
        assert info["train_patterns"] == 48 and info["test_patterns"] == 12
        with open(out / info["file"], encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        assert rows[0][:2] == ["t_index", "chi_0"]
        assert len(rows) - 1 == 60
        assert len(rows[1]) == 1 + 24 + 4

    def test_synth_source_default(self, tmp_path):
        out = tmp_path / "ds"
        code = run(["ingest", "--synth-days", "2", "--out", str(out), "--patterns", "40"])
        assert code == EXIT_OK
        assert len(list(out.glob("dataset_*.csv"))) == 12

    def test_missing_file_exit_2_names_path(self, tmp_path, capsys):
        code = run(["ingest", "--trace", str(tmp_path / "missing.csv"), "--out", str(tmp_path)])
        assert code == EXIT_CONFIG
        assert "missing.csv" in capsys.readouterr().err

    def test_too_few_samples_exit_2(self, small_trace_csv, tmp_path):
        code = run([
            "ingest", "--trace", small_trace_csv, "--out", str(tmp_path), "--patterns", "5000",
        ])
        assert code == EXIT_CONFIG


class TestSimulate:
    COMMON = ["--synth-days", "3", "--patterns", "80", "--scale", "40"]

    def test_scheme_sweep_writes_reports(self, tmp_path):
        out = tmp_path / "runs"
        code = run(["simulate", "--scheme", "mmd,mad,ssd", "--predictor", "oracle",
                    "--out", str(out), *self.COMMON])
        assert code == EXIT_OK
        table = (out / "report.txt").read_text()
        assert "MMD-SA" in table and "Blocked Connections" in table
        metrics = json.loads((out / "metrics_mmd.json").read_text())
        assert metrics["metrics"]["blocked"] == 0
        assert "config" in metrics
        with open(out / "metrics.csv", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        assert lines[0].startswith("# eonplan-config:")
        assert lines[1].split(",")[0] == "scheme"
        assert len(lines) == 2 + 3

    def test_mmd_u1_equals_ssd(self, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert run(["simulate", "--scheme", "mmd", "--u", "1", "--out", str(out_a), *self.COMMON]) == EXIT_OK
        assert run(["simulate", "--scheme", "ssd", "--u", "1", "--out", str(out_b), *self.COMMON]) == EXIT_OK
        a = json.loads((out_a / "metrics_mmd.json").read_text())["metrics"]
        b = json.loads((out_b / "metrics_ssd.json").read_text())["metrics"]
        for key in ("blocked", "disruptions_total", "unutilized_avg"):
            assert a[key] == b[key]

    def test_seed_determinism_byte_identical(self, tmp_path):
        out = tmp_path / "runs"
        outs = []
        for _ in range(2):
            assert run(["simulate", "--scheme", "mad", "--seed", "7", "--out", str(out),
                        *self.COMMON]) == EXIT_OK
            outs.append((out / "metrics.csv").read_text())
        assert outs[0] == outs[1]

    def test_events_log(self, tmp_path):
        out = tmp_path / "runs"
        assert run(["simulate", "--scheme", "ssd", "--events", "--out", str(out),
                    *self.COMMON]) == EXIT_OK
        lines = (out / "events_ssd.csv").read_text().splitlines()
        assert lines[1].split(",")[0] == "phase"
        assert len(lines) > 3

    def test_unknown_scheme_exit_2(self, tmp_path):
        assert run(["simulate", "--scheme", "sdd", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_file_predictor_missing_coverage_exit_2(self, tmp_path):
        pred = tmp_path / "p.csv"
        pred.write_text("source_id,t_index,step,predicted_gbps\nATLAM5,0,1,1.0\n")
        assert run(["simulate", "--scheme", "mmd", "--predictor", f"file:{pred}",
                    "--out", str(tmp_path / "o"), *self.COMMON]) == EXIT_CONFIG


class TestConfigFile:
    def test_precedence_flags_over_file_over_defaults(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("patterns = 80\nsynth_days = 3\nscale = 25\nseed = 3\n")
        out = tmp_path / "o"
        code = run(["simulate", "--config", str(cfg), "--scheme", "mmd",
                    "--scale", "30", "--out", str(out)])
        assert code == EXIT_OK
        conf = json.loads((out / "metrics_mmd.json").read_text())["config"]
        assert conf["scale"] == 30.0  # flag wins
        assert conf["patterns"] == 80  # file beats default
        assert conf["seed"] == 3

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("not_a_key = 1\n")
        with pytest.raises(Exception):
            run(["simulate", "--config", str(cfg), "--scheme", "mmd", "--out", str(tmp_path)])


class TestCompareAndPaths:
    def test_compare_prints_deltas(self, tmp_path, capsys):
        for name, disr in (("a.json", 5), ("b.json", 8)):
            (tmp_path / name).write_text(json.dumps({
                "metrics": {"blocked": 0, "disruptions_total": disr,
                            "disruptions_avg": disr / 12, "unutilized_avg": 3.0}
            }))
        assert run(["compare", str(tmp_path / "a.json"), str(tmp_path / "b.json")]) == EXIT_OK
        out = capsys.readouterr().out
        assert "disruptions_total" in out and "+3" in out

    def test_paths_lists_modulation(self, capsys):
        assert run(["paths", "--pairs", "ATLAM5-ATLAng,NYCMng-LOSAng"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "ATLAM5 -> ATLAng" in out
        assert "km" in out

    def test_paths_all_pairs_runs(self, capsys):
        assert run(["paths"]) == EXIT_OK
        assert capsys.readouterr().out.count("->") >= 132  # 12 * 11 pairs
