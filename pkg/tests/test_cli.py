import csv
import json
import math
import subprocess
import sys

import pytest

from minimax_detect.capacity import SolverConfig, solve_capacity
from minimax_detect.cli import main
from minimax_detect.core import Channel
from minimax_detect.detector import aggregate, score_records
from minimax_detect.io import (default_synthetic_path, generate_synthetic, read_groups,
                               read_scores, read_synthetic_config, report_to_dict)
from minimax_detect.losses import fr_loss
from minimax_detect.mead import evaluate


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def small_synth(tmp_path):
    cfg = tmp_path / "cfg.json"
    doc = json.loads(open(default_synthetic_path()).read())
    doc.update(n_natural=40, n_adversarial_per_attack=30)
    cfg.write_text(json.dumps(doc))
    return cfg


class TestCapacity:
    def test_bits(self, capsys):
        code, out, _ = run(capsys, "capacity", "--rows", "0.9,0.1;0.1,0.9", "--bits")
        assert code == 0
        doc = json.loads(out)
        assert doc["capacity"] == pytest.approx(0.531004406410718779, abs=1e-12)
        assert doc["units"] == "bits"

    def test_uniform_row(self, capsys):
        code, out, _ = run(capsys, "capacity", "--rows", "0.5,0.5")
        assert code == 0 and json.loads(out)["capacity"] == 0

    def test_malformed(self, capsys):
        code, _, err = run(capsys, "capacity", "--rows", "0.9,0.1;0.1")
        assert code == 2 and "error" in err

    def test_non_stochastic(self, capsys):
        assert run(capsys, "capacity", "--rows", "0.7,0.4")[0] == 2

    def test_matches_library(self, capsys, tmp_path):
        path = tmp_path / "ch.json"
        path.write_text('[[0.8, 0.2], [0.35, 0.65], [0.1, 0.9]]')
        code, out, _ = run(capsys, "capacity", "--channel", str(path), "--tol", "1e-12")
        lib = solve_capacity([[0.8, 0.2], [0.35, 0.65], [0.1, 0.9]], SolverConfig(tolerance=1e-12))
        doc = json.loads(out)
        assert doc["capacity"] == lib.capacity
        assert doc["weights"] == lib.weights.to_list()
        assert doc["iterations"] == lib.iterations


class TestAggregate:
    def test_values(self, capsys):
        code, out, _ = run(capsys, "aggregate", "--values", "0.9,0.1")
        doc = json.loads(out)
        assert code == 0
        assert doc["p_adversarial"] == aggregate(Channel.from_scores([0.9, 0.1])).p_adversarial
        assert doc["adversarial"] is False

    def test_file(self, capsys, tmp_path, small_synth):
        scores = tmp_path / "s.csv"
        assert run(capsys, "synth", "--config", str(small_synth), "--out", str(scores))[0] == 0
        out = tmp_path / "agg.csv"
        assert run(capsys, "aggregate", "--scores", str(scores), "--out", str(out))[0] == 0
        rows = list(csv.DictReader(open(out)))
        lib = score_records(read_scores(scores))
        assert len(rows) == len(lib)
        assert [float(r["p_adversarial"]) for r in rows] == [s.p_adversarial for s in lib]


class TestEvaluate:
    def test_smoke_and_library_equality(self, capsys, tmp_path, small_synth):
        scores = tmp_path / "s.csv"
        run(capsys, "synth", "--config", str(small_synth), "--out", str(scores))
        report = tmp_path / "r.json"
        code, out, _ = run(capsys, "evaluate", "--scores", str(scores), "--out", str(report),
                           "--baselines", "--roc-dump", str(tmp_path / "roc"))
        assert code == 0
        assert "Linf/0.125" in out and "det_3" in out
        doc = json.loads(report.read_text())
        lib = evaluate(read_scores(scores), read_groups(), baselines=True)
        assert doc == json.loads(json.dumps(report_to_dict(lib)))
        assert (tmp_path / "roc" / "mixture__Linf_0.125.csv").exists()

    def test_baselines_dominated_on_shipped_scenario(self, capsys, tmp_path):
        scores, report = tmp_path / "s.csv", tmp_path / "r.json"
        run(capsys, "synth", "--out", str(scores))
        assert run(capsys, "evaluate", "--scores", str(scores), "--out", str(report), "--baselines")[0] == 0
        doc = json.loads(report.read_text())
        (mix,) = doc["groups"]
        for rows in doc["baselines"].values():
            assert mix["auroc"] > rows[0]["auroc"]
            assert mix["fpr_at_95_tpr"] <= rows[0]["fpr_at_95_tpr"]

    def test_missing_groups_file(self, capsys, tmp_path, small_synth):
        scores = tmp_path / "s.csv"
        run(capsys, "synth", "--config", str(small_synth), "--out", str(scores))
        code, _, err = run(capsys, "evaluate", "--scores", str(scores), "--groups", str(tmp_path / "nope.json"))
        assert code == 2

    def test_empty_class_exit_3(self, capsys, tmp_path, small_synth):
        doc = json.loads(small_synth.read_text())
        doc["fool_rate"] = 0.0
        small_synth.write_text(json.dumps(doc))
        scores = tmp_path / "s.jsonl"
        run(capsys, "synth", "--config", str(small_synth), "--out", str(scores))
        assert run(capsys, "evaluate", "--scores", str(scores))[0] == 3


class TestSynth:
    def test_same_seed_identical(self, capsys, tmp_path, small_synth):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "synth", "--config", str(small_synth), "--seed", "7", "--out", str(a))
        run(capsys, "synth", "--config", str(small_synth), "--seed", "7", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().startswith("# generator: numpy.random.Generator(PCG64) seed=7")

    def test_different_seeds(self, capsys, tmp_path, small_synth):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "synth", "--config", str(small_synth), "--seed", "7", "--out", str(a))
        run(capsys, "synth", "--config", str(small_synth), "--seed", "8", "--out", str(b))
        assert a.read_bytes() != b.read_bytes()

    def test_default_config_loads(self, capsys, tmp_path):
        out = tmp_path / "d.csv"
        assert run(capsys, "synth", "--out", str(out))[0] == 0
        recs = read_scores(out)
        assert len(recs) == 500 + 500 * 13
        assert recs == generate_synthetic(read_synthetic_config())

    def test_bad_config(self, capsys, tmp_path):
        p = tmp_path / "c.json"
        p.write_text("{")
        assert run(capsys, "synth", "--config", str(p), "--out", str(tmp_path / "o.csv"))[0] == 2


class TestLosses:
    def test_inline(self, capsys):
        code, out, _ = run(capsys, "losses", "--loss", "FR", "--clean", "0.5,0.5", "--adv", "0.9,0.1")
        assert code == 0
        assert json.loads(out) == {"FR": fr_loss([0.5, 0.5], [0.9, 0.1])}

    def test_all_from_file(self, capsys, tmp_path):
        p = tmp_path / "l.json"
        p.write_text('{"clean": [1, 0], "adv": [0.5, 0.5]}')
        doc = json.loads(run(capsys, "losses", "--file", str(p))[1])
        assert doc["ACE"] == pytest.approx(math.log(2))
        assert set(doc) == {"ACE", "KL", "FR", "Gini"}

    def test_gini_needs_only_adv(self, capsys):
        code, out, _ = run(capsys, "losses", "--loss", "Gini", "--adv", "0.5,0.5")
        assert code == 0

    def test_invalid(self, capsys):
        assert run(capsys, "losses", "--clean", "0.5,0.6", "--adv", "0.5,0.5")[0] == 2


class TestGroupsCheck:
    def test_default(self, capsys):
        code, out, _ = run(capsys, "groups-check")
        assert code == 0
        assert out.strip().endswith("24 cells, 134 attack variants")

    def test_json(self, capsys):
        doc = json.loads(run(capsys, "groups-check", "--json")[1])
        assert doc["n_variants"] == 134


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "minimax_detect", "capacity", "--rows", "oops"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    proc = subprocess.run([sys.executable, "-m", "minimax_detect", "groups-check"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
