import json
import subprocess
import sys

import pytest

from semicausal.cli import main


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture
def lag1_csv(tmp_path):
    path = tmp_path / "pair.csv"
    code = run_cli(
        "simulate", "--preset", "lag1-copy", "--coupling", "9/10",
        "--n", "600", "--seed", "3", "--out", str(path),
    )
    assert code == 0
    return path


class TestSimulate:
    def test_writes_csv(self, lag1_csv):
        lines = lag1_csv.read_text().strip().splitlines()
        assert lines[0] == "x,y"
        assert len(lines) == 601

    def test_model_config_file(self, tmp_path):
        config = {
            "class": "strict-causal",
            "alphabet": 2,
            "coupling": "3/4",
            "rules": {"x": {"type": "iid", "p": ["1/2", "1/2"]}, "y": {"type": "copy", "lag": 1}},
        }
        cfg = tmp_path / "model.json"
        cfg.write_text(json.dumps(config))
        out = tmp_path / "pair.csv"
        assert run_cli("simulate", "--model", str(cfg), "--n", "50", "--seed", "1",
                       "--out", str(out)) == 0
        assert out.exists()


class TestAnalyze:
    def test_lag1_fixture_direction(self, tmp_path, lag1_csv):
        out = tmp_path / "report.json"
        code = run_cli("analyze", "--input", str(lag1_csv), "--trials", "60",
                       "--seed", "1", "--out", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["terms"]["T_yx"] > 0.2
        assert abs(doc["terms"]["T_xy"]) < 0.05
        assert doc["p_value"] < 0.05
        assert doc["statistic"] == "transfer_decomposition"
        assert set(doc) >= {"statistic", "value_log2", "terms", "p_value",
                            "trials", "seed", "family", "flags"}

    def test_byte_identical_reports(self, tmp_path, lag1_csv):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        for out in (out1, out2):
            assert run_cli("analyze", "--input", str(lag1_csv), "--trials", "30",
                           "--seed", "9", "--out", str(out)) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_missing_input_exits_one_with_error_json(self, tmp_path, capsys):
        code = run_cli("analyze", "--input", str(tmp_path / "missing.csv"))
        assert code == 1
        doc = json.loads(capsys.readouterr().out)
        assert "missing.csv" in doc["error"]["message"]


class TestIdealTest:
    def test_strict_vs_free_on_lag1(self, tmp_path):
        pair = tmp_path / "short.csv"
        assert run_cli("simulate", "--preset", "lag1-copy", "--n", "80",
                       "--seed", "2", "--out", str(pair)) == 0
        out = tmp_path / "test.json"
        code = run_cli("test", "--name", "8", "--input", str(pair),
                       "--family", "pair:k=1,g=2", "--seed", "0",
                       "--exact-sidecar", "--out", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["statistic"] == "strict_vs_free"
        assert doc["value_log2"] > 30
        assert "exact" in doc and "/" in doc["exact"]["ratio"]
        assert doc["family"]["type"] == "pair"
        assert set(doc["all_tests"]) == {
            "instantaneous_vs_strict", "strict_vs_free", "hidden_vs_instantaneous",
            "hidden_vs_strict", "hidden_vs_free",
        }

    def test_unknown_name_is_domain_error(self, tmp_path, lag1_csv):
        assert run_cli("test", "--name", "12", "--input", str(lag1_csv)) == 1

    def test_permutation_p_value_on_short_series(self, tmp_path):
        pair = tmp_path / "tiny.csv"
        assert run_cli("simulate", "--preset", "lag1-copy", "--n", "40",
                       "--seed", "4", "--out", str(pair)) == 0
        out = tmp_path / "perm.json"
        code = run_cli("test", "--name", "strict_vs_free", "--input", str(pair),
                       "--trials", "12", "--seed", "1", "--out", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["p_value"] == pytest.approx(1 / 13)
        assert doc["trials"] == 12


class TestGrowCli:
    def test_uniform_trace(self, tmp_path):
        out = tmp_path / "trace.json"
        assert run_cli("grow", "--uniform-depth", "2", "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["branch"] == "00"
        assert doc["load_nodes"] == ["01"]
        assert doc["after"] == ["1/8", "1/4", "1/8", "1/8"]
        assert doc["leaf_classes"] == ["halved", "load", "halved", "halved"]

    def test_input_file(self, tmp_path):
        from semicausal.semimeasure import random_semimeasure

        sm = random_semimeasure(4, 4, strictly_positive=True)
        src = tmp_path / "sm.json"
        src.write_text(sm.to_json())
        out = tmp_path / "trace.json"
        assert run_cli("grow", "--input", str(src), "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        assert len(doc["branch"]) == 4


class TestMixtureCli:
    def test_markov_family_doc(self, tmp_path):
        out = tmp_path / "mixture.json"
        assert run_cli("mixture", "--family", "markov:k=0,g=2", "--depth", "2",
                       "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["family"]["size"] == 6
        assert len(doc["weights"]) == 6
        assert doc["dense"]["depth"] == 2

    def test_bad_family_parameter(self):
        assert run_cli("mixture", "--family", "markov:q=3") == 1


class TestSelftestCli:
    def test_exit_zero(self, tmp_path):
        out = tmp_path / "selftest.json"
        assert run_cli("selftest", "--n", "3", "--cases", "6", "--seed", "1",
                       "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["ok"] is True
        assert doc["failures"] == 0

    def test_byte_identical(self, tmp_path):
        outs = []
        for name in ("s1.json", "s2.json"):
            out = tmp_path / name
            assert run_cli("selftest", "--n", "3", "--cases", "4", "--seed", "2",
                           "--out", str(out)) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestUsageErrors:
    def test_unknown_subcommand_exit_two(self):
        proc = subprocess.run(
            [sys.executable, "-m", "semicausal.cli", "frobnicate"],
            capture_output=True,
        )
        assert proc.returncode == 2

    def test_unknown_flag_exit_two(self):
        proc = subprocess.run(
            [sys.executable, "-m", "semicausal.cli", "selftest", "--bogus"],
            capture_output=True,
        )
        assert proc.returncode == 2
