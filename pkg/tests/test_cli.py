"""End-to-end command-line runs, in process through ``gapboot.cli.main``."""
from __future__ import annotations

import json

import numpy as np
import pytest

from gapboot.cli import main
from gapboot.od import read_od_csv


def run(*argv: str) -> int:
    return main(list(argv))


class TestUsage:
    def test_no_subcommand_prints_usage(self, capsys):
        assert run() == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self, tmp_path, capsys):
        assert run("simulate", "--bogus", "--out", str(tmp_path / "r.csv")) == 1
        assert "bogus" in capsys.readouterr().err

    def test_n_without_p(self, tmp_path, capsys):
        assert run("simulate", "--n", "60", "--out", str(tmp_path / "r.csv")) == 1
        assert "--n and --p" in capsys.readouterr().err

    def test_unknown_config_field(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        assert run("simulate", "--config", str(cfg), "--out", str(tmp_path / "r.csv")) == 1
        assert "unknown config fields" in capsys.readouterr().err

    def test_version(self, capsys):
        with pytest.raises(SystemExit):
            run("--version")
        assert "gapboot" in capsys.readouterr().out


class TestCheck:
    def test_all_checks_pass(self, capsys):
        assert run("check") == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert out.count("ok ") >= 6


class TestSimulate:
    def test_tiny_grid(self, tmp_path):
        out = tmp_path / "report.csv"
        jout = tmp_path / "report.json"
        code = run(
            "simulate", "--model", "ma2", "--dist", "normal",
            "--n", "60", "--p", "3", "--methods", "gb1,naive",
            "--runs", "3", "--truth-runs", "100", "--replicates", "16",
            "--seed", "7", "--out", str(out), "--json", str(jout),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "model,dist,n,p,method,true_se,bias,mse,runs"
        assert len(lines) == 3  # header + one row per method
        assert lines[1].startswith("ma2,normal,60,3,gb1,")
        payload = json.loads(jout.read_text())
        assert payload["config"]["runs"] == 3
        assert len(payload["cells"]) == 1
        assert payload["cells"][0]["error"] is None

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "models": ["ma2"], "dists": ["exp"], "sizes": [[60, 3]],
            "methods": ["naive"], "runs": 5, "truth_runs": 100, "replicates": 8,
        }))
        out = tmp_path / "r.csv"
        assert run("simulate", "--config", str(cfg), "--runs", "2", "--out", str(out)) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].endswith(",2")  # the flag wins over the file

    def test_byte_identical_reruns(self, tmp_path):
        argv = (
            "simulate", "--model", "ma2", "--dist", "exp", "--n", "60", "--p", "3",
            "--methods", "naive", "--runs", "2", "--truth-runs", "100",
            "--replicates", "8", "--seed", "3",
        )
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(*argv, "--out", str(a)) == 0
        assert run(*argv, "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()


class TestOd:
    def test_surrogate_run(self, tmp_path):
        out = tmp_path / "split.csv"
        dump = tmp_path / "data.csv"
        code = run(
            "od", "--surrogate", "--days", "30", "--slots", "4",
            "--replicates", "100", "--seed", "2",
            "--out", str(out), "--dump-data", str(dump),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "param,estimate,std_gb1,std_gb2"
        assert len(lines) == 22
        names = [line.split(",")[0] for line in lines[1:]]
        assert names[0] == "p11" and names[-1] == "p66"
        table = np.array([[float(x) for x in line.split(",")[1:]] for line in lines[1:]])
        assert table.shape == (21, 3)
        assert (table[:, 1] > 0).all() and (table[:, 2] > 0).all()
        dataset = read_od_csv(dump)
        assert dataset.days == 30 and dataset.slots == 4

    def test_deterministic_bytes(self, tmp_path):
        argv = (
            "od", "--surrogate", "--days", "30", "--slots", "4",
            "--replicates", "100", "--seed", "11",
        )
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(*argv, "--out", str(a)) == 0
        assert run(*argv, "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_reads_back_dumped_data(self, tmp_path):
        dump = tmp_path / "data.csv"
        first = tmp_path / "a.csv"
        assert run(
            "od", "--surrogate", "--days", "30", "--slots", "4",
            "--replicates", "100", "--seed", "2",
            "--out", str(first), "--dump-data", str(dump),
        ) == 0
        second = tmp_path / "b.csv"
        assert run(
            "od", "--data", str(dump), "--replicates", "100", "--seed", "2",
            "--out", str(second),
        ) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_missing_data_file(self, tmp_path, capsys):
        code = run("od", "--data", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.csv"))
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_bad_block_length(self, tmp_path, capsys):
        code = run(
            "od", "--surrogate", "--days", "30", "--slots", "4",
            "--replicates", "50", "--block-len", "30", "--out", str(tmp_path / "o.csv"),
        )
        assert code == 2
        assert "window length" in capsys.readouterr().err
