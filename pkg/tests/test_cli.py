"""Command-line surface: artifacts, exit codes, determinism."""

import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

import delone_lab.verify as verify_mod
from delone_lab.cli import main
from delone_lab.core import FloatPointSet, Region
from delone_lab.errors import ResourceLimit
from delone_lab.verify import CheckResult


def run_cli(argv):
    try:
        return main(list(argv))
    except SystemExit as exc:
        return exc.code


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    config = json.loads(lines[0][2:])
    rows = list(csv.reader(io.StringIO("\n".join(lines[1:]))))
    return config, rows[0], rows[1:]


class TestGenerate:
    def test_square_lattice_121_points(self, capsys):
        assert run_cli(["generate", "--set", "zn", "--n", "2", "--window", "5"]) == 0
        config, header, rows = parse_csv(capsys.readouterr().out)
        assert config["count"] == 121 and len(rows) == 121
        assert config["tool"] == "delone-lab" and config["command"] == "generate"
        assert config["set"] == "zn" and config["params"] == {"n": 2, "deletions": []}
        assert header == ["x0", "x1", "a0", "a1", "tag"]
        assert all(r[-1] == "exact" for r in rows)

    def test_json_artifact_reloads(self, tmp_path, capsys):
        art = tmp_path / "fib.json"
        code = run_cli(
            ["generate", "--set", "fibonacci", "--window", "20", "--format", "json", "--out", str(art)]
        )
        assert code == 0
        obj = json.loads(art.read_text())
        assert set(obj) >= {"config", "columns", "rows", "point_set"}
        assert len(obj["rows"]) == obj["config"]["count"]

        assert run_cli(["import-float", str(art)]) == 0
        echo = capsys.readouterr().out
        assert "mode approximate" in echo
        assert "imported %d points" % obj["config"]["count"] in echo

    def test_subprocess_byte_determinism(self):
        cmd = [sys.executable, "-m", "delone_lab.cli", "generate", "--set", "fibonacci", "--window", "30"]
        a = subprocess.run(cmd, capture_output=True, check=True)
        b = subprocess.run(cmd, capture_output=True, check=True)
        assert a.stdout == b.stdout and a.stdout

    def test_threads_echoed_in_config(self, capsys, monkeypatch):
        monkeypatch.setenv("DELONE_LAB_THREADS", "2")
        assert run_cli(["generate", "--set", "zn", "--window", "3"]) == 0
        config, _, _ = parse_csv(capsys.readouterr().out)
        assert config["threads"] == "2"


class TestAnalysisCommands:
    def test_atlas_rows_and_default_T(self, capsys):
        assert run_cli(["atlas", "--set", "zn", "--window", "30"]) == 0
        config, header, rows = parse_csv(capsys.readouterr().out)
        assert config["T"] == [2.000001, 4.000001, 8.000001]
        assert header[:2] == ["T", "classes"]
        assert [r[1] for r in rows] == ["1", "1", "1"]
        assert all(r[-1] == "exact" for r in rows)

    def test_repetitivity_bracket_rows(self, capsys):
        code = run_cli(
            ["repetitivity", "--set", "fibonacci", "--window", "40", "--T", "1.5"]
        )
        assert code == 0
        config, header, rows = parse_csv(capsys.readouterr().out)
        assert header == [
            "T", "classes", "M_lower", "M_upper",
            "M_shift_lower", "M_shift_upper", "certified_floor", "tag",
        ]
        (row,) = rows
        assert row[-1] == "certified-bracket"
        assert float(row[4]) == pytest.approx(float(row[2]) + 1.5)

    def test_frequencies_with_key(self, capsys):
        code = run_cli(
            [
                "frequencies", "--set", "zn", "--window", "30",
                "--T", "2.000001", "--key", "[[0],[1],[-1],[2],[-2]]",
            ]
        )
        assert code == 0
        config, header, rows = parse_csv(capsys.readouterr().out)
        assert rows and all(r[-1] == "exact" for r in rows)

    def test_wdist_sampled_rows(self, capsys):
        code = run_cli(
            ["wdist", "--set", "zn", "--window", "300", "--U", "4.000001,8.000001"]
        )
        assert code == 0
        config, header, rows = parse_csv(capsys.readouterr().out)
        assert len(rows) == 2
        assert all(r[-1] == "sampled" for r in rows)

    def test_diffraction_grid_and_peaks(self, capsys):
        args = ["diffraction", "--set", "zn", "--window", "40", "--kmax", "1", "--kcount", "11"]
        assert run_cli(args) == 0
        _, _, rows = parse_csv(capsys.readouterr().out)
        assert len(rows) == 11

        assert run_cli(args + ["--peaks"]) == 0
        _, header, rows = parse_csv(capsys.readouterr().out)
        assert "intensity" in header
        assert [float(r[0]) for r in rows] == [0.0, 1.0]

    def test_address_report(self, capsys):
        assert run_cli(["address", "--set", "fibonacci", "--window", "60"]) == 0
        _, _, rows = parse_csv(capsys.readouterr().out)
        fields = {r[0]: r[1] for r in rows}
        assert fields["rank"] == "2"
        assert float(fields["lipschitz"]) == pytest.approx(1.0)


class TestVerifyCommand:
    def test_words_suite_passes(self, capsys):
        assert run_cli(["verify", "words"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert all(line.startswith("[PASS]") for line in out[:-1])
        assert out[-1].endswith("0 failed")

    def test_in_process_determinism(self, capsys):
        run_cli(["verify", "words", "--seed", "0"])
        first = capsys.readouterr().out
        run_cli(["verify", "words", "--seed", "0"])
        assert capsys.readouterr().out == first

    def test_failure_exits_4(self, capsys, monkeypatch):
        monkeypatch.setattr(
            verify_mod,
            "run_suite",
            lambda suite, seed=0: [CheckResult("stub", "broken", False, "boom")],
        )
        assert run_cli(["verify", "lattice"]) == 4
        err = capsys.readouterr().err
        assert "verification failed" in err

    def test_budget_exits_2(self, monkeypatch, capsys):
        def blow_up(suite, seed=0):
            raise ResourceLimit("synthetic budget stop")

        monkeypatch.setattr(verify_mod, "run_suite", blow_up)
        assert run_cli(["verify", "lattice"]) == 2
        assert "budget exhausted" in capsys.readouterr().err

    def test_artifact_out(self, tmp_path, capsys):
        art = tmp_path / "words.csv"
        assert run_cli(["verify", "words", "--out", str(art)]) == 0
        capsys.readouterr()
        config, header, rows = parse_csv(art.read_text())
        assert config["suite"] == "words"
        assert header == ["suite", "check", "passed", "detail", "tag"]
        assert all(r[2] == "1" for r in rows)


class TestExitCodes:
    def test_bad_params_json_is_1(self, capsys):
        assert run_cli(["generate", "--set", "zn", "--params", "{bad"]) == 1
        err = capsys.readouterr().err
        assert "bad configuration" in err and "line 1" in err

    def test_unknown_set_is_1(self, capsys):
        assert run_cli(["generate", "--set", "nope"]) == 1

    def test_unknown_suite_is_1(self, capsys):
        assert run_cli(["verify", "bogus"]) == 1

    def test_unknown_option_is_1(self, capsys):
        assert run_cli(["atlas", "--set", "zn", "--nonsense", "1"]) == 1

    def test_missing_input_file_is_3(self, capsys):
        assert run_cli(["import-float", "/no/such/file.json"]) == 3
        assert "file I/O error" in capsys.readouterr().err

    def test_unwritable_out_is_3(self, capsys):
        code = run_cli(
            ["generate", "--set", "zn", "--window", "3", "--out", "/no-such-dir/x.csv"]
        )
        assert code == 3

    def test_dimension_header_mismatch_is_1(self, tmp_path, capsys):
        fps = FloatPointSet(
            np.array([[0.0], [1.0]]), tolerance=0.25, region=Region.box([(-1, 2)])
        )
        obj = fps.to_json()
        obj["dimension"] = 2
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(obj))
        assert run_cli(["import-float", str(path)]) == 1
        assert "dimension" in capsys.readouterr().err

    def test_garbage_json_file_is_1(self, tmp_path, capsys):
        path = tmp_path / "garbage.json"
        path.write_text("not json at all {{{")
        assert run_cli(["import-float", str(path)]) == 1
        assert "invalid JSON" in capsys.readouterr().err
