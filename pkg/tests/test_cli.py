import json

import pytest

from diracfield.cli import build_parser, config_from_args, main


def test_spectrum_to_stdout(capsys):
    code = main(["spectrum", "--gamma", "1.3", "--n-range", "0:1"])
    assert code == 0
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert lines[0] == "sector,branch,E_closed,E_numeric,abs_dev"
    # singlet + triplet + two generic sectors
    assert len(lines) == 1 + 1 + 3 + 8


def test_spectrum_to_file_json(tmp_path):
    out = tmp_path / "spec.json"
    code = main(["spectrum", "--gamma", "2.0", "--n-range", "2",
                 "--format", "json", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["metadata"]["mode"] == "spectrum"
    assert any(r["sector"] == "n=2" for r in data["rows"])


def test_config_file_plus_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma=1.0\nt_steps=3\nt_max=1.0\n")
    code = main(["evolve", "--config", str(cfg), "--gamma", "3.1"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("t,purity,entropy\n")
    assert len(out.strip().split("\n")) == 4


def test_cli_errors_exit_nonzero(capsys):
    assert main(["spectrum", "--config", "/does/not/exist.cfg"]) == 1
    assert "error:" in capsys.readouterr().err
    assert main(["spectrum", "--dimension", "3", "--n-range", "0:1"]) == 1


def test_cli_override_collection():
    parser = build_parser()
    args = parser.parse_args(["sweep", "--gamma-steps", "4", "--workers", "2",
                              "--convention", "1.5"])
    cfg = config_from_args(args)
    assert cfg.mode == "sweep"
    assert cfg.gamma_steps == 4
    assert cfg.workers == 2
    assert cfg.scale == 1.5
    # untouched fields keep defaults
    assert cfg.m == 3.2


def test_verify_subcommand_exit_code(capsys):
    code = main(["verify", "--gamma", "1.3", "--seed", "5"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("check,status,measured,bound\n")
    assert ",fail," not in out


def test_byte_identical_runs(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["sweep", "--gamma-steps", "3", "--t-steps", "5"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2), "--workers", "3"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
