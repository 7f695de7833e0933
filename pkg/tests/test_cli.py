import csv
import json

import pytest

from fucikwave import cli, io
from fucikwave.exceptions import NoConvergence

SMALL = ["--m-max", "4", "--n-max", "3"]


def test_spectrum_list(capsys, tmp_path):
    out_path = tmp_path / "spec.json"
    assert cli.run(["spectrum-list", "8", "8", "--out", str(out_path)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "value,multiplicity,modes"
    positives = [int(x.split(",")[0]) for x in lines[1:] if int(x.split(",")[0]) > 0]
    assert positives[:7] == [1, 3, 4, 5, 7, 8, 9]
    art = io.read_json(out_path)
    assert art["command"] == "spectrum-list" and art["config"]["m_bound"] == 8


def _trace(tmp_path, name):
    prefix = tmp_path / name
    code = cli.run(["curve-trace", "--k", "1", "--side", "lower", *SMALL, "--r-max", "10",
                    "--n-r", "6", "--n-starts", "4", "--out", str(prefix)])
    return code, prefix


def test_curve_trace_outputs(tmp_path, capsys):
    code, prefix = _trace(tmp_path, "c1")
    assert code == 0
    with open(prefix.with_suffix(".csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["r", "a_hat", "a", "b", "residual", "flag"]
    one = [r for r in rows if float(r["r"]) == 1.0]
    assert one and abs(float(one[0]["a"]) - 1) <= 1e-6 and abs(float(one[0]["b"]) - 1) <= 1e-6
    art = io.read_json(prefix.with_suffix(".json"))
    assert art["version"] and art["seed"] == 0 and art["config"]["m_max"] == 4
    assert "r=1 point" in capsys.readouterr().out


def test_curve_trace_is_byte_identical(tmp_path):
    # the output prefix is part of the recorded config, so reuse it
    _, prefix = _trace(tmp_path, "run")
    first = [prefix.with_suffix(x).read_bytes() for x in (".json", ".csv")]
    _trace(tmp_path, "run")
    assert first == [prefix.with_suffix(x).read_bytes() for x in (".json", ".csv")]


def test_curve_check_direct(capsys):
    assert cli.run(["curve-check", "--a", "0.5", "--b", "0.5", "--k", "1", *SMALL]) == 0
    assert capsys.readouterr().out.strip() == "BELOW_C"


def test_curve_check_from_files(tmp_path, capsys):
    _, lower = _trace(tmp_path, "lower")
    upper = tmp_path / "upper"
    assert cli.run(["curve-trace", "--k", "1", "--side", "upper", *SMALL, "--r-max", "10",
                    "--n-r", "6", "--n-starts", "4", "--out", str(upper)]) == 0
    capsys.readouterr()
    code = cli.run(["curve-check", "--a", "2.5", "--b", "2.5", "--curves-in",
                    str(lower.with_suffix(".json")), str(upper.with_suffix(".json"))])
    assert code == 0 and capsys.readouterr().out.strip() == "ABOVE_D"


def test_validate_1d(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert cli.run(["validate-1d", "--family", "dirichlet", "--index", "3", "--n-samples", "6",
                    "--out", str(out)]) == 0
    art = io.read_json(out)
    assert art["result"]["ok"] and len(art["result"]["points"]) == 6


def test_solve_outputs(tmp_path, capsys):
    prefix = tmp_path / "sol"
    code = cli.run(["solve", "--a", "0.5", "--b", "0.5", "--k", "1", "--p", "forcing:1,0",
                    "--m-max", "6", "--n-max", "5", "--out", str(prefix)])
    assert code == 0
    art = io.read_json(prefix.with_suffix(".json"))
    assert art["command"] == "solve" and art["result"]["converged"]
    assert art["config"]["p"] == "forcing:1,0"
    with open(tmp_path / "sol_u0.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["s", "t", "u"] and len(rows) == 1 + 12 * 20


@pytest.mark.parametrize("argv, code", [
    (["solve", "--a", "0.5", "--b", "0.5", "--p", "expr:u*"], 4),
    (["solve", "--a", "1.5", "--b", "1.5", *SMALL], 2),
    (["solve", "--a", "0.5", "--b", "0.5", "--k", "0"], 2),
    (["solve", "--a", "0.5", "--b", "0.5", "--eps-a", "1.5"], 2),
    (["solve", "--a", "0.5"], 2),
    (["solve", "--a", "0.5", "--b", "0.5", "--p", "cubic"], 2),
    (["curve-check", "--a", "0.5", "--b", "0.5", "--curves-in", "/nonexistent.json"], 2),
])
def test_exit_codes(argv, code, capsys):
    assert cli.run(argv) == code
    assert "error:" in capsys.readouterr().err


def test_parse_error_reports_offset(capsys):
    cli.run(["solve", "--a", "0.5", "--b", "0.5", "--p", "expr:u*"])
    assert "offset 2" in capsys.readouterr().err


def test_no_convergence_exit_code(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise NoConvergence("stalled")
    monkeypatch.setattr(cli, "solve", boom)
    assert cli.run(["solve", "--a", "0.5", "--b", "0.5"]) == 3


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"a": 0.5, "b": 0.5, "m-max": 4, "n_max": 3, "eps-a": 1.5}))
    assert cli.run(["solve", "--config", str(cfg), "--out", str(tmp_path / "s")]) == 2
    assert cli.run(["solve", "--config", str(cfg), "--eps-a", "0.1",
                    "--out", str(tmp_path / "s")]) == 0
    art = io.read_json(tmp_path / "s.json")
    assert art["config"]["eps_a"] == 0.1 and art["config"]["m_max"] == 4


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    assert cli.run(["spectrum-list", "--config", str(cfg)]) == 2


def test_oracle_shooting(capsys):
    assert cli.run(["oracle", "--suite", "shooting"]) == 0


@pytest.mark.slow
def test_oracle_conjugate(capsys):
    assert cli.run(["oracle", "--suite", "conjugate", "--seed", "1"]) == 0


@pytest.mark.slow
def test_oracle_maximizer(capsys):
    assert cli.run(["oracle", "--suite", "maximizer", "--dim", "8"]) == 0


def test_oracle_rejects_unreachable_dimension(capsys):
    assert cli.run(["oracle", "--suite", "maximizer", "--dim", "0"]) == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        cli.run(["--version"])
    assert info.value.code == 0
    assert "fucik" in capsys.readouterr().out
