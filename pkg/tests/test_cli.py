import math

import pytest

from ciprec.cli import parse_and_run, parse_nmax, parse_nmax_grid, parse_snr
from ciprec.errors import ConfigError
from ciprec.harness import read_csv


def test_snr_grid_syntax():
    assert parse_snr("0:5:35") == tuple(float(x) for x in range(0, 36, 5))
    assert parse_snr("30") == (30.0,)
    assert parse_snr("1,2.5") == (1.0, 2.5)
    for bad in ("0:5", "5:0:1", "a:b:c", "10:5:0"):
        with pytest.raises(ConfigError):
            parse_snr(bad)


def test_nmax_syntax():
    assert parse_nmax("inf") == math.inf and parse_nmax("3") == 3
    assert parse_nmax_grid("0:2:6") == (0, 2, 4, 6)
    assert parse_nmax_grid("0,5,inf") == (0, 5, math.inf)
    for bad in ("-1", "x"):
        with pytest.raises(ConfigError):
            parse_nmax(bad)


def test_sweep_row_count(tmp_path):
    out = tmp_path / "r.csv"
    rc = parse_and_run(["sweep", "--nt", "8", "--k", "8", "--mod", "qpsk", "--snr", "0:5:35",
                        "--precoders", "zf,rzf,ci-cf-strict,ci-cf-nonstrict", "--seed", "42",
                        "--trials", "2", "--symbols", "5", "--threads", "1", "--out", str(out)])
    assert rc == 0
    rows = read_csv(str(out))
    assert len(rows) == 8 * 4
    assert {r["precoder"] for r in rows} == {"zf", "rzf", "ci-cf-strict", "ci-cf-nonstrict"}


def test_bad_k_exits_two(capsys):
    assert parse_and_run(["sweep", "--k", "9", "--nt", "8"]) == 2
    err = capsys.readouterr().err
    assert "--k" in err and "K <= N_t" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--mod", "qam"],
        ["sweep", "--snr", "nonsense"],
        ["sweep", "--precoders", "zf,mmse"],
        ["sweep", "--trials", "0"],
        ["sweep", "--mod", "bpsk", "--precoders", "ci-cf-nonstrict"],
        ["iters", "--k", "4,x"],
        ["iters", "--k", "4,20", "--nt", "16"],
        ["tradeoff", "--snr", "0:5:10"],
        ["tradeoff", "--nmax", "0,-2"],
        ["frobnicate"],
        [],
    ],
)
def test_config_errors_exit_two(argv, capsys):
    assert parse_and_run(argv) == 2
    assert "configuration error" in capsys.readouterr().err


def test_runtime_error_exits_one(tmp_path, capsys):
    rc = parse_and_run(["sweep", "--nt", "2", "--k", "2", "--trials", "1", "--symbols", "1",
                        "--threads", "1", "--out", str(tmp_path / "missing" / "r.csv")])
    assert rc == 1
    assert "run failed" in capsys.readouterr().err


def test_help_lists_flags(capsys):
    assert parse_and_run(["sweep", "--help"]) == 0
    out = capsys.readouterr().out
    for flag in ("--nt", "--k", "--mod", "--snr", "--trials", "--symbols", "--precoders",
                 "--p0", "--seed", "--nmax", "--threads", "--out"):
        assert flag in out
    assert "dB" in out and "watts" in out


def test_inspect_output(capsys):
    assert parse_and_run(["inspect", "--nt", "4", "--k", "4", "--mod", "qpsk", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    for key in ("a = ", "c = ", "S = ", "it ", "u = ", "Lambda = ", "t_star = ", "oracle"):
        assert key in out
    assert "== strict" in out and "== non-strict" in out


def test_inspect_bpsk_strict_only(capsys):
    assert parse_and_run(["inspect", "--nt", "3", "--k", "2", "--mod", "bpsk"]) == 0
    assert "non-strict" not in capsys.readouterr().out


def _run_twice(tmp_path, argv, threads=("1", "1")):
    texts = []
    for i, th in enumerate(threads):
        out = tmp_path / f"o{i}.csv"
        assert parse_and_run(argv + ["--threads", th, "--out", str(out)]) == 0
        texts.append(out.read_bytes())
    return texts


def test_same_argv_same_bytes(tmp_path):
    a, b = _run_twice(tmp_path, ["sweep", "--nt", "4", "--k", "3", "--trials", "3", "--symbols", "10",
                                 "--snr", "0:10:20", "--seed", "5"], threads=("1", "2"))
    assert a == b


def test_iters_and_tradeoff_commands(tmp_path):
    out = tmp_path / "i.csv"
    assert parse_and_run(["iters", "--nt", "6", "--k", "1,3,6", "--trials", "2", "--symbols", "10",
                          "--threads", "1", "--out", str(out)]) == 0
    rows = read_csv(str(out))
    assert len(rows) == 6 and rows[0]["avg_iterations"] == "0.0"
    out = tmp_path / "t.csv"
    assert parse_and_run(["tradeoff", "--trials", "2", "--symbols", "10", "--nmax", "0,1,inf",
                          "--threads", "1", "--out", str(out)]) == 0
    rows = read_csv(str(out))
    assert [r["precoder"] for r in rows] == ["zf"] + ["ci-cf-strict"] * 3
    assert rows[0]["bit_errors"] == rows[1]["bit_errors"]


def test_timing_command(tmp_path):
    out = tmp_path / "t.csv"
    assert parse_and_run(["timing", "--k", "2", "--trials", "1", "--symbols", "20", "--warmup", "2",
                          "--threads", "1", "--out", str(out)]) == 0
    rows = read_csv(str(out))
    assert all(float(r["avg_solve_micros"]) > 0 for r in rows)
