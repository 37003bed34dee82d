import math
from dataclasses import replace

import numpy as np
import pytest

from ciprec.errors import ConfigError
from ciprec.harness import (
    CSV_FIELDS,
    SimConfig,
    read_csv,
    records_to_csv,
    run_ber_sweep,
    run_iteration_stats,
    run_timing,
    run_tradeoff,
    sigma_of,
    stream,
)

SMALL = SimConfig(Nt=4, K=4, M=4, snr_db=(0.0, 10.0, 20.0), trials=6, symbols_per_trial=25, seed=3)


def test_sigma_convention():
    assert sigma_of(0.0) == 1.0
    assert sigma_of(20.0) == pytest.approx(0.1)
    assert sigma_of(math.inf) == 0.0


def test_streams_independent_and_reproducible():
    a = stream(1, 0, "noise").standard_normal(4)
    np.testing.assert_array_equal(a, stream(1, 0, "noise").standard_normal(4))
    assert not np.array_equal(a, stream(1, 0, "symbols").standard_normal(4))
    assert not np.array_equal(a, stream(1, 1, "noise").standard_normal(4))


@pytest.mark.parametrize(
    "change,flag",
    [
        (dict(K=9, Nt=8), "--k"),
        (dict(M=32), "--mod"),
        (dict(trials=0), "--trials"),
        (dict(symbols_per_trial=0), "--symbols"),
        (dict(snr_db=()), "--snr"),
        (dict(p0=0.0), "--p0"),
        (dict(n_max=-1), "--nmax"),
        (dict(threads=0), "--threads"),
        (dict(precoders=("mmse",)), "--precoders"),
        (dict(M=2, precoders=("ci-cf-nonstrict",)), "--precoders"),
    ],
)
def test_validation_names_flag(change, flag):
    with pytest.raises(ConfigError) as info:
        replace(SMALL, **change).validate()
    assert info.value.flag == flag


def test_record_accounting():
    recs = run_ber_sweep(SMALL)
    assert len(recs) == len(SMALL.precoders) * len(SMALL.snr_db)
    for r in recs:
        assert r.symbols == SMALL.trials * SMALL.symbols_per_trial * SMALL.K
        assert r.bits == 2 * r.symbols
        assert r.ber == r.bit_errors / r.bits and 0 <= r.ber <= 1
        assert r.ser >= r.ber and r.avg_iterations >= 0
    zf = [r.ber for r in recs if r.precoder == "zf"]
    assert zf == sorted(zf, reverse=True)


def test_noiseless_point_is_error_free():
    cfg = replace(SMALL, snr_db=(math.inf,), precoders=("zf", "ci-cf-strict", "ci-cf-nonstrict", "ci-qp-strict"))
    for r in run_ber_sweep(cfg):
        assert r.bit_errors == 0 and r.symbol_errors == 0


@pytest.mark.parametrize("solver", ("enum", "pg"))
def test_closed_form_and_qp_columns_identical(solver):
    cfg = replace(SMALL, precoders=("ci-cf-strict", "ci-qp-strict", "ci-cf-nonstrict", "ci-qp-nonstrict"),
                  qp_solver=solver)
    recs = {(r.precoder, r.snr_db): r for r in run_ber_sweep(cfg)}
    for snr in cfg.snr_db:
        for mode in ("strict", "nonstrict"):
            assert recs[(f"ci-cf-{mode}", snr)].bit_errors == recs[(f"ci-qp-{mode}", snr)].bit_errors


def test_deterministic_and_thread_invariant():
    a = records_to_csv(run_ber_sweep(SMALL), SMALL)
    b = records_to_csv(run_ber_sweep(replace(SMALL, threads=2)), replace(SMALL, threads=2))
    assert a == b


def test_fair_streams_across_precoder_subsets():
    full = {(r.precoder, r.snr_db): r.bit_errors for r in run_ber_sweep(SMALL)}
    only = {(r.precoder, r.snr_db): r.bit_errors for r in run_ber_sweep(replace(SMALL, precoders=("rzf",)))}
    for key, v in only.items():
        assert full[key] == v


def test_iteration_stats_single_user_zero():
    recs = run_iteration_stats(replace(SMALL, Nt=4, trials=3), [1, 4])
    by = {(r.k, r.precoder): r.avg_iterations for r in recs}
    assert by[(1, "ci-cf-strict")] == 0.0 and by[(1, "ci-cf-nonstrict")] == 0.0
    assert by[(4, "ci-cf-nonstrict")] > 0


def test_tradeoff_anchor():
    cfg = replace(SMALL, snr_db=(10.0,), precoders=("ci-cf-nonstrict",))
    recs = run_tradeoff(cfg, [0, 2, math.inf])
    zf = recs[0]
    assert zf.precoder == "zf"
    zero = next(r for r in recs if r.n_max == 0)
    assert (zero.bit_errors, zero.symbol_errors) == (zf.bit_errors, zf.symbol_errors)
    with pytest.raises(ConfigError):
        run_tradeoff(SMALL, [0])


def test_timing_records():
    cfg = replace(SMALL, trials=2, symbols_per_trial=20, precoders=("zf", "rzf", "ci-cf-strict", "ci-qp-strict"))
    recs = run_timing(cfg, [2, 3], warmup=5)
    assert {(r.precoder, r.k) for r in recs} == {(p, k) for p in cfg.precoders for k in (2, 3)}
    for r in recs:
        assert r.nt == r.k and r.symbols == 35 and r.avg_solve_micros > 0 and r.median_solve_micros > 0


def test_csv_format_roundtrip(tmp_path):
    recs = run_ber_sweep(replace(SMALL, trials=2))
    text = records_to_csv(recs, SMALL)
    first, header = text.splitlines()[:2]
    assert first.startswith("# ") and "1/sigma^2" in first and "threads" not in first
    assert header == ",".join(CSV_FIELDS)
    rows = read_csv(text)
    assert len(rows) == len(recs) and rows[0]["n_max"] == "inf" and rows[0]["avg_solve_micros"] == ""
    path = tmp_path / "r.csv"
    path.write_text(text, encoding="utf-8")
    assert read_csv(str(path)) == rows


def test_skipped_trials_are_counted(monkeypatch):
    import ciprec.harness as h
    from ciprec.errors import NotPositiveDefinite

    real = h.Channel.from_matrix
    calls = {"n": 0}

    def flaky(H):
        calls["n"] += 1
        if calls["n"] == 1:
            raise NotPositiveDefinite("forced")
        return real(H)

    monkeypatch.setattr(h.Channel, "from_matrix", staticmethod(flaky))
    recs = run_ber_sweep(replace(SMALL, trials=3))
    assert recs[0].trials == 2 and recs[0].symbols == 2 * 25 * 4
