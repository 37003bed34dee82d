"""Monte Carlo experiments: BER/SER sweeps, iteration counts, n_max tradeoff
and solver timing, written as CSV.

Randomness comes from independent sub-streams keyed by (seed, trial, purpose)
so every precoder sees the same channels, symbols and noise, and results do
not depend on how trials are split across worker processes.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .channel import Channel
from .errors import ConfigError, NotPositiveDefinite
from .geometry import NONSTRICT, STRICT, beamformer_from_dual, build_kernel
from .iterative import solve_with_budget
from .qp import MAX_ENUM, NotConverged, SimplexQp, solve_active_set_enum, solve_projected_gradient
from .signal_model import (
    MOD_NAMES,
    SUPPORTED_ORDERS,
    complex_normal,
    make_constellation,
    sample_channel,
    sample_symbols,
)
from .zf import rzf_batch, rzf_precode, zf_batch, zf_precode

log = logging.getLogger(__name__)

PRECODERS = ("zf", "rzf", "ci-cf-strict", "ci-cf-nonstrict", "ci-qp-strict", "ci-qp-nonstrict")
CI_MODES = {
    "ci-cf-strict": STRICT,
    "ci-cf-nonstrict": NONSTRICT,
    "ci-qp-strict": STRICT,
    "ci-qp-nonstrict": NONSTRICT,
}
MOD_LABEL = {v: k for k, v in MOD_NAMES.items()}

_STREAMS = {"channel": 0, "symbols": 1, "noise": 2}

CSV_FIELDS = (
    "precoder", "nt", "k", "mod", "snr_db", "n_max", "trials", "symbols", "bits",
    "bit_errors", "ber", "symbol_errors", "ser", "avg_iterations", "fallback_count",
    "avg_solve_micros", "seed",
)


def stream(seed: int, trial: int, purpose: str) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(trial, _STREAMS[purpose]))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SimConfig:
    Nt: int = 8
    K: int = 8
    M: int = 4
    snr_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0)
    trials: int = 500
    symbols_per_trial: int = 200
    precoders: tuple = ("zf", "rzf", "ci-cf-strict", "ci-cf-nonstrict")
    p0: float = 1.0
    seed: int = 0
    n_max: float = math.inf
    threads: int = 1
    # solver behind the ci-qp-* precoders: "pg" (projected gradient) or "enum"
    qp_solver: str = "pg"

    def validate(self) -> "SimConfig":
        if self.K < 1:
            raise ConfigError(f"K must be at least 1, got {self.K}", "--k")
        if self.K > self.Nt:
            raise ConfigError(f"need K <= N_t, got K={self.K} > N_t={self.Nt}", "--k")
        if self.M not in SUPPORTED_ORDERS:
            raise ConfigError(f"modulation order must be one of {SUPPORTED_ORDERS}", "--mod")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1", "--trials")
        if self.symbols_per_trial < 1:
            raise ConfigError("symbols per trial must be at least 1", "--symbols")
        if len(self.snr_db) == 0:
            raise ConfigError("SNR grid is empty", "--snr")
        if any(math.isnan(x) for x in self.snr_db):
            raise ConfigError("SNR grid contains NaN", "--snr")
        if not self.p0 > 0:
            raise ConfigError("p0 must be positive", "--p0")
        if not self.n_max >= 0:
            raise ConfigError("n_max must be non-negative", "--nmax")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1", "--threads")
        unknown = [p for p in self.precoders if p not in PRECODERS]
        if unknown or not self.precoders:
            raise ConfigError(f"unknown precoders {unknown}; choose from {PRECODERS}", "--precoders")
        if self.M == 2 and any(CI_MODES.get(p) == NONSTRICT for p in self.precoders):
            raise ConfigError("non-strict CI precoders need M >= 4", "--precoders")
        if self.qp_solver not in ("pg", "enum"):
            raise ConfigError("qp_solver must be 'pg' or 'enum'", "--qp-solver")
        return self

    @property
    def mod_name(self) -> str:
        return MOD_LABEL[self.M]


@dataclass
class BerRecord:
    precoder: str
    nt: int
    k: int
    mod: str
    snr_db: float | None
    n_max: float
    trials: int
    symbols: int
    bits: int
    bit_errors: int
    ber: float
    symbol_errors: int
    ser: float
    avg_iterations: float
    fallback_count: int
    avg_solve_micros: float | None
    seed: int
    median_solve_micros: float | None = field(default=None, repr=False)


def sigma_of(snr_db: float) -> float:
    """Noise std for transmit SNR ``rho = 1 / sigma^2`` (``p0 = 1`` convention)."""
    return 0.0 if snr_db == math.inf else math.sqrt(10.0 ** (-snr_db / 10.0))


def _qp_solve(kernel, solver):
    qp = SimplexQp.from_kernel(kernel)
    if solver == "enum" and qp.n <= MAX_ENUM:
        return solve_active_set_enum(qp).u
    try:
        return solve_projected_gradient(qp).u
    except NotConverged as exc:
        return exc.result.u


def ci_vectors(ch: Channel, S, const, precoders, p0, n_max, qp_solver="pg"):
    """Precoded vectors for every CI precoder in ``precoders`` over the symbol
    stack ``S`` (n, K). Returns {name: (X, iterations, fallbacks)}."""
    names = [p for p in precoders if p in CI_MODES]
    out = {p: [np.empty((S.shape[0], ch.Nt), dtype=complex), 0, 0] for p in names}
    modes = sorted({CI_MODES[p] for p in names})
    for j, s in enumerate(S):
        for mode in modes:
            kernel = build_kernel(ch, s, p0, mode, const.threshold_angle)
            for p in names:
                if CI_MODES[p] != mode:
                    continue
                slot = out[p]
                if p.startswith("ci-cf"):
                    res = solve_with_budget(kernel, n_max)
                    u = res.u
                    slot[1] += res.iterations
                    slot[2] += res.fallback
                else:
                    u = _qp_solve(kernel, qp_solver)
                bf, _ = beamformer_from_dual(kernel, u, p0)
                slot[0][j] = bf.x
    return {p: tuple(v) for p, v in out.items()}


_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def _count_errors(const, R, true_idx):
    """R: (n, n_snr, K) received; true_idx: (n, K). Returns per-SNR (bit, symbol) errors."""
    idx = const.sector(R)
    wrong = idx != true_idx[:, None, :]
    sym_err = wrong.sum(axis=(0, 2))
    bit_err = _POPCOUNT[const.labels[idx] ^ const.labels[true_idx][:, None, :]].sum(axis=(0, 2))
    return bit_err, sym_err


def _ber_trial(cfg: SimConfig, trial: int):
    const = make_constellation(cfg.M)
    H = sample_channel(cfg.K, cfg.Nt, stream(cfg.seed, trial, "channel"))
    S, bits = sample_symbols(const, cfg.K, stream(cfg.seed, trial, "symbols"), count=cfg.symbols_per_trial)
    noise = complex_normal(stream(cfg.seed, trial, "noise"), (cfg.symbols_per_trial, len(cfg.snr_db), cfg.K))
    try:
        ch = Channel.from_matrix(H)
        ci = ci_vectors(ch, S, const, cfg.precoders, cfg.p0, cfg.n_max, cfg.qp_solver)
    except NotPositiveDefinite as exc:
        log.warning("trial %d skipped: %s", trial, exc)
        return None
    true_idx = const.index_of_bits(bits)
    sig = np.array([sigma_of(x) for x in cfg.snr_db])
    scaled = sig[None, :, None] * noise
    out = {}
    for p in cfg.precoders:
        iters = fb = 0
        if p == "zf":
            R = (zf_batch(ch, S, cfg.p0) @ H.T)[:, None, :] + scaled
        elif p == "rzf":
            R = np.empty_like(scaled)
            for i, snr in enumerate(cfg.snr_db):
                rho = 10.0 ** (snr / 10.0)
                R[:, i, :] = rzf_batch(ch, S, cfg.p0, rho) @ H.T + scaled[:, i, :]
        else:
            X, iters, fb = ci[p]
            R = (X @ H.T)[:, None, :] + scaled
        be, se = _count_errors(const, R, true_idx)
        out[p] = (be, se, iters, fb)
    return out


def _map_trials(fn, cfg, trial_ids):
    if cfg.threads <= 1 or len(trial_ids) < 2:
        return [fn(cfg, t) for t in trial_ids]
    with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(fn, [cfg] * len(trial_ids), trial_ids, chunksize=max(1, len(trial_ids) // (4 * cfg.threads))))


def run_ber_sweep(cfg: SimConfig) -> list[BerRecord]:
    cfg.validate()
    results = _map_trials(_ber_trial, cfg, list(range(cfg.trials)))
    done = [r for r in results if r is not None]
    skipped = len(results) - len(done)
    if skipped:
        log.warning("%d of %d trials skipped (rank-deficient kernel)", skipped, cfg.trials)
    m = int(math.log2(cfg.M))
    nvec = len(done) * cfg.symbols_per_trial
    symbols = nvec * cfg.K
    records = []
    for p in cfg.precoders:
        be = sum((r[p][0] for r in done), np.zeros(len(cfg.snr_db), dtype=np.int64))
        se = sum((r[p][1] for r in done), np.zeros(len(cfg.snr_db), dtype=np.int64))
        iters = sum(r[p][2] for r in done)
        fb = sum(r[p][3] for r in done)
        for i, snr in enumerate(cfg.snr_db):
            records.append(BerRecord(
                precoder=p, nt=cfg.Nt, k=cfg.K, mod=cfg.mod_name, snr_db=snr,
                n_max=cfg.n_max if p.startswith("ci-cf") else math.inf,
                trials=len(done), symbols=symbols, bits=symbols * m,
                bit_errors=int(be[i]), ber=int(be[i]) / (symbols * m) if symbols else math.nan,
                symbol_errors=int(se[i]), ser=int(se[i]) / symbols if symbols else math.nan,
                avg_iterations=iters / nvec if nvec else 0.0,
                fallback_count=int(fb), avg_solve_micros=None, seed=cfg.seed,
            ))
    return records


def _iter_trial(cfg: SimConfig, trial: int):
    const = make_constellation(cfg.M)
    H = sample_channel(cfg.K, cfg.Nt, stream(cfg.seed, trial, "channel"))
    S, _ = sample_symbols(const, cfg.K, stream(cfg.seed, trial, "symbols"), count=cfg.symbols_per_trial)
    try:
        ch = Channel.from_matrix(H)
    except NotPositiveDefinite:
        return None
    out = {}
    for p in cfg.precoders:
        mode = CI_MODES[p]
        iters = fb = 0
        for s in S:
            res = solve_with_budget(build_kernel(ch, s, cfg.p0, mode, const.threshold_angle), cfg.n_max)
            iters += res.iterations
            fb += res.fallback
        out[p] = (iters, fb)
    return out


def run_iteration_stats(cfg: SimConfig, k_values, modes=(STRICT, NONSTRICT)) -> list[BerRecord]:
    """Average iteration counts of the closed-form scheme per (K, mode).

    Zero-iteration symbols (``a >= 0``) are included in the mean.
    """
    precoders = tuple(p for p in ("ci-cf-strict", "ci-cf-nonstrict") if CI_MODES[p] in modes)
    records = []
    for K in k_values:
        sub = replace(cfg, K=K, precoders=precoders).validate()
        done = [r for r in _map_trials(_iter_trial, sub, list(range(sub.trials))) if r is not None]
        nvec = len(done) * sub.symbols_per_trial
        for p in precoders:
            iters = sum(r[p][0] for r in done)
            records.append(BerRecord(
                precoder=p, nt=sub.Nt, k=K, mod=sub.mod_name, snr_db=None, n_max=sub.n_max,
                trials=len(done), symbols=nvec * K, bits=0, bit_errors=0, ber=math.nan,
                symbol_errors=0, ser=math.nan, avg_iterations=iters / nvec if nvec else 0.0,
                fallback_count=sum(r[p][1] for r in done), avg_solve_micros=None, seed=sub.seed,
            ))
    return records


def run_tradeoff(cfg: SimConfig, n_max_grid) -> list[BerRecord]:
    """BER against the iteration budget at a single SNR point, plus a ZF row."""
    if len(cfg.snr_db) != 1:
        raise ConfigError("the tradeoff experiment takes exactly one SNR point", "--snr")
    ci = [p for p in cfg.precoders if p.startswith("ci-cf")] or ["ci-cf-strict"]
    records = [r for r in run_ber_sweep(replace(cfg, precoders=("zf",)))]
    for n_max in n_max_grid:
        records.extend(run_ber_sweep(replace(cfg, precoders=tuple(ci), n_max=n_max)))
    return records


def _solve_timer(p, kernel, n_max):
    if p.startswith("ci-cf"):
        return lambda: solve_with_budget(kernel, n_max)
    qp = SimplexQp.from_kernel(kernel)
    return lambda: solve_projected_gradient(qp)


def run_timing(cfg: SimConfig, k_values, warmup=50, nt=None) -> list[BerRecord]:
    """Wall-clock per-symbol solver time, with N_t = K unless ``nt`` is given.

    Only the solver call is timed; channel preparation and kernel construction
    are shared by the closed-form and QP routes and excluded. For ``zf`` the
    whole precoder is timed.
    """
    const = make_constellation(cfg.M)
    records = []
    for K in k_values:
        sub = replace(cfg, K=K, Nt=K if nt is None else nt).validate()
        times = {p: [] for p in sub.precoders}
        count = 0
        for trial in range(sub.trials):
            H = sample_channel(K, sub.Nt, stream(sub.seed, trial, "channel"))
            S, _ = sample_symbols(const, K, stream(sub.seed, trial, "symbols"), count=sub.symbols_per_trial)
            try:
                ch = Channel.from_matrix(H)
            except NotPositiveDefinite:
                continue
            for s in S:
                kernels = {}
                for p in sub.precoders:
                    if p == "zf":
                        fn = lambda: zf_precode(ch, s, sub.p0)
                    elif p == "rzf":
                        rho = 10.0 ** (sub.snr_db[0] / 10.0)
                        fn = lambda: rzf_precode(ch, s, sub.p0, rho)
                    else:
                        mode = CI_MODES[p]
                        if mode not in kernels:
                            kernels[mode] = build_kernel(ch, s, sub.p0, mode, const.threshold_angle)
                        fn = _solve_timer(p, kernels[mode], sub.n_max)
                    t0 = time.perf_counter()
                    fn()
                    dt = time.perf_counter() - t0
                    if count >= warmup:
                        times[p].append(dt)
                count += 1
        for p, ts in times.items():
            if not ts:
                continue
            arr = np.array(ts) * 1e6
            records.append(BerRecord(
                precoder=p, nt=sub.Nt, k=K, mod=sub.mod_name, snr_db=None, n_max=sub.n_max,
                trials=sub.trials, symbols=len(ts), bits=0, bit_errors=0, ber=math.nan,
                symbol_errors=0, ser=math.nan, avg_iterations=0.0, fallback_count=0,
                avg_solve_micros=float(arr.mean()), seed=sub.seed,
                median_solve_micros=float(np.median(arr)),
            ))
    return records


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        if math.isinf(value):
            return "inf"
        return repr(value)
    return str(value)


def write_csv(records, fh, cfg: SimConfig | None = None, extra=None):
    """Write records with the fixed header. A ``#`` line first records the config."""
    if cfg is not None:
        # worker count never changes results, so it stays out of the file
        manifest = {k: v for k, v in asdict(cfg).items() if k != "threads"}
        if extra:
            manifest.update(extra)
        items = " ".join(f"{k}={_fmt(v) if not isinstance(v, tuple) else ','.join(map(_fmt, v))}"
                         for k, v in manifest.items())
        fh.write(f"# ciprec run: snr is transmit SNR rho = 1/sigma^2 with p0 = 1; {items}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow([_fmt(getattr(r, f)) for f in CSV_FIELDS])


def records_to_csv(records, cfg=None, extra=None) -> str:
    buf = io.StringIO()
    write_csv(records, buf, cfg, extra)
    return buf.getvalue()


def read_csv(path_or_text) -> list[dict]:
    text = path_or_text
    if "\n" not in str(path_or_text):
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
