"""Command-line entry point: ``ciprec {sweep,iters,tradeoff,timing,inspect}``.

Exit codes: 0 on success, 2 when flags do not form a valid configuration
(the message names the flag), 1 when a run fails.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

from .errors import CiError, ConfigError
from .geometry import NONSTRICT, STRICT, beamformer_from_dual, build_kernel
from .harness import (
    PRECODERS,
    SimConfig,
    run_ber_sweep,
    run_iteration_stats,
    run_timing,
    run_tradeoff,
    stream,
    write_csv,
)
from .iterative import classify, solve_with_budget
from .qp import MAX_ENUM, SimplexQp, solve_active_set_enum, solve_projected_gradient
from .signal_model import MOD_NAMES, make_constellation, sample_channel, sample_symbols
from .zf import zf_precode

SUBCOMMANDS = ("sweep", "iters", "tradeoff", "timing", "inspect")


class _Parser(argparse.ArgumentParser):
    """Turns argparse usage errors into ConfigError so they map to exit code 2."""

    def error(self, message):
        raise ConfigError(message, None)


def parse_snr(text: str) -> tuple:
    """``start:step:stop`` (inclusive), a comma list, or a single value, in dB."""
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, step, stop = parts
            if step <= 0 or stop < start:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(start + i * step for i in range(n))
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"bad SNR grid {text!r}; use start:step:stop in dB", "--snr") from None


def parse_nmax(text: str):
    """A single budget: non-negative int or ``inf``."""
    if text.strip().lower() in ("inf", "unlimited", "none"):
        return math.inf
    try:
        n = int(text)
    except ValueError:
        raise ConfigError(f"bad iteration budget {text!r}", "--nmax") from None
    if n < 0:
        raise ConfigError("iteration budget must be non-negative", "--nmax")
    return n


def parse_nmax_grid(text: str) -> tuple:
    """Comma list of budgets, or ``a:b:c`` for an inclusive integer range."""
    if ":" in text:
        try:
            a, b, c = (int(x) for x in text.split(":"))
        except ValueError:
            raise ConfigError(f"bad iteration grid {text!r}", "--nmax") from None
        if b <= 0 or c < a:
            raise ConfigError(f"bad iteration grid {text!r}", "--nmax")
        return tuple(range(a, c + 1, b))
    return tuple(parse_nmax(x) for x in text.split(","))


def _int_list(text: str, flag: str) -> tuple:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"expected a comma list of integers, got {text!r}", flag) from None
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ciprec", description="Constructive-interference precoding experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "sweep": "BER/SER against transmit SNR for each precoder",
        "iters": "average iteration count of the closed-form scheme against K",
        "tradeoff": "BER against the iteration budget at one SNR point",
        "timing": "per-symbol solver wall-clock time against K",
        "inspect": "print kernel, trace and dual diagnostics for one (H, s)",
    }
    defaults = SimConfig()
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, help=helps[name], description=helps[name])
        sp.add_argument("--nt", type=int, default=None,
                        help=f"transmit antennas N_t (count; default {defaults.Nt}; iters 16, tradeoff 4, timing K)")
        if name in ("iters", "timing"):
            sp.add_argument("--k", default=None,
                            help="users K, comma list (count; default iters 4,8,12, timing 2,4,8)")
        else:
            sp.add_argument("--k", type=int, default=None, help=f"users K (count; default {defaults.K}; tradeoff 4)")
        sp.add_argument("--mod", choices=sorted(MOD_NAMES), default="qpsk",
                        help="PSK modulation (default qpsk)")
        sp.add_argument("--seed", type=int, default=defaults.seed, help=f"master seed (default {defaults.seed})")
        sp.add_argument("--p0", type=float, default=defaults.p0,
                        help=f"transmit power budget (watts; default {defaults.p0})")
        if name == "inspect":
            sp.add_argument("--nmax", default="inf", help="iteration budget (count or inf; default inf)")
            sp.add_argument("--mode", choices=("strict", "non-strict", "both"), default="both",
                            help="CI rotation to inspect (default both)")
            continue
        sp.add_argument("--snr", default=None,
                        help="transmit SNR grid start:step:stop (dB; default 0:5:35, tradeoff 30)")
        sp.add_argument("--trials", type=int, default=None,
                        help=f"channel realizations (count; default {defaults.trials}; iters 100, timing 50)")
        sp.add_argument("--symbols", type=int, default=None,
                        help=f"symbol vectors per channel (count; default {defaults.symbols_per_trial}; iters/timing 100)")
        sp.add_argument("--precoders", default=None,
                        help=f"comma list from {','.join(PRECODERS)} (default depends on the command)")
        nmax_help = ("iteration budgets, comma list or a:b:c (counts; default 0:1:10)" if name == "tradeoff"
                     else "iteration budget of the closed-form scheme (count or inf; default inf)")
        sp.add_argument("--nmax", default=None, help=nmax_help)
        sp.add_argument("--threads", type=int, default=None,
                        help="worker processes (count; default machine parallelism)")
        sp.add_argument("--qp-solver", choices=("pg", "enum"), default="pg",
                        help="solver behind ci-qp-* precoders (default pg)")
        sp.add_argument("--out", default=None, help="CSV output path (default stdout)")
        if name == "timing":
            sp.add_argument("--warmup", type=int, default=50, help="untimed leading symbols (count; default 50)")
    return p


def _precoders(text, command):
    if text is None:
        if command == "iters":
            return ("ci-cf-strict", "ci-cf-nonstrict")
        if command == "timing":
            return ("zf", "ci-cf-strict", "ci-qp-strict", "ci-cf-nonstrict", "ci-qp-nonstrict")
        if command == "tradeoff":
            return ("ci-cf-strict",)
        return SimConfig().precoders
    names = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [x for x in names if x not in PRECODERS]
    if bad or not names:
        raise ConfigError(f"unknown precoders {bad}; choose from {','.join(PRECODERS)}", "--precoders")
    return names


def config_from_args(args) -> tuple:
    """Translate parsed flags into a validated ``SimConfig`` plus per-command extras."""
    cmd = args.command
    extra = {}
    k_default = {"iters": "4,8,12", "timing": "2,4,8"}
    if cmd in k_default:
        ks = _int_list(args.k or k_default[cmd], "--k")
        extra["k_values"] = ks
        K = max(ks)
    else:
        K = SimConfig.K if args.k is None else args.k
    if cmd == "iters":
        Nt = 16 if args.nt is None else args.nt
    elif cmd == "timing":
        Nt = max(K, args.nt or 0)
        extra["nt"] = args.nt
    elif cmd == "tradeoff":
        Nt = 4 if args.nt is None else args.nt
        K = 4 if args.k is None else args.k
    else:
        Nt = SimConfig.Nt if args.nt is None else args.nt
    if cmd == "inspect":
        cfg = SimConfig(Nt=Nt, K=K, M=MOD_NAMES[args.mod], seed=args.seed, p0=args.p0,
                        n_max=parse_nmax(args.nmax), trials=1, symbols_per_trial=1,
                        precoders=("ci-cf-strict",))
        return cfg.validate(), extra
    snr = args.snr or ("30" if cmd == "tradeoff" else "0:5:35")
    if cmd == "tradeoff":
        extra["n_max_grid"] = parse_nmax_grid(args.nmax or "0:1:10")
        n_max = math.inf
    else:
        n_max = parse_nmax(args.nmax) if args.nmax is not None else math.inf
    trials = args.trials if args.trials is not None else (
        {"iters": 100, "timing": 50, "tradeoff": 500}.get(cmd, SimConfig.trials))
    cfg = SimConfig(
        Nt=Nt, K=K, M=MOD_NAMES[args.mod], snr_db=parse_snr(snr), trials=trials,
        symbols_per_trial=args.symbols if args.symbols is not None else (
            100 if cmd in ("iters", "timing") else SimConfig.symbols_per_trial),
        precoders=_precoders(args.precoders, cmd), p0=args.p0, seed=args.seed, n_max=n_max,
        threads=args.threads if args.threads is not None else (os.cpu_count() or 1),
        qp_solver=args.qp_solver,
    )
    if cmd in k_default:
        for k in extra["k_values"]:
            replace(cfg, K=k, Nt=Nt if cmd == "iters" else max(k, args.nt or k)).validate()
    return cfg.validate(), extra


def _fmt_vec(v):
    return np.array2string(np.asarray(v), precision=6, suppress_small=True, max_line_width=100)


def inspect(cfg: SimConfig, out=None, mode="both"):
    """Print diagnostics for the first channel and symbol vector of ``cfg.seed``."""
    out = sys.stdout if out is None else out
    const = make_constellation(cfg.M)
    H = sample_channel(cfg.K, cfg.Nt, stream(cfg.seed, 0, "channel"))
    s, _ = sample_symbols(const, cfg.K, stream(cfg.seed, 0, "symbols"))
    modes = [STRICT, NONSTRICT] if mode == "both" else [mode]
    if cfg.M == 2:
        modes = [STRICT]
    _, f = zf_precode(H, s, cfg.p0)
    pr = lambda *a: print(*a, file=out)
    pr(f"N_t={cfg.Nt} K={cfg.K} M={cfg.M} seed={cfg.seed} p0={cfg.p0}")
    pr(f"s = {_fmt_vec(s)}")
    pr(f"ZF margin 1/f = {1 / f:.10g}")
    for m in modes:
        kernel = build_kernel(H, s, cfg.p0, m, const.threshold_angle)
        pr(f"\n== {m} (n = {kernel.n}) ==")
        pr(f"a = {_fmt_vec(kernel.a)}")
        pr(f"c = {kernel.c:.10g}")
        neg = np.nonzero(kernel.a < 0)[0].tolist()
        pr(f"S = {neg}  ({classify(kernel)})")
        res = solve_with_budget(kernel, cfg.n_max, trace=True)
        for row in res.trace or []:
            pr(f"  it {row['iteration']:3d} {row['action']:7s} active={list(row['active'])} "
               f"N={list(row['counts'])} q={_fmt_vec(row['q'])} min(u)={row['u_min']:.3e} "
               f"dual={row['objective']:.10g}")
        if res.fallback:
            pr("  selector exhausted; projected-gradient fallback used")
        _, dual = beamformer_from_dual(kernel, res.u, cfg.p0)
        qp = SimplexQp.from_kernel(kernel)
        ref = solve_active_set_enum(qp) if qp.n <= MAX_ENUM else solve_projected_gradient(qp)
        pr(f"iterations = {res.iterations}  converged = {res.converged}")
        pr(f"u = {_fmt_vec(res.u)}")
        pr(f"Lambda = {_fmt_vec(dual.Lambda)}")
        pr(f"t_star = {dual.t_star:.12g}")
        pr(f"objective u^T V^-1 u: closed form {dual.objective:.12g}  oracle {ref.objective:.12g}")


def _write(records, cfg, path, extra):
    manifest = {k: v for k, v in extra.items() if v is not None}
    if path is None:
        write_csv(records, sys.stdout, cfg, manifest)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_csv(records, fh, cfg, manifest)


def parse_and_run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg, extra = config_from_args(args)
    except ConfigError as exc:
        flag = f" ({exc.flag})" if exc.flag else ""
        print(f"ciprec: configuration error{flag}: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        if args.command == "inspect":
            inspect(cfg, mode=args.mode)
            return 0
        if args.command == "sweep":
            records = run_ber_sweep(cfg)
        elif args.command == "iters":
            records = run_iteration_stats(cfg, extra["k_values"])
        elif args.command == "tradeoff":
            records = run_tradeoff(cfg, extra["n_max_grid"])
        else:
            records = run_timing(cfg, extra["k_values"], warmup=args.warmup, nt=extra.get("nt"))
        _write(records, cfg, args.out, extra)
    except ConfigError as exc:
        print(f"ciprec: configuration error ({exc.flag}): {exc}", file=sys.stderr)
        return 2
    except (CiError, OSError, ArithmeticError, ValueError) as exc:
        print(f"ciprec: run failed: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(parse_and_run())


if __name__ == "__main__":
    main()
