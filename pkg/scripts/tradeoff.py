"""BER against the iteration budget n_max at 30 dB, QPSK, N_t = K = 4."""
import argparse
import math
import os

from ciprec.harness import SimConfig, run_tradeoff, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr", type=float, default=30.0)
    ap.add_argument("--nmax", default="0,1,2,3,4,5,6,7,8,9,10,inf")
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--symbols", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/tradeoff.csv")
    args = ap.parse_args()
    grid = [math.inf if x == "inf" else int(x) for x in args.nmax.split(",")]
    cfg = SimConfig(Nt=4, K=4, M=4, snr_db=(args.snr,), trials=args.trials, symbols_per_trial=args.symbols,
                    precoders=("ci-cf-strict", "ci-cf-nonstrict"), seed=args.seed, threads=args.threads)
    records = run_tradeoff(cfg, grid)
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        write_csv(records, fh, cfg, {"n_max_grid": tuple(grid)})
    for r in records:
        print(f"{r.precoder:16s} n_max={r.n_max}  BER {r.ber:.3e}")


if __name__ == "__main__":
    main()
