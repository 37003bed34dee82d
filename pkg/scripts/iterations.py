"""Average iterations of the closed-form scheme against K at N_t = 16."""
import argparse
import os

from ciprec.harness import SimConfig, run_iteration_stats, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nt", type=int, default=16)
    ap.add_argument("--ks", default="1,2,4,6,8,10,12,14,16")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--symbols", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/iterations.csv")
    args = ap.parse_args()
    ks = [int(k) for k in args.ks.split(",")]
    cfg = SimConfig(Nt=args.nt, trials=args.trials, symbols_per_trial=args.symbols, seed=args.seed,
                    threads=args.threads)
    records = run_iteration_stats(cfg, ks)
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        write_csv(records, fh, cfg)
    for r in records:
        print(f"K={r.k:2d} {r.precoder:16s} avg iterations {r.avg_iterations:.3f}")


if __name__ == "__main__":
    main()
