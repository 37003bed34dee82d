"""Per-symbol solver time of the closed-form scheme and the projected-gradient QP against K."""
import argparse
import os

from ciprec.harness import SimConfig, run_timing, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ks", default="2,4,6,8")
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--symbols", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/timing.csv")
    args = ap.parse_args()
    cfg = SimConfig(trials=args.trials, symbols_per_trial=args.symbols, seed=args.seed,
                    precoders=("zf", "rzf", "ci-cf-strict", "ci-qp-strict", "ci-cf-nonstrict", "ci-qp-nonstrict"))
    records = run_timing(cfg, [int(k) for k in args.ks.split(",")])
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        write_csv(records, fh, cfg)
    for r in records:
        print(f"K={r.k:2d} {r.precoder:16s} mean {r.avg_solve_micros:9.1f} us  median {r.median_solve_micros:9.1f} us")


if __name__ == "__main__":
    main()
