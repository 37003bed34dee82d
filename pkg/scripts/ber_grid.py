"""BER sweeps over several antenna/user/modulation settings (e.g. 8PSK, or N_t > K).

    python3 scripts/ber_grid.py --setting 8psk --out results/ber_8psk.csv
"""
import argparse
import os

from ciprec.harness import SimConfig, run_ber_sweep, write_csv

SETTINGS = {
    "qpsk-8x8": dict(Nt=8, K=8, M=4),
    "8psk": dict(Nt=8, K=8, M=8),
    "qpsk-12x8": dict(Nt=12, K=8, M=4),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--setting", choices=sorted(SETTINGS), default="8psk")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--symbols", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    cfg = SimConfig(**SETTINGS[args.setting], trials=args.trials, symbols_per_trial=args.symbols,
                    seed=args.seed, threads=args.threads).validate()
    out = args.out or f"results/ber_{args.setting}.csv"
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        write_csv(run_ber_sweep(cfg), fh, cfg)
    print(out)


if __name__ == "__main__":
    main()
