"""BER against transmit SNR, QPSK, N_t = K = 8, for ZF, RZF and both CI rotations.

    python3 scripts/ber_qpsk.py --trials 500 --out results/ber_qpsk.csv
"""
import argparse
import os

from ciprec.harness import SimConfig, run_ber_sweep, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nt", type=int, default=8)
    ap.add_argument("--k", type=int, default=8)
    ap.add_argument("--mod", type=int, default=4, help="PSK order")
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--symbols", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/ber.csv")
    args = ap.parse_args()
    cfg = SimConfig(Nt=args.nt, K=args.k, M=args.mod, trials=args.trials, symbols_per_trial=args.symbols,
                    seed=args.seed, threads=args.threads).validate()
    records = run_ber_sweep(cfg)
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        write_csv(records, fh, cfg)
    for r in records:
        print(f"{r.precoder:16s} {r.snr_db:5.1f} dB  BER {r.ber:.3e}")


if __name__ == "__main__":
    main()
