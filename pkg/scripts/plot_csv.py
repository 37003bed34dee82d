"""Plot a harness CSV: BER against SNR, or against n_max for tradeoff files.

Needs matplotlib, which the package itself does not depend on.
"""
import argparse
import math
from collections import defaultdict

from ciprec.harness import read_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("--x", choices=("snr_db", "n_max", "k"), default="snr_db")
    ap.add_argument("--y", default="ber")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = defaultdict(list)
    for row in read_csv(args.csv):
        if row[args.x] == "" or row[args.y] == "":
            continue
        x = float(row[args.x])
        if math.isinf(x):
            continue
        series[row["precoder"]].append((x, float(row[args.y])))
    fig, ax = plt.subplots()
    for name, pts in series.items():
        pts.sort()
        ax.plot(*zip(*pts), marker="o", label=name)
    if args.y in ("ber", "ser"):
        ax.set_yscale("log")
    ax.set_xlabel(args.x)
    ax.set_ylabel(args.y)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    out = args.out or args.csv.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main()
