#!/usr/bin/env python3
"""Scan the flux Chern number against gamma / nu and plot the plateaus.

Writes out/phase_diagram.csv and, with --plot, out/phase_diagram.png.
Expected result: c1 = +4 on (0, 1), -4 on (-1, 0), 0 outside [-1, 1],
with flagged gaps at the three closures.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from synthflux import FieldParams, GridSpec, phase_diagram


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--nu", type=float, default=1.0)
    ap.add_argument("--ratio-min", type=float, default=-2.0)
    ap.add_argument("--ratio-max", type=float, default=2.0)
    ap.add_argument("--steps", type=int, default=81)
    ap.add_argument("--grid", type=int, default=128)
    ap.add_argument("--out-dir", type=Path, default=Path("out"))
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()

    params = FieldParams(alpha=args.alpha, nu=args.nu)
    ratios = np.linspace(args.ratio_min, args.ratio_max, args.steps)
    rows = phase_diagram(params, ratios, grid=GridSpec(args.grid, args.grid))

    args.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = args.out_dir / "phase_diagram.csv"
    with open(csv_path, "w", newline="\n") as fh:
        writer = csv.writer(fh)
        writer.writerow(["gamma_over_nu", "c1_raw", "c1_rounded", "residual", "min_gap", "flagged"])
        for row in rows:
            writer.writerow(
                [row.gamma_over_nu, row.c1_raw, row.c1_rounded, row.residual,
                 row.min_gap, int(row.flagged)]
            )
    evaluated = [r for r in rows if not r.flagged]
    print(f"wrote {csv_path} ({len(rows)} rows, {len(rows) - len(evaluated)} flagged)")
    plateaus = sorted({r.c1_rounded for r in evaluated})
    print(f"plateaus found: {plateaus}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
        xs = [r.gamma_over_nu for r in evaluated]
        ax1.plot(xs, [r.c1_rounded for r in evaluated], "o", ms=3, label="rounded")
        ax1.plot(xs, [r.c1_raw for r in evaluated], ".", ms=2, alpha=0.5, label="raw")
        for ratio in (-1.0, 0.0, 1.0):
            ax1.axvline(ratio, color="0.8", lw=0.8, zorder=0)
        ax1.set_ylabel("flux Chern number")
        ax1.legend(loc="best", fontsize=8)
        ax2.plot([r.gamma_over_nu for r in rows], [r.min_gap for r in rows], "-", lw=1)
        ax2.set_ylabel("min |B| on cell")
        ax2.set_xlabel("gamma / nu")
        fig.tight_layout()
        png_path = args.out_dir / "phase_diagram.png"
        fig.savefig(png_path, dpi=150)
        print(f"wrote {png_path}")


if __name__ == "__main__":
    main()
