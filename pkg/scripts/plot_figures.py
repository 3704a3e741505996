#!/usr/bin/env python3
"""Render the CSV artifacts produced by the trapshuttle CLI.

Usage:
    trapshuttle trajectory --gamma 7.5398223686155035 --out data/
    trapshuttle sweep --gamma-min 0.157 --gamma-max 31.4159265 --count 1000 --out data/
    python scripts/plot_figures.py data/ figures/

Creates phase-plane projections (x1 vs x2, colored by control sign), the
minimum-time curve over gamma, and the shifted-time comparison against the
many-switching limit, for whichever CSV files exist in the input directory.
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def plot_trajectory(csv_path: Path, out: Path) -> None:
    data = np.genfromtxt(csv_path, delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(5, 4))
    up = data["u"] >= 0
    ax.plot(np.where(up, data["x1"], np.nan), np.where(up, data["x2"], np.nan),
            "-", color="tab:blue", label="u = +1")
    ax.plot(np.where(~up, data["x1"], np.nan), np.where(~up, data["x2"], np.nan),
            ":", color="tab:red", label="u = -1")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / (csv_path.stem + "_phase_plane.png"), dpi=150)
    plt.close(fig)


def plot_sweep(csv_path: Path, out: Path) -> None:
    data = np.genfromtxt(csv_path, delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(data["gamma"], data["total_time"], "-", color="tab:blue")
    ax.set_xlabel("gamma")
    ax.set_ylabel("minimum time")
    fig.tight_layout()
    fig.savefig(out / "minimum_time.png", dpi=150)
    plt.close(fig)


def plot_limit(csv_path: Path, out: Path) -> None:
    data = np.genfromtxt(csv_path, delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(data["gamma_bar"], data["t_rho1"], "--", color="tab:blue",
            label="one pair of switch arcs")
    ax.plot(data["gamma_bar"], data["t_limit"], "-", color="tab:red",
            label="many-switching limit")
    ax.set_xlabel("shifted gamma")
    ax.set_ylabel("shifted minimum time")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "limit_comparison.png", dpi=150)
    plt.close(fig)


def main() -> int:
    src = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".")
    out = Path(sys.argv[2]) if len(sys.argv) > 2 else src
    out.mkdir(parents=True, exist_ok=True)
    made = 0
    for csv_path in sorted(src.glob("*.csv")):
        if csv_path.name == "sweep.csv":
            plot_sweep(csv_path, out)
        elif csv_path.name == "limit.csv":
            plot_limit(csv_path, out)
        elif "trajectory" in csv_path.name:
            plot_trajectory(csv_path, out)
        else:
            continue
        made += 1
        print(f"plotted {csv_path.name}")
    if not made:
        print(f"no known CSV files in {src}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
