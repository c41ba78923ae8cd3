#!/usr/bin/env python3
"""
Plot the CSV curves written by `qnd-lab figure <name>`.

    qnd-lab figure fig3 --out output
    python scripts/plot_figures.py fig3 --data output

Needs the `plots` extra (matplotlib). Not part of the tested package.
"""
import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

from qnd_lab.services.scenarios import FIGURE_SCENARIOS

# y column per quantity
Y_COLUMNS = {"kernels": "gamma_dot", "entropy": "S"}


def plot_curves(name: str, data: Path, ax):
    figure = FIGURE_SCENARIOS[name]
    quantity = figure.curves[0].config.quantity.value
    y = Y_COLUMNS[quantity]
    for curve in figure.curves:
        frame = pd.read_csv(data / f"{name}_{curve.label}.csv")
        ax.plot(frame["t"], frame[y], label=f"r = {curve.config.bath.r:g}")
    ax.set_xlabel("t")
    ax.set_ylabel(y)
    ax.legend()


def plot_cloud(name: str, data: Path, ax):
    frame = pd.read_csv(data / f"{name}_cloud.csv")
    ax.scatter(frame["sx0"], frame["sy0"], frame["sz0"], s=4, alpha=0.15, color="grey")
    ax.scatter(frame["sx"], frame["sy"], frame["sz"], s=6, color="tab:blue")
    ax.set_xlim(-1, 1)
    ax.set_ylim(-1, 1)
    ax.set_zlim(-1, 1)
    ax.set_box_aspect((1, 1, 1))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("name", choices=list(FIGURE_SCENARIOS))
    parser.add_argument("--data", default="output", help="directory holding the figure CSV files")
    parser.add_argument("--save", help="write the plot here instead of showing it")
    args = parser.parse_args()

    data = Path(args.data)
    cloud = args.name.startswith("fig5")
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d" if cloud else None)
    (plot_cloud if cloud else plot_curves)(args.name, data, ax)
    ax.set_title(FIGURE_SCENARIOS[args.name].caption, fontsize=9)
    plt.tight_layout()
    if args.save:
        plt.savefig(args.save, dpi=150, bbox_inches="tight")
    else:
        plt.show()


if __name__ == "__main__":
    main()
