#!/usr/bin/env python3
"""Render plots from suptrap CSV artifacts.

Usage:
    plot_results.py atom  <atom_series.csv>    [out.png]
    plot_results.py optical <optical_series.csv> [out.png]
    plot_results.py bubble <bubble_trace.csv>  [out.png]
    plot_results.py sweep  <sweep_summary.csv> [out.png]
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def plot_atom(df, ax):
    ax.semilogy(df["cycle"], df["removed"].clip(lower=0.5), "o", ms=3,
                label="removed (Monte Carlo)")
    ax.semilogy(df["cycle"], df["expected_removed"].clip(lower=0.5), "-",
                label="expected n0 (eta p/2)(1 - eta p/2)^(k-1)")
    ax.set_xlabel("cycle")
    ax.set_ylabel("atoms removed")
    ax.legend()
    ax.set_title("trap leakage per cycle")


def plot_optical(df, ax):
    escapes = df["escapes_D1"] + df["escapes_D2"]
    ax.semilogy(df["pass"], escapes.clip(lower=0.5), "o", ms=3, label="escapes")
    ax.set_xlabel("pass")
    ax.set_ylabel("photons detected")
    ax.legend()
    ax.set_title("escape-pass histogram")


def plot_bubble(df, ax):
    ax.plot(df["time"], df["enclosed_probability"], label="enclosed probability")
    ax2 = ax.twinx()
    ax2.semilogy(df["time"], df["boundary_current_max"].clip(lower=1e-20),
                 "r--", alpha=0.6, label="|j| at boundary")
    ax.set_xlabel("time")
    ax.set_ylabel("enclosed probability")
    ax2.set_ylabel("boundary current")
    ax.set_title("probability inside the null boundary")


def plot_sweep(df, ax):
    ax.errorbar(df["value"], df["q_hat"],
                yerr=[df["q_hat"] - df["ci_low"], df["ci_high"] - df["q_hat"]],
                fmt="o-", capsize=3, label="fitted per-cycle escape probability")
    ax.set_xlabel("swept parameter")
    ax.set_ylabel("q")
    ax.legend()
    ax.set_title("parameter sweep")


KINDS = {"atom": plot_atom, "optical": plot_optical,
         "bubble": plot_bubble, "sweep": plot_sweep}


def main():
    if len(sys.argv) < 3 or sys.argv[1] not in KINDS:
        sys.exit(__doc__)
    kind, path = sys.argv[1], sys.argv[2]
    out = sys.argv[3] if len(sys.argv) > 3 else f"{kind}_plot.png"
    df = pd.read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    KINDS[kind](df, ax)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
