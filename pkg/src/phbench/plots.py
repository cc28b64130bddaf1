"""Figure rendering for the report paths.

Each function writes one file next to the delimited output it illustrates.
The Agg backend is forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_sweep_summary(rows, path, title=None):
    """Converged energy vs start distance: mean line with the 5-95% band."""
    rows = sorted(rows, key=lambda row: row.r)
    r = np.array([row.r for row in rows])
    mean = np.array([row.mean_energy for row in rows])
    p05 = np.array([row.p05 for row in rows])
    p95 = np.array([row.p95 for row in rows])
    success = np.array([row.success_rate for row in rows])

    fig, (ax, ax2) = plt.subplots(
        2, 1, figsize=(6.0, 6.0), sharex=True,
        gridspec_kw={"height_ratios": [2, 1]},
    )
    ax.plot(r, mean, "o-", color="tab:blue", label="mean converged energy")
    ax.fill_between(r, p05, p95, color="tab:blue", alpha=0.25,
                    label="empirical 5-95% band")
    ax.set_ylabel("converged energy")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.legend(frameon=False)
    if title:
        ax.set_title(title)

    ax2.plot(r, success, "s-", color="tab:red")
    ax2.set_ylim(-0.05, 1.05)
    ax2.set_xlabel("initial-parameter distance r")
    ax2.set_ylabel("success rate")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_locality(rows, path):
    """Minimal kernel-support window vs system size, one curve per depth."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    depths = sorted({row["depth"] for row in rows})
    for depth in depths:
        sub = sorted(
            (row for row in rows if row["depth"] == depth),
            key=lambda row: row["num_qubits"],
        )
        n = np.array([row["num_qubits"] for row in sub])
        mean = np.array([row["support_mean"] for row in sub])
        lo = np.array([row["support_min"] for row in sub])
        hi = np.array([row["support_max"] for row in sub])
        line, = ax.plot(n, mean, "o-", lw=2, label=f"depth {depth}")
        ax.fill_between(n, lo, hi, alpha=0.2, color=line.get_color())
    ax.set_xlabel("system size N")
    ax.set_ylabel("minimal kernel-support window")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_spectrum(eigenvalues, path, zoom_count=20):
    """Sorted spectrum with an inset zoom on the lowest eigenvalues."""
    eigenvalues = np.sort(np.asarray(eigenvalues))
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot(np.arange(eigenvalues.size), eigenvalues, ".", ms=2,
            color="tab:blue")
    ax.set_xlabel("eigenvalue index")
    ax.set_ylabel("energy")

    k = min(zoom_count, eigenvalues.size)
    inset = ax.inset_axes([0.55, 0.12, 0.4, 0.4])
    inset.plot(np.arange(k), eigenvalues[:k], "o", ms=3, color="tab:red")
    inset.set_title("lowest levels", fontsize=8)
    inset.tick_params(labelsize=7)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
