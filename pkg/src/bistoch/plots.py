"""Matplotlib renderings of traces and reports, saved to files.

Every function takes the data and a target path; figures use the Agg
backend so they work headless, and the CLI writes them next to the
delimited output when asked to.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_entropy_trace(trace, path, base: str = "e") -> None:
    scale = math.log(2) if base == "2" else 1.0
    unit = "bits" if base == "2" else "nats"
    ns = [row.n for row in trace.rows]
    hs = [row.entropy / scale for row in trace.rows]
    slopes = [row.slope / scale for row in trace.rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(ns, hs, "ko-", ms=4)
    ax1.set_xlabel("n")
    ax1.set_ylabel(f"H_n ({unit})")
    ax1.grid(True, alpha=0.3)
    ax2.plot(ns, slopes, "ro-", ms=4)
    ax2.set_xlabel("n")
    ax2.set_ylabel(f"H_n / n ({unit})")
    ax2.grid(True, alpha=0.3)
    if trace.limsup_estimate is not None:
        ax2.axhline(trace.limsup_estimate / scale, color="0.4", ls="--", lw=1)
    fig.tight_layout()
    _save(fig, path)


def plot_spectrum(eigenvalues, path, radius: float | None = None) -> None:
    """Peripheral eigenvalues in the complex plane with the unit circle."""
    fig, ax = plt.subplots(figsize=(5, 5))
    angles = np.linspace(0, 2 * np.pi, 256)
    ax.plot(np.cos(angles), np.sin(angles), "-", color="0.7", lw=1)
    if radius is not None:
        ax.plot(radius * np.cos(angles), radius * np.sin(angles), "--", color="0.5", lw=1)
    xs = [complex(v).real for v in eigenvalues]
    ys = [complex(v).imag for v in eigenvalues]
    ax.plot(xs, ys, "k.", ms=8)
    ax.set_xlim(-1.1, 1.1)
    ax.set_ylim(-1.1, 1.1)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_decay_curves(curves, path, tol: float | None = None) -> None:
    """Iterate-norm decay, one line per test vector, log scale."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, curve in curves:
        floor = [max(v, 1e-18) for v in curve]
        ax.semilogy(range(len(curve)), floor, "-", lw=1, label=label)
    if tol is not None:
        ax.axhline(tol, color="r", ls="--", lw=1)
    ax.set_xlabel("n")
    ax.set_ylabel("iterate norm")
    if len(curves) <= 8:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_factor(factor, path) -> None:
    """Heat map of the atom permutation together with atom sizes."""
    k = factor.atom_count
    mat = np.zeros((k, k))
    for i, j in enumerate(factor.rotation):
        mat[i, j] = 1.0
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(mat, cmap="Greys", interpolation="nearest")
    ax.set_xlabel("target atom")
    ax.set_ylabel("source atom")
    ax.set_title(f"rotation on {k} atoms")
    _save(fig, path)


def plot_perturbation_study(rows, path) -> None:
    """Distance to the base operator vs mixing weight, with the 2a bound."""
    alphas = [r[0] for r in rows]
    dists = [r[1] for r in rows]
    bounds = [r[2] for r in rows]
    slopes = [r[3] for r in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(alphas, dists, "ko", ms=4, label="measured distance")
    ax1.plot(alphas, bounds, "r--", lw=1, label="2 alpha bound")
    ax1.set_xlabel("alpha")
    ax1.set_ylabel("L1 operator distance")
    ax1.legend(fontsize=8)
    ax1.grid(True, alpha=0.3)
    ax2.plot(alphas, slopes, "bs", ms=4)
    ax2.set_xlabel("alpha")
    ax2.set_ylabel("entropy slope")
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def plot_slope_histogram(slopes, path, bins: int = 20) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(slopes, bins=bins, color="0.6", edgecolor="k")
    ax.set_xlabel("entropy slope (nats)")
    ax.set_ylabel("count")
    ax.grid(True, alpha=0.3)
    _save(fig, path)
