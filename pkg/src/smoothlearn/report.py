"""Figure rendering for the report paths.

Every CLI command that writes delimited output can also drop matplotlib
renderings of the same traces next to it: the running-average welfare, the
equilibrium-gap trace, the joint-diagonal mass for square bimatrix games, and
the per-game ratio comparison for scans. Figures are derived views; the CSVs
stay the primary artifact.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dynamics import Trajectory
from .games import Game
from .metrics import diagonal_mass, negap_trace, welfare_trace


def _steps_axis(n: int) -> np.ndarray:
    return np.arange(1, n + 1)


def _stride(n: int, limit: int = 20000) -> int:
    return max(1, n // limit)


def save_trajectory_figures(game: Game, trajectory: Trajectory, outdir) -> list[str]:
    """Render welfare, gap, and (when square) diagonal traces; returns the
    file paths written."""
    if trajectory.steps == 0:
        return []
    os.makedirs(outdir, exist_ok=True)
    written = []
    t = _steps_axis(trajectory.steps)
    k = _stride(trajectory.steps)

    sw, running = welfare_trace(game, trajectory)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t[::k], sw[::k], lw=0.6, alpha=0.35, label="per-step welfare")
    ax.plot(t[::k], running[::k], lw=1.6, label="running average")
    ax.set_xlabel("step")
    ax.set_ylabel("social welfare")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = os.path.join(outdir, "welfare_trace.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    gaps = negap_trace(trajectory)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t[::k], gaps[::k], lw=0.8)
    ax.set_xlabel("step")
    ax.set_ylabel("equilibrium gap")
    ax.set_yscale("symlog", linthresh=1e-8)
    fig.tight_layout()
    path = os.path.join(outdir, "negap_trace.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    if game.n >= 2 and game.actions[0] == game.actions[1]:
        diag = diagonal_mass(game, trajectory)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(t[::k], diag[::k], lw=0.8)
        ax.set_xlabel("step")
        ax.set_ylabel("diagonal joint-action mass")
        ax.set_ylim(0.0, 1.0)
        fig.tight_layout()
        path = os.path.join(outdir, "diagonal_mass.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def save_scan_figure(rows: list[dict], path) -> str:
    """Per-game comparison of the certified ratio against the equilibrium
    welfare ratios; one marker triple per scanned game."""
    idx = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.scatter(idx, [r["rpoa"] for r in rows], marker="s", label="certified ratio")
    ax.scatter(idx, [r["poa_worst"] for r in rows], marker="v", label="worst equilibrium")
    ax.scatter(idx, [r["poa_best"] for r in rows], marker="^", label="best equilibrium")
    ax.set_xticks(idx)
    ax.set_xticklabels([str(r["seed"]) for r in rows], rotation=45, fontsize=7)
    ax.set_xlabel("game seed")
    ax.set_ylabel("fraction of optimal welfare")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(frameon=False, loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
