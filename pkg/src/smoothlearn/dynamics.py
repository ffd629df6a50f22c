"""Learning dynamics producing trajectories.

Two algorithms live here. The optimistic gradient method plays the projection
of a secondary iterate nudged by a prediction (last round's utility vector),
then moves the secondary iterate along the observed utilities. The clairvoyant
variant anchors every step on an approximate fixed point of the prox map
w -> prox(x_prev, eta * F(w)), found by Picard iteration; for eta * L < 1 that
map is a contraction, so the anchor is cheap to compute to high accuracy.

All simulation is synchronous: every player observes the utility vector
induced by the profile actually played that round. Runs are deterministic
functions of (game, learning rate, horizon, initialization, schedule).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FixedPointBudgetExhausted, NonFiniteInput
from .games import Game, check_profile, game_operator, lipschitz_bound, uniform_profile
from .geometry import _project, diameter, product_diameter, project_simplex


# ---------------------------------------------------------------------------
# Optimistic gradient descent


@dataclass
class OgdState:
    """Joint optimistic-gradient state: one slot of each field per player."""

    eta: float
    xhat: list[np.ndarray]  # secondary iterates
    x: list[np.ndarray]  # most recently played iterates
    m: list[np.ndarray]  # prediction vectors (last observed utilities)


def ogd_init(game: Game, eta: float, init=None) -> OgdState:
    """Fresh state; the prediction warm-starts at F evaluated at the init."""
    if not math.isfinite(eta) or eta < 0:
        raise ValueError(f"learning rate must be finite and >= 0, got {eta}")
    xhat = check_profile(game, init if init is not None else uniform_profile(game))
    m = game_operator(game, xhat)
    return OgdState(eta, xhat, [v.copy() for v in xhat], m)


def ogd_play(state: OgdState, i: int) -> np.ndarray:
    """The iterate player i puts on the table this round."""
    return project_simplex(state.xhat[i] + state.eta * state.m[i])


def ogd_step(state: OgdState, i: int, u: np.ndarray) -> OgdState:
    """Advance player i given the utility vector observed this round.

    Records the played iterate (projection of the optimistic point), moves the
    secondary iterate along ``u``, and stores ``u`` as the next prediction.
    """
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise NonFiniteInput(f"player {i}: non-finite utility vector")
    played = ogd_play(state, i)
    new_xhat = list(state.xhat)
    new_x = list(state.x)
    new_m = list(state.m)
    new_x[i] = played
    new_xhat[i] = project_simplex(state.xhat[i] + state.eta * u)
    new_m[i] = u.copy()
    return OgdState(state.eta, new_xhat, new_x, new_m)


# ---------------------------------------------------------------------------
# Trajectories


@dataclass
class Trajectory:
    """Step-indexed record of a dynamics run (struct-of-arrays layout).

    ``xs[i]`` and ``us[i]`` hold player i's played iterates and observed
    utility vectors, one row per step. Optimistic runs also carry the
    secondary iterates (one extra trailing row) and predictions; clairvoyant
    runs carry the anchors, the operator evaluated at the anchors, the
    achieved fixed-point residuals, and the tolerances they had to meet.
    """

    kind: str
    eta: float
    xs: list[np.ndarray]
    us: list[np.ndarray]
    xhats: list[np.ndarray] | None = None
    ms: list[np.ndarray] | None = None
    ws: list[np.ndarray] | None = None
    us_w: list[np.ndarray] | None = None
    residuals: np.ndarray | None = None
    tolerances: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.xs)

    @property
    def steps(self) -> int:
        return 0 if not self.xs else self.xs[0].shape[0]

    def profile(self, t: int) -> list[np.ndarray]:
        return [self.xs[i][t] for i in range(self.n)]


def run_ogd(game: Game, eta: float, steps: int, init=None) -> Trajectory:
    """Synchronous optimistic-gradient run for ``steps`` rounds."""
    state = ogd_init(game, eta, init)
    n = game.n
    T = int(steps)
    if T < 0:
        raise ValueError("steps must be >= 0")
    xs = [np.empty((T, d)) for d in game.actions]
    us = [np.empty((T, d)) for d in game.actions]
    xhats = [np.empty((T + 1, d)) for d in game.actions]
    ms = [np.empty((T, d)) for d in game.actions]

    xhat = state.xhat
    u_prev = state.m  # utilities at the initialization
    for t in range(T):
        x = [_project(xhat[i] + eta * u_prev[i]) for i in range(n)]
        u = game_operator(game, x)
        for i in range(n):
            if not math.isfinite(float(u[i].sum())):
                raise NonFiniteInput(f"player {i}: non-finite utilities at step {t + 1}")
            xs[i][t] = x[i]
            us[i][t] = u[i]
            xhats[i][t] = xhat[i]
            ms[i][t] = u_prev[i]
        xhat = [_project(xhat[i] + eta * u[i]) for i in range(n)]
        u_prev = u
    for i in range(n):
        xhats[i][T] = xhat[i]
    return Trajectory("ogd", eta, xs, us, xhats=xhats, ms=ms)


# ---------------------------------------------------------------------------
# Clairvoyant gradient descent


def default_tolerance(game: Game) -> Callable[[int], float]:
    """Per-step fixed-point tolerance min_i D_i / t^2.

    Single-action players have zero diameter and their coordinate of the
    anchor map is trivially exact, so only nondegenerate simplices count;
    a fully degenerate game falls back to 1 / t^2.
    """
    positive = [diameter(d) for d in game.actions if d >= 2]
    dmin = min(positive) if positive else 1.0
    return lambda t: dmin / (t * t)


@dataclass
class CgdSchedule:
    """Learning rate, per-step anchor tolerances, and the Picard budget.

    ``eta`` of None resolves to 1 / (2 L) against the game's Lipschitz bound;
    the tolerance defaults to min_i D_i / t^2.
    """

    eta: float | None = None
    tolerance: Callable[[int], float] | None = None
    max_picard_iters: int = 64

    def resolve(self, game: Game) -> tuple[float, Callable[[int], float], float]:
        lipschitz = lipschitz_bound(game)
        eta = 1.0 / (2.0 * lipschitz) if self.eta is None else float(self.eta)
        if eta <= 0 or eta * lipschitz >= 1.0:
            raise ValueError(
                f"need 0 < eta < 1/L for contraction; eta={eta:g}, L={lipschitz:g}"
            )
        tol = self.tolerance if self.tolerance is not None else default_tolerance(game)
        return eta, tol, lipschitz


def _picard(game: Game, x_prev, eta: float, eps: float, max_iters: int):
    """Iterate w -> prox(x_prev, eta F(w)) until the residual drops to eps.

    Returns (w, residual, next_profile, F(w), iterations); next_profile is the
    prox image of the accepted anchor, i.e. the iterate the dynamics plays.
    """
    if eps <= 0:
        raise ValueError("fixed-point tolerance must be positive")
    n = game.n
    w = [v.copy() for v in x_prev]
    residual = math.inf
    for k in range(max_iters):
        fw = game_operator(game, w)
        image = [_project(x_prev[i] + eta * fw[i]) for i in range(n)]
        residual = math.sqrt(
            sum(float(np.sum((image[i] - w[i]) ** 2)) for i in range(n))
        )
        if residual <= eps:
            return w, residual, image, fw, k + 1
        w = image
    raise FixedPointBudgetExhausted(max_iters, residual, eps)


def cgd_fixed_point(game: Game, x_prev, eta: float, eps: float, max_iters: int = 64):
    """Approximate fixed point of the anchored prox map, from w = x_prev.

    The returned w satisfies ||w - prox(x_prev, eta F(w))|| <= eps, with the
    residual re-evaluated at w itself.
    """
    x_prev = check_profile(game, x_prev)
    lipschitz = lipschitz_bound(game)
    if eta * lipschitz >= 1.0:
        raise ValueError(
            f"eta * L = {eta * lipschitz:g} >= 1: the anchored map need not contract"
        )
    w, residual, _, _, _ = _picard(game, x_prev, eta, eps, max_iters)
    return w, residual


def picard_iteration_budget(game: Game, eta: float, eps: float) -> int:
    """Iterations guaranteed to suffice: contraction from a start at most
    D_X away shrinks by eta*L per pass."""
    lipschitz = lipschitz_bound(game)
    dx = product_diameter(game.actions)
    if eps >= dx:
        return 1
    return math.ceil(math.log(dx / eps) / math.log(1.0 / (eta * lipschitz))) + 1


def run_cgd(game: Game, schedule: CgdSchedule, steps: int, init=None) -> Trajectory:
    """Clairvoyant run: each step anchors on a Picard fixed point at the
    schedule's tolerance, then plays the anchored prox image."""
    eta, tol, _ = schedule.resolve(game)
    n = game.n
    T = int(steps)
    if T < 0:
        raise ValueError("steps must be >= 0")
    x = check_profile(game, init if init is not None else uniform_profile(game))

    xs = [np.empty((T, d)) for d in game.actions]
    us = [np.empty((T, d)) for d in game.actions]
    ws = [np.empty((T, d)) for d in game.actions]
    us_w = [np.empty((T, d)) for d in game.actions]
    residuals = np.empty(T)
    tolerances = np.empty(T)

    for t in range(1, T + 1):
        eps_t = float(tol(t))
        w, res, image, fw, _ = _picard(
            game, x, eta, eps_t, schedule.max_picard_iters
        )
        u = game_operator(game, image)
        for i in range(n):
            if not np.all(np.isfinite(u[i])):
                raise NonFiniteInput(f"player {i}: non-finite utilities at step {t}")
            xs[i][t - 1] = image[i]
            us[i][t - 1] = u[i]
            ws[i][t - 1] = w[i]
            us_w[i][t - 1] = fw[i]
        residuals[t - 1] = res
        tolerances[t - 1] = eps_t
        x = image
    return Trajectory(
        "cgd", eta, xs, us, ws=ws, us_w=us_w, residuals=residuals,
        tolerances=tolerances,
    )


# ---------------------------------------------------------------------------
# Export


def trajectory_to_csv(trajectory: Trajectory, path: str | os.PathLike) -> None:
    """One row per step: t, every strategy coordinate, the equilibrium gap,
    and the welfare. Writing is atomic and bit-stable for identical runs."""
    header = ["t"]
    for i in range(trajectory.n):
        header += [f"x{i}_{k}" for k in range(trajectory.xs[i].shape[1])]
    header += ["negap", "sw"]

    tmp = str(path) + ".tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        T = trajectory.steps
        if T:
            gaps = np.zeros(T)
            sw = np.zeros(T)
            for i in range(trajectory.n):
                played = np.sum(trajectory.xs[i] * trajectory.us[i], axis=1)
                gaps = np.maximum(gaps, trajectory.us[i].max(axis=1) - played)
                sw += played
            for t in range(T):
                row = [str(t + 1)]
                for i in range(trajectory.n):
                    row += [repr(float(v)) for v in trajectory.xs[i][t]]
                row += [repr(float(gaps[t])), repr(float(sw[t]))]
                writer.writerow(row)
    os.replace(tmp, path)
