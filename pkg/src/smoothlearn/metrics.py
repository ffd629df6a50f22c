"""Equilibrium-quality and regret measurements over profiles and trajectories.

Profile-level: per-player best-response gaps, their maximum, and the weak
equilibrium check (a 1-delta fraction of players within epsilon of their best
response). Trajectory-level: regrets against the best fixed vertex (exact by
linearity) or a supplied comparator, the averaged-play equilibrium gap, the
optimistic-method regret inequality audit, and welfare traces.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .errors import SmoothlearnError
from .games import Game, check_profile, game_operator, lipschitz_bound, max_abs_utility
from .geometry import diameter


# ---------------------------------------------------------------------------
# Profile-level gaps


@dataclass
class GapReport:
    gaps: np.ndarray  # per-player best-response gaps, clamped at 0
    negap: float  # their maximum
    sorted_gaps: np.ndarray  # descending; the (epsilon, delta) frontier


def br_gap(game: Game, profile, i: int) -> float:
    """Best-response gap of player i: a vertex maximizer is exact."""
    u = game.utility_vector(i, profile)
    return max(0.0, float(u.max() - np.dot(profile[i], u)))


def ne_gap(game: Game, profile) -> GapReport:
    profile = check_profile(game, profile)
    ops = game_operator(game, profile)
    gaps = np.array(
        [
            max(0.0, float(ops[i].max() - np.dot(profile[i], ops[i])))
            for i in range(game.n)
        ]
    )
    return GapReport(gaps, float(gaps.max()), np.sort(gaps)[::-1])


def weak_ne_check(game: Game, profile, eps: float, delta: float) -> bool:
    """Are at least a (1 - delta) fraction of players eps-best responding?"""
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    report = ne_gap(game, profile)
    needed = math.ceil((1.0 - delta) * game.n - 1e-9)
    return int(np.sum(report.gaps <= eps + 1e-12)) >= needed


def weak_eps(sorted_gaps: np.ndarray, delta: float) -> float:
    """The epsilon certified at level delta: the smallest of the delta*n
    largest gaps (so all but fewer than delta*n players do at least this
    well)."""
    n = sorted_gaps.size
    k = int(math.floor(delta * n + 1e-9))
    if k <= 0:
        return float(sorted_gaps[0]) if n else 0.0
    return float(sorted_gaps[k - 1])


# ---------------------------------------------------------------------------
# Regrets


@dataclass
class RegretReport:
    regrets: np.ndarray  # per player, against the best fixed vertex
    total: float
    weighted_total: float | None = None  # under caller-supplied weights
    comparator_regrets: np.ndarray | None = None  # against a fixed profile
    comparator_total: float | None = None


def _played_utilities(trajectory: Trajectory) -> np.ndarray:
    """(n, T) matrix of realized per-step expected utilities."""
    return np.stack(
        [
            np.sum(trajectory.xs[i] * trajectory.us[i], axis=1)
            for i in range(trajectory.n)
        ]
    )


def regrets(
    game: Game,
    trajectory: Trajectory,
    comparator=None,
    weights=None,
) -> RegretReport:
    """External regrets over the run; optionally also against a fixed profile.

    The unconstrained benchmark is the best single action in hindsight (a
    vertex suffices by linearity of expected utility in one's own strategy).
    ``comparator`` may give, per player, an action index or a mixed vector.
    """
    if trajectory.steps == 0:
        raise ValueError("regret needs a nonempty trajectory")
    if game.n != trajectory.n or game.actions != [
        x.shape[1] for x in trajectory.xs
    ]:
        raise ValueError("trajectory does not match the game's shape")
    played = _played_utilities(trajectory).sum(axis=1)
    cumulative = [trajectory.us[i].sum(axis=0) for i in range(trajectory.n)]
    regs = np.array(
        [float(cumulative[i].max() - played[i]) for i in range(trajectory.n)]
    )
    report = RegretReport(regs, float(regs.sum()))
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        report.weighted_total = float(np.dot(weights, regs))
    if comparator is not None:
        comp = []
        for i, b in enumerate(comparator):
            if np.ndim(b) == 0:
                comp.append(float(cumulative[i][int(b)] - played[i]))
            else:
                comp.append(float(np.dot(np.asarray(b, float), cumulative[i]) - played[i]))
        report.comparator_regrets = np.array(comp)
        report.comparator_total = float(report.comparator_regrets.sum())
    return report


def brgap_matrix(trajectory: Trajectory) -> np.ndarray:
    """(T, n) per-step best-response gaps, clamped at 0 before any squaring."""
    T = trajectory.steps
    out = np.empty((T, trajectory.n))
    for i in range(trajectory.n):
        played = np.sum(trajectory.xs[i] * trajectory.us[i], axis=1)
        out[:, i] = trajectory.us[i].max(axis=1) - played
    return np.maximum(out, 0.0)


def negap_trace(trajectory: Trajectory) -> np.ndarray:
    return brgap_matrix(trajectory).max(axis=1) if trajectory.steps else np.zeros(0)


def best_iterate(trajectory: Trajectory) -> tuple[int, float]:
    """1-based step minimizing the summed squared best-response gaps."""
    squared = (brgap_matrix(trajectory) ** 2).sum(axis=1)
    t = int(np.argmin(squared))
    return t + 1, float(squared[t])


def good_iterate_fraction(trajectory: Trajectory, factor: float = 10.0) -> float:
    """Fraction of steps whose summed squared gap is within ``factor`` times
    the run average; picking a step uniformly at random is this likely to be
    good."""
    squared = (brgap_matrix(trajectory) ** 2).sum(axis=1)
    return float(np.mean(squared <= factor * squared.mean() + 1e-15))


# ---------------------------------------------------------------------------
# Optimistic-method regret inequality audit


@dataclass
class RvuAudit:
    per_player_slack: np.ndarray  # bound minus realized regret, >= 0 up to float
    sum_slack: float  # slack of the summed bound with its stronger constant
    path_total: float  # sum over steps of both squared tracking distances
    regrets: np.ndarray
    per_player_bound: np.ndarray


def rvu_audit(trajectory: Trajectory, eta: float | None = None) -> RvuAudit:
    """Evaluate both sides of the optimistic regret inequality on a recorded
    run: regret is at most D^2/(2 eta) plus eta times the prediction error,
    minus the tracking distances at 1/(2 eta); the summed form tightens the
    negative coefficient to 1/(4 eta) for eta <= 1/(4L)."""
    if trajectory.kind != "ogd" or trajectory.xhats is None or trajectory.ms is None:
        raise SmoothlearnError("audit needs an optimistic run with recorded state")
    if trajectory.steps == 0:
        raise ValueError("audit needs a nonempty trajectory")
    eta = trajectory.eta if eta is None else eta
    n = trajectory.n
    bounds = np.empty(n)
    regs = np.empty(n)
    path_terms = np.zeros(trajectory.steps)
    prediction_error = 0.0
    for i in range(n):
        xs, us, ms = trajectory.xs[i], trajectory.us[i], trajectory.ms[i]
        xh = trajectory.xhats[i]
        d2 = diameter(xs.shape[1]) ** 2
        err = float(np.sum((us - ms) ** 2))
        track = np.sum((xs - xh[:-1]) ** 2, axis=1) + np.sum(
            (xs - xh[1:]) ** 2, axis=1
        )
        path_terms += track
        prediction_error += err
        played = float(np.sum(xs * us))
        regs[i] = float(us.sum(axis=0).max() - played)
        bounds[i] = d2 / (2 * eta) + eta * err - float(track.sum()) / (2 * eta)
    d2_total = sum(diameter(x.shape[1]) ** 2 for x in trajectory.xs)
    path_total = float(path_terms.sum())
    sum_bound = d2_total / (2 * eta) - path_total / (4 * eta)
    return RvuAudit(
        per_player_slack=bounds - regs,
        sum_slack=float(sum_bound - regs.sum()),
        path_total=path_total,
        regrets=regs,
        per_player_bound=bounds,
    )


def path_length_bound(
    trajectory: Trajectory, eps_n: float = 0.0, mu: float = 0.0, opt: float = 0.0
) -> float:
    """Ceiling the tracking-distance total must respect on an optimistic run:
    twice the summed squared diameters, plus the efficiency-shortfall term."""
    d2_total = sum(diameter(x.shape[1]) ** 2 for x in trajectory.xs)
    return 2.0 * d2_total + 4.0 * trajectory.eta * eps_n * (1.0 + mu) * opt * trajectory.steps


@dataclass
class CgdAudit:
    per_player_slack: np.ndarray  # regret bound minus realized regret
    regrets: np.ndarray
    per_player_bound: np.ndarray
    max_residual_excess: float  # how far any step overshot its tolerance


def cgd_regret_audit(game: Game, trajectory: Trajectory, lipschitz: float | None = None) -> CgdAudit:
    """Check the anchored method's per-player regret bound on a recorded run.

    With eta = 1/(2L) and tolerances below D_i / t^2, each player's regret is
    at most 3 L D_i^2, minus the summed squared best-response gaps scaled by
    1/(8 L D_i^2), plus eta/2 times the anchor-vs-played operator drift.
    """
    if trajectory.kind != "cgd" or trajectory.us_w is None:
        raise SmoothlearnError("audit needs a clairvoyant run with recorded anchors")
    if trajectory.steps == 0:
        raise ValueError("audit needs a nonempty trajectory")
    lips = lipschitz_bound(game) if lipschitz is None else lipschitz
    gaps = brgap_matrix(trajectory)
    regs = np.empty(trajectory.n)
    bounds = np.empty(trajectory.n)
    for i in range(trajectory.n):
        xs, us = trajectory.xs[i], trajectory.us[i]
        played = float(np.sum(xs * us))
        regs[i] = float(us.sum(axis=0).max() - played)
        d2 = diameter(xs.shape[1]) ** 2
        drift = float(np.sum((trajectory.us_w[i] - us) ** 2))
        bounds[i] = (
            3.0 * lips * d2
            - float(np.sum(gaps[:, i] ** 2)) / (8.0 * lips * d2)
            + 0.5 * trajectory.eta * drift
        )
    excess = float(np.max(trajectory.residuals - trajectory.tolerances))
    return CgdAudit(bounds - regs, regs, bounds, excess)


def utility_norm_bound(game: Game, i: int) -> float:
    """B_i: any number dominating ||u_i(x_-i)||_2; sqrt(|A_i|) times the
    recorded utility magnitude does."""
    return math.sqrt(game.actions[i]) * max_abs_utility(game)


# ---------------------------------------------------------------------------
# Averaged play


def avg_cce_gap(game: Game, trajectory: Trajectory) -> float:
    """Incentive gap of the uniform average of played profiles: the largest
    per-player average regret, clamped at zero."""
    report = regrets(game, trajectory)
    return max(0.0, float(report.regrets.max() / trajectory.steps))


def welfare_trace(game: Game, trajectory: Trajectory):
    """Per-step social welfare and its running average."""
    if game.n != trajectory.n:
        raise ValueError("trajectory does not match the game's shape")
    sw = _played_utilities(trajectory).sum(axis=0)
    running = np.cumsum(sw) / np.arange(1, trajectory.steps + 1)
    return sw, running


def diagonal_mass(game: Game, trajectory: Trajectory) -> np.ndarray:
    """Probability the first two players land on the same action index."""
    if game.actions[0] != game.actions[1]:
        raise ValueError(
            f"diagonal mass needs matching action counts for players 1 and 2, "
            f"got {game.actions[0]} and {game.actions[1]}"
        )
    return np.sum(trajectory.xs[0] * trajectory.xs[1], axis=1)


def running_sum_regret(trajectory: Trajectory) -> np.ndarray:
    """Sum over players of the regret accumulated through each step."""
    T = trajectory.steps
    total = np.zeros(T)
    for i in range(trajectory.n):
        cum_us = np.cumsum(trajectory.us[i], axis=0)
        cum_played = np.cumsum(np.sum(trajectory.xs[i] * trajectory.us[i], axis=1))
        total += cum_us.max(axis=1) - cum_played
    return total


def metrics_to_csv(game: Game, trajectory: Trajectory, path: str | os.PathLike) -> None:
    """Per-step scalar traces: t, negap, sw, sw_running_avg, diag_mass,
    sum_regret. The diagonal column is left blank when players 1 and 2 have
    different action counts."""
    T = trajectory.steps
    has_diag = game.actions[0] == game.actions[1] if game.n >= 2 else False
    if T:
        gaps = negap_trace(trajectory)
        sw, running = welfare_trace(game, trajectory)
        diag = diagonal_mass(game, trajectory) if has_diag else None
        sum_reg = running_sum_regret(trajectory)
    tmp = str(path) + ".tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "negap", "sw", "sw_running_avg", "diag_mass", "sum_regret"])
        for t in range(T):
            writer.writerow(
                [
                    str(t + 1),
                    repr(float(gaps[t])),
                    repr(float(sw[t])),
                    repr(float(running[t])),
                    repr(float(diag[t])) if diag is not None else "",
                    repr(float(sum_reg[t])),
                ]
            )
    os.replace(tmp, path)
