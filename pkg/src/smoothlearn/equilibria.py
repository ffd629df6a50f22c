"""Exact equilibrium enumeration at desk scale and efficiency ratios.

Pure equilibria fall out of a tensor argmax scan for any player count. Mixed
equilibria are enumerated for two-player games by walking equal-size support
pairs and solving the indifference systems; every candidate must re-verify a
best-response gap below 1e-8 before it counts. Efficiency ratios divide the
worst (or best) equilibrium welfare by the optimum, optionally widening the
candidate set to a grid of approximate equilibria.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EnumerationTooLarge, SmoothlearnError
from .games import Game, optimal_welfare, pure_profile, social_welfare
from .metrics import ne_gap

_NE_TOL = 1e-8
_PURE_TOL = 1e-9


class UndeterminedRatio(SmoothlearnError):
    """No equilibrium could be enumerated, so the ratio has no value."""


@dataclass
class Equilibrium:
    profile: list[np.ndarray]
    welfare: float
    negap: float


@dataclass
class EquilibriumSet:
    members: list[Equilibrium] = field(default_factory=list)
    degenerate: bool = False  # a rank-deficient support system was hit

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def welfares(self) -> list[float]:
        return [e.welfare for e in self.members]


def _verified(game: Game, profile) -> Equilibrium | None:
    report = ne_gap(game, profile)
    if report.negap > _NE_TOL:
        return None
    return Equilibrium(profile, social_welfare(game, profile), report.negap)


def pure_nash(game: Game, cap: int | None = None) -> EquilibriumSet:
    """All pure profiles from which no player gains by a pure deviation."""
    g = game.to_normal_form(cap)
    g.check_cap(cap)
    mask = np.ones(tuple(g.actions), dtype=bool)
    for i in range(g.n):
        best = g.utilities[i].max(axis=i, keepdims=True)
        mask &= g.utilities[i] >= best - _PURE_TOL
    out = EquilibriumSet()
    for idx in np.argwhere(mask):
        a = tuple(int(v) for v in idx)
        eq = _verified(g, pure_profile(g, a))
        if eq is not None:
            out.members.append(eq)
    return out


def _indifference_solution(payoff: np.ndarray):
    """Solve for the (column) mixture making the row side indifferent.

    payoff is the k x k submatrix; unknowns are the k mixture weights and the
    common value. Returns (mixture, rank_deficient).
    """
    k = payoff.shape[0]
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = payoff
    system[:k, k] = -1.0
    system[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    solution, residual, rank, _ = np.linalg.lstsq(system, rhs, rcond=None)
    deficient = rank < k + 1
    if not deficient:
        return solution[:k], False
    # Inconsistent system: no solution on this support at all.
    if np.linalg.norm(system @ solution - rhs) > 1e-7:
        return None, True
    return solution[:k], True


def bimatrix_nash(game: Game) -> EquilibriumSet:
    """Support enumeration over equal-size supports for two-player games.

    Finds every equilibrium of a nondegenerate game; rank-deficient
    indifference systems (equilibrium continua) are flagged and contribute a
    representative point when one validates.
    """
    g = game.to_normal_form()
    if g.n != 2:
        raise ValueError("support enumeration needs exactly two players")
    if max(g.actions) > 5:
        raise EnumerationTooLarge(max(g.actions), 5)
    a_mat, b_mat = g.utilities
    m, n = g.actions
    out = EquilibriumSet()
    seen: set[tuple] = set()
    for k in range(1, min(m, n) + 1):
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                if k == 1:
                    x = np.zeros(m)
                    x[rows[0]] = 1.0
                    y = np.zeros(n)
                    y[cols[0]] = 1.0
                else:
                    sub_a = a_mat[np.ix_(rows, cols)]
                    sub_b = b_mat[np.ix_(rows, cols)]
                    y_sub, y_deficient = _indifference_solution(sub_a)
                    x_sub, x_deficient = _indifference_solution(sub_b.T)
                    if y_deficient or x_deficient:
                        out.degenerate = True
                    if y_sub is None or x_sub is None:
                        continue
                    if y_sub.min() < -1e-9 or x_sub.min() < -1e-9:
                        continue
                    x = np.zeros(m)
                    x[list(rows)] = np.clip(x_sub, 0.0, None)
                    x /= x.sum()
                    y = np.zeros(n)
                    y[list(cols)] = np.clip(y_sub, 0.0, None)
                    y /= y.sum()
                eq = _verified(g, [x, y])
                if eq is None:
                    continue
                key = tuple(np.round(np.concatenate([x, y]), 9))
                if key not in seen:
                    seen.add(key)
                    out.members.append(eq)
    return out


def enumerate_equilibria(game: Game, cap: int | None = None) -> EquilibriumSet:
    """The enumeration that applies: support pairs for small bimatrix games,
    pure profiles otherwise."""
    if game.n == 2 and max(game.actions) <= 5:
        return bimatrix_nash(game)
    return pure_nash(game, cap)


def mixed_grid(dim: int, step: float) -> np.ndarray:
    """All distributions over ``dim`` outcomes with weights on a step grid."""
    ticks = round(1.0 / step)
    combos = itertools.combinations_with_replacement(range(ticks + 1), dim - 1)
    points = []
    for combo in combos:
        cuts = (0,) + combo + (ticks,)
        points.append([cuts[i + 1] - cuts[i] for i in range(dim)])
    return np.asarray(points, dtype=float) * step


def _grid_welfare_range(game, eps: float, step: float) -> tuple[float, float] | None:
    """Welfare range over grid profiles with equilibrium gap at most eps."""
    a_mat, b_mat = game.utilities
    x_grid = mixed_grid(game.actions[0], step)
    y_grid = mixed_grid(game.actions[1], step)
    if x_grid.shape[0] * y_grid.shape[0] > 5 * 10**7:
        raise EnumerationTooLarge(x_grid.shape[0] * y_grid.shape[0], 5 * 10**7)
    lo, hi = math.inf, -math.inf
    u2 = b_mat.T @ x_grid.T  # (n, N1): player 2's utility vector per x
    br2 = u2.max(axis=0)
    u1 = a_mat @ y_grid.T  # (m, N2)
    block = 512
    for start in range(0, x_grid.shape[0], block):
        xs = x_grid[start : start + block]
        played1 = xs @ u1  # (B, N2)
        gap1 = u1.max(axis=0)[None, :] - played1
        played2 = (y_grid @ u2[:, start : start + block]).T  # (B, N2)
        gap2 = br2[start : start + block, None] - played2
        sw = played1 + played2
        mask = np.maximum(gap1, gap2) <= eps + 1e-12
        if np.any(mask):
            vals = sw[mask]
            lo = min(lo, float(vals.min()))
            hi = max(hi, float(vals.max()))
    if lo == math.inf:
        return None
    return lo, hi


def poa(
    game: Game,
    mode: str = "worst",
    eps: float | None = None,
    grid_step: float = 0.02,
    cap: int | None = None,
) -> float:
    """Equilibrium welfare over optimal welfare.

    ``mode`` picks the worst or the best equilibrium; both are exposed
    because the ratio is quoted both ways in the literature. With ``eps``
    set, approximate equilibria from a grid (two-player games only) join the
    exact ones.
    """
    if mode not in ("worst", "best"):
        raise ValueError(f"mode must be 'worst' or 'best', got {mode!r}")
    opt, _ = optimal_welfare(game, cap)
    if opt <= 0:
        raise ValueError("ratios need a positive optimal welfare")
    eqs = enumerate_equilibria(game, cap)
    welfares = eqs.welfares()
    if eps is not None:
        if game.n != 2:
            raise ValueError("approximate-equilibrium grids are bimatrix-only")
        grid_range = _grid_welfare_range(game.to_normal_form(cap), eps, grid_step)
        if grid_range is not None:
            welfares.extend(grid_range)
    if not welfares:
        raise UndeterminedRatio(
            "undetermined: the enumerable equilibrium set is empty"
        )
    value = min(welfares) if mode == "worst" else max(welfares)
    return value / opt
