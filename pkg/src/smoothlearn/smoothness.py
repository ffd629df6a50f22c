"""LP-certified smoothness analysis.

A game is (lam, mu)-smooth when some welfare-maximizing profile a* makes the
unilateral-deviation welfare sum dominate lam * OPT - mu * SW(a) at every
profile a; multilinearity lets all checks run over pure profiles only. The
robust efficiency ratio rho = lam / (1 + mu) is the best such ratio and is
computed here by linear programming, in a uniform-weight and a per-player
weighted variant, along with the variational feasibility certificate
(a profile x* whose deviation welfare dominates SW everywhere) and the
horizon formulas that turn certified ratios into iteration counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationTooLarge
from .games import Game, lipschitz_bound, optimal_welfare, sensitivity, welfare_tensor
from .geometry import diameter, product_diameter
from .lp import LinearProgram, solve
from .metrics import utility_norm_bound

_Z_TOL = 1e-9
_CONSTRAINT_TOL = 1e-7


@dataclass
class SmoothnessCertificate:
    """Outcome of the efficiency-ratio LP at a reference pure profile.

    ``z`` is the scalar dual weight of the uniform program or the weight
    vector of the per-player program. When the only optimal solutions force
    z to zero the ratio carries no finite smoothness pair, which is flagged
    as degenerate; otherwise lam and mu record the conversion through
    z = 1 / (1 + mu).
    """

    rho: float
    z: float | np.ndarray
    a_star: tuple[int, ...]
    z_min: float
    flagged_degenerate: bool
    lam: float | None = None
    mu: float | None = None

    def to_dict(self) -> dict:
        out = {
            "lambda": self.lam,
            "mu": self.mu,
            "rho": self.rho,
            "a_star": list(self.a_star),
            "z_min": self.z_min,
            "flagged_degenerate": self.flagged_degenerate,
        }
        if np.ndim(self.z) == 0:
            out["z"] = float(self.z)
        else:
            out["z_i"] = [float(v) for v in self.z]
        return out


@dataclass
class MintyCertificate:
    profile: list[np.ndarray]
    worst_slack: float  # min over pure a of deviation welfare minus SW(a)


# ---------------------------------------------------------------------------
# Shared pure-profile machinery


def _dense(game: Game, cap: int | None):
    g = game.to_normal_form(cap)
    g.check_cap(cap)
    return g


def _deviation_tensor(g, i: int, a_star_i: int) -> np.ndarray:
    """u_i(a*_i, a_-i) as a tensor over full profiles a (own axis inert)."""
    sliced = np.take(g.utilities[i], a_star_i, axis=i)
    return np.broadcast_to(np.expand_dims(sliced, axis=i), g.utilities[i].shape)


def _deviation_sum(g, a_star) -> np.ndarray:
    total = np.zeros(tuple(g.actions))
    for i in range(g.n):
        total = total + _deviation_tensor(g, i, a_star[i])
    return total


def is_smooth(game: Game, lam: float, mu: float, cap: int | None = None):
    """Does some welfare-maximizing pure profile witness (lam, mu)-smoothness?

    Returns (True, None) or (False, worst violating pure profile). All tied
    maximizers are tried; pure profiles suffice by multilinearity.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if mu <= -1:
        raise ValueError("mu must exceed -1")
    g = _dense(game, cap)
    sw = welfare_tensor(g)
    opt, ties = optimal_welfare(g)
    best_slack = -math.inf
    witness = None
    for a_star in ties:
        slack = _deviation_sum(g, a_star) + mu * sw - lam * opt
        worst = float(slack.min())
        if worst > best_slack:
            best_slack = worst
            witness = tuple(
                int(v) for v in np.unravel_index(int(slack.argmin()), slack.shape)
            )
    if best_slack >= -_CONSTRAINT_TOL:
        return True, None
    return False, witness


# ---------------------------------------------------------------------------
# Efficiency-ratio programs


def rpoa(game: Game, z_min: float = 0.0, cap: int | None = None) -> SmoothnessCertificate:
    """Best efficiency ratio certifiable with one shared dual weight.

    maximize rho subject to z * (deviation welfare gain at a) >=
    rho * OPT - SW(a) for every pure a and z >= z_min. Tied welfare
    maximizers all compete; the highest ratio wins. A second solve pushes z
    as large as possible (capped at max(1, attained z)) at the optimal ratio,
    so z = 0 is reported only when the ratio genuinely forces it; that case
    carries unbounded smoothness parameters and is flagged.
    """
    if z_min < 0:
        raise ValueError("z_min must be nonnegative")
    g = _dense(game, cap)
    sw = welfare_tensor(g).ravel()
    opt, ties = optimal_welfare(g)

    best = None
    for a_star in ties:
        gain = (_deviation_sum(g, a_star).ravel() - sw)
        # variables (rho, z): rho * OPT - z * gain(a) <= SW(a)
        rows = np.column_stack([np.full(sw.size, opt), -gain])
        lp = LinearProgram(
            [1.0, 0.0], rows, sw, lower=[-np.inf, z_min], upper=[np.inf, np.inf]
        )
        sol = solve(lp)
        if not sol.optimal:  # pragma: no cover - the a = a* row bounds rho
            continue
        rho_star, z_attained = float(sol.y[0]), float(sol.y[1])
        if best is None or rho_star > best[0]:
            best = (rho_star, z_attained, a_star, rows, gain)
    if best is None:  # pragma: no cover
        raise EnumerationTooLarge(0, 0)
    rho_star, z_attained, a_star, rows, gain = best

    # Canonicalize z: the largest weight compatible with the attained ratio
    # (anchored just below it so the second program is surely feasible).
    anchor = np.vstack([rows, [-opt, 0.0]])
    rhs = np.append(sw, -(rho_star - 1e-12) * opt)
    cap_z = max(1.0, z_attained, z_min)
    sol_z = solve(
        LinearProgram(
            [0.0, 1.0], anchor, rhs, lower=[-np.inf, z_min], upper=[np.inf, cap_z]
        )
    )
    z_star = float(sol_z.y[1]) if sol_z.optimal else z_attained
    degenerate = z_star <= _Z_TOL
    lam = mu = None
    if not degenerate and rho_star > _Z_TOL:
        lam = rho_star / z_star
        mu = 1.0 / z_star - 1.0
    return SmoothnessCertificate(
        rho=rho_star,
        z=z_star,
        a_star=a_star,
        z_min=z_min,
        flagged_degenerate=degenerate,
        lam=lam,
        mu=mu,
    )


def weighted_rpoa(
    game: Game,
    ratio_bound: float | None = None,
    z_floor: float | None = None,
    cap: int | None = None,
) -> SmoothnessCertificate:
    """Per-player-weight variant of the efficiency-ratio program.

    maximize rho subject to sum_i z_i * (player i's deviation gain at a) >=
    rho * OPT - SW(a) for all pure a, z_i >= 0 (or z_floor). An optional
    pairwise cap z_i <= ratio_bound * z_j keeps the weights comparable.
    """
    if ratio_bound is not None and ratio_bound < 1:
        raise ValueError("ratio_bound must be at least 1")
    g = _dense(game, cap)
    sw = welfare_tensor(g).ravel()
    opt, ties = optimal_welfare(g)
    n = g.n
    floor = max(0.0, z_floor if z_floor is not None else 0.0)

    ratio_rows = []
    if ratio_bound is not None:
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                row = np.zeros(n + 1)
                row[1 + i] = 1.0
                row[1 + j] = -ratio_bound
                ratio_rows.append(row)

    best = None
    for a_star in ties:
        gains = [
            (_deviation_tensor(g, i, a_star[i]) - g.utilities[i]).ravel()
            for i in range(n)
        ]
        rows = np.column_stack([np.full(sw.size, opt)] + [-gi for gi in gains])
        if ratio_rows:
            rows = np.vstack([rows] + [r.reshape(1, -1) for r in ratio_rows])
        rhs = np.concatenate([sw, np.zeros(len(ratio_rows))])
        lower = np.array([-np.inf] + [floor] * n)
        sol = solve(LinearProgram([1.0] + [0.0] * n, rows, rhs, lower=lower))
        if not sol.optimal:  # pragma: no cover
            continue
        if best is None or float(sol.y[0]) > best[0]:
            best = (float(sol.y[0]), np.array(sol.y[1:]), a_star)
    if best is None:  # pragma: no cover
        raise EnumerationTooLarge(0, 0)
    rho_star, z_vec, a_star = best
    return SmoothnessCertificate(
        rho=rho_star,
        z=z_vec,
        a_star=a_star,
        z_min=floor,
        flagged_degenerate=bool(np.max(z_vec, initial=0.0) <= _Z_TOL),
    )


def verify_certificate(game: Game, cert: SmoothnessCertificate, cap: int | None = None) -> float:
    """Worst constraint slack of a certificate over all pure profiles;
    sound certificates come back >= -1e-7."""
    g = _dense(game, cap)
    sw = welfare_tensor(g).ravel()
    opt, _ = optimal_welfare(g)
    if np.ndim(cert.z) == 0:
        gain = (_deviation_sum(g, cert.a_star).ravel() - sw)
        slack = float(cert.z) * gain - cert.rho * opt + sw
    else:
        slack = -cert.rho * opt + sw
        for i in range(g.n):
            gain_i = (_deviation_tensor(g, i, cert.a_star[i]) - g.utilities[i]).ravel()
            slack = slack + cert.z[i] * gain_i
    return float(slack.min())


# ---------------------------------------------------------------------------
# Variational feasibility certificate


def minty_certificate(game: Game, cap: int | None = None) -> MintyCertificate | None:
    """Search for a mixed profile whose deviation welfare dominates SW
    pointwise: sum_i <x*_i, u_i(., a_-i)> >= SW(a) for every pure a.

    Pure a suffice because the slack is multilinear in a. Solved by
    maximizing the worst slack s; feasible precisely when the optimum is
    nonnegative (up to 1e-9), in which case the maximizing profile is
    returned with its re-verified worst slack.
    """
    g = _dense(game, cap)
    shape = tuple(g.actions)
    cells = int(np.prod(shape))
    sw = welfare_tensor(g).ravel()
    dims = g.actions
    nvars = 1 + sum(dims)  # s, then the stacked profile blocks

    blocks = []
    for i in range(g.n):
        t = np.moveaxis(g.utilities[i], i, -1)  # (A_-i ..., d_i)
        t = np.expand_dims(t, axis=i)
        t = np.broadcast_to(t, shape + (dims[i],))
        blocks.append(t.reshape(cells, dims[i]))
    coeff = np.hstack([np.ones((cells, 1)), -np.hstack(blocks)])

    rows = [coeff]
    rhs = [-sw]
    offset = 1
    for i in range(g.n):
        row = np.zeros(nvars)
        row[offset : offset + dims[i]] = 1.0
        rows.append(row.reshape(1, -1))
        rhs.append(np.array([1.0]))
        rows.append(-row.reshape(1, -1))
        rhs.append(np.array([-1.0]))
        offset += dims[i]
    lower = np.concatenate([[-np.inf], np.zeros(nvars - 1)])
    objective = np.zeros(nvars)
    objective[0] = 1.0
    sol = solve(LinearProgram(objective, np.vstack(rows), np.concatenate(rhs), lower=lower))
    if not sol.optimal or sol.y[0] < -1e-9:
        return None
    profile = []
    offset = 1
    for i in range(g.n):
        x = np.clip(sol.y[offset : offset + dims[i]], 0.0, None)
        profile.append(x / x.sum())
        offset += dims[i]
    slack = -sw.copy()
    for i in range(g.n):
        slack = slack + blocks[i] @ profile[i]
    return MintyCertificate(profile, float(slack.min()))


def verify_minty(game: Game, cert: MintyCertificate, cap: int | None = None) -> float:
    """Brute-force recomputation of a certificate's worst slack."""
    g = _dense(game, cap)
    worst = math.inf
    sw = welfare_tensor(g)
    for a in np.ndindex(*g.actions):
        dev = 0.0
        for i in range(g.n):
            sel = [slice(None) if j == i else a[j] for j in range(g.n)]
            dev += float(np.dot(cert.profile[i], g.utilities[i][tuple(sel)]))
        worst = min(worst, dev - float(sw[a]))
    return worst


# ---------------------------------------------------------------------------
# Horizon formulas


def horizon(game: Game, eps_n: float, mu: float, eta: float) -> int:
    """Iterations after which the best iterate meets the shortfall-driven
    gap bound: D_X^2 / (2 eta eps (1 + mu) OPT), rounded up."""
    if eps_n <= 0:
        raise ValueError(
            "horizon needs eps_n > 0; for the exact-ratio case use "
            "brgap_bound with an explicit T"
        )
    opt, _ = optimal_welfare(game)
    dx2 = product_diameter(game.actions) ** 2
    return math.ceil(dx2 / (2.0 * eta * eps_n * (1.0 + mu) * opt))


def brgap_bound(
    game: Game, eps_n: float, mu: float, eta: float, steps: int | None = None
) -> float:
    """Guaranteed bound on the best iterate's summed squared gaps.

    For eps_n > 0 this is the shortfall form
    32 (max_i D_i^2 / eta^2 + max_i B_i^2) * eta * eps_n * (1 + mu) * OPT;
    for eps_n <= 0 the decay form (8 / T)(same constant) * D_X^2, which
    needs the horizon T.
    """
    const = max(diameter(d) ** 2 for d in game.actions) / eta**2 + max(
        utility_norm_bound(game, i) ** 2 for i in range(game.n)
    )
    if eps_n > 0:
        opt, _ = optimal_welfare(game)
        return 32.0 * const * eta * eps_n * (1.0 + mu) * opt
    if steps is None or steps <= 0:
        raise ValueError("the exact-ratio branch needs a positive step count")
    return (8.0 / steps) * const * product_diameter(game.actions) ** 2


def sensitivity_horizon(game: Game, eta: float | None = None):
    """Horizon and gap bound driven by the game's strategic sensitivity.

    When unilateral opponent deviations move any utility by at most eps, the
    regret sum is bounded below by -T n eps, which yields the horizon
    T = D_X^2 / (2 eta n eps) and the best-iterate bound
    4 (max_i D_i^2 / eta^2 + max_i B_i^2)(2 D_X^2 / T + 4 eta n eps).
    Returns (T, bound, eps); eta defaults to 1/(4 L).
    """
    eps = sensitivity(game)
    if eps <= 0:
        raise ValueError("the game has zero sensitivity; any profile works")
    if eta is None:
        eta = 1.0 / (4.0 * lipschitz_bound(game))
    dx2 = product_diameter(game.actions) ** 2
    steps = math.ceil(dx2 / (2.0 * eta * game.n * eps))
    const = max(diameter(d) ** 2 for d in game.actions) / eta**2 + max(
        utility_norm_bound(game, i) ** 2 for i in range(game.n)
    )
    bound = 4.0 * const * (2.0 * dx2 / steps + 4.0 * eta * game.n * eps)
    return steps, bound, eps


def cgd_min_horizon(game: Game, eps0: float, lipschitz: float | None = None) -> int:
    """Step count gate for the anchored method's welfare guarantee:
    64 L^2 D_X^4 / eps0^2."""
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    lips = lipschitz_bound(game) if lipschitz is None else lipschitz
    dx = product_diameter(game.actions)
    return math.ceil(64.0 * lips**2 * dx**4 / eps0**2)


def cgd_cce_bound(game: Game, steps: int, lipschitz: float | None = None) -> float:
    """Averaged-play incentive gap guaranteed after ``steps`` anchored
    rounds: 4 L D_X^2 / T."""
    lips = lipschitz_bound(game) if lipschitz is None else lipschitz
    return 4.0 * lips * product_diameter(game.actions) ** 2 / steps
