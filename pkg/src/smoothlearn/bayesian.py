"""Finite incomplete-information games and their agent-form reduction.

Types are finite with uniform priors (non-uniform rational priors can be
reduced to uniform by duplicating types). The agent form turns each
(player, type) pair into its own complete-information player whose utility is
the original expected utility on the event that nature drew that type; gaps
and equilibria transfer between the two views with a |V_i| rescaling.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EnumerationTooLarge
from .games import DEFAULT_ENUMERATION_CAP, NormalFormGame


@dataclass
class BayesianGame:
    """Per-player utility tensors indexed by (own type, joint action).

    ``utilities[i]`` has shape ``(|V_i|, |A_1|, ..., |A_n|)`` and must be
    nonnegative, as must the optional principal revenue ``revenue`` over
    joint actions (it enters welfare accounting only, never incentives).
    """

    types: list[int]
    actions: list[int]
    utilities: list[np.ndarray]
    revenue: np.ndarray | None = None
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self):
        self.types = [int(v) for v in self.types]
        self.actions = [int(a) for a in self.actions]
        if len(self.types) != len(self.actions):
            raise ValueError("need one type count and one action count per player")
        shape = tuple(self.actions)
        tensors = []
        for i, u in enumerate(self.utilities):
            u = np.asarray(u, dtype=float)
            if u.shape != (self.types[i],) + shape:
                raise ValueError(
                    f"player {i}: utility shape {u.shape} != {(self.types[i],) + shape}"
                )
            if not np.all(np.isfinite(u)) or u.min() < 0:
                raise ValueError(f"player {i}: utilities must be finite and >= 0")
            tensors.append(u)
        self.utilities = tensors
        if self.revenue is not None:
            r = np.asarray(self.revenue, dtype=float)
            if r.shape != shape or not np.all(np.isfinite(r)) or r.min() < 0:
                raise ValueError("revenue must be a finite nonnegative action tensor")
            self.revenue = r

    @property
    def n(self) -> int:
        return len(self.types)


def agent_index(bg: BayesianGame) -> list[tuple[int, int]]:
    """Agent ordering: (player, type) pairs grouped by player."""
    return [(i, v) for i in range(bg.n) for v in range(bg.types[i])]


def agent_form(bg: BayesianGame, cap: int | None = None) -> NormalFormGame:
    """Complete-information game with one agent per (player, type).

    Under a joint agent profile, nature's type draw selects which agent acts
    for each player; an agent's utility is the original player's expected
    utility carrying the indicator of its own type, so summing a player's
    agents recovers the player's unconditional expectation.
    """
    cap = bg.enumeration_cap if cap is None else cap
    agents = agent_index(bg)
    offsets = np.cumsum([0] + [bg.types[i] for i in range(bg.n)])
    shape = tuple(bg.actions[i] for (i, _) in agents)
    cells = 1
    for s in shape:
        cells *= s
    type_cells = 1
    for v in bg.types:
        type_cells *= v
    base_cells = 1
    for a in bg.actions:
        base_cells *= a
    if type_cells * base_cells > cap or cells > cap:
        raise EnumerationTooLarge(max(type_cells * base_cells, cells), cap)

    total_draws = float(type_cells)
    tensors = []
    for i, vi in agents:
        acc = np.zeros(shape)
        base = bg.utilities[i][vi]
        other_types = [range(bg.types[j]) for j in range(bg.n) if j != i]
        for rest in itertools.product(*other_types):
            draw = list(rest[:i]) + [vi] + list(rest[i:])
            expand = [1] * len(agents)
            for j in range(bg.n):
                expand[offsets[j] + draw[j]] = bg.actions[j]
            acc += base.reshape(expand)
        tensors.append(acc / total_draws)
    return NormalFormGame(tensors, enumeration_cap=cap)


def with_uniform_priors(bg: BayesianGame, weights) -> BayesianGame:
    """Reduce integer-weighted type priors to the uniform model by
    duplicating each type ``weights[i][v]`` times.

    Exact for rational priors once scaled to integers; priors with large
    denominators blow up the type counts, which is this model's documented
    limitation.
    """
    if len(weights) != bg.n:
        raise ValueError("need one weight vector per player")
    new_types = []
    new_utilities = []
    for i, w in enumerate(weights):
        w = [int(v) for v in w]
        if len(w) != bg.types[i] or any(v < 1 for v in w):
            raise ValueError(
                f"player {i}: weights must be positive integers, one per type"
            )
        rows = [bg.utilities[i][v] for v in range(bg.types[i]) for _ in range(w[v])]
        new_types.append(len(rows))
        new_utilities.append(np.stack(rows))
    return BayesianGame(
        new_types, bg.actions, new_utilities, bg.revenue, bg.enumeration_cap
    )


def check_bayes_strategy(bg: BayesianGame, strategy) -> list[np.ndarray]:
    """One simplex row per (player, type); returns validated float copies."""
    if len(strategy) != bg.n:
        raise DimensionMismatch(0, bg.n, len(strategy))
    out = []
    for i, rows in enumerate(strategy):
        rows = np.asarray(rows, dtype=float)
        if rows.shape != (bg.types[i], bg.actions[i]):
            raise ValueError(
                f"player {i}: strategy shape {rows.shape} != "
                f"{(bg.types[i], bg.actions[i])}"
            )
        if rows.min() < -1e-12 or np.abs(rows.sum(axis=1) - 1.0).max() > 1e-9:
            raise ValueError(f"player {i}: rows must be distributions")
        out.append(np.clip(rows, 0.0, None))
    return out


def bne_gap(bg: BayesianGame, strategy) -> list[np.ndarray]:
    """Per-(player, type) best-response gaps against the type-averaged play.

    Entry v_i of list element i is the gain player i of type v_i forgoes by
    not best responding to the opponents' type-averaged mixed behavior. Equals
    |V_i| times the corresponding agent's gap in the agent form.
    """
    strategy = check_bayes_strategy(bg, strategy)
    gaps = []
    for i in range(bg.n):
        gi = np.zeros(bg.types[i])
        other_types = [range(bg.types[j]) for j in range(bg.n) if j != i]
        scale = 1.0
        for j in range(bg.n):
            if j != i:
                scale /= bg.types[j]
        for vi in range(bg.types[i]):
            avg = np.zeros(bg.actions[i])
            for rest in itertools.product(*other_types):
                draw = list(rest[:i]) + [vi] + list(rest[i:])
                u = bg.utilities[i][vi]
                for j in range(bg.n - 1, -1, -1):
                    if j == i:
                        continue
                    u = np.tensordot(u, strategy[j][draw[j]], axes=([j], [0]))
                avg += u
            avg *= scale
            gi[vi] = max(0.0, float(avg.max() - np.dot(strategy[i][vi], avg)))
        gaps.append(gi)
    return gaps


def flatten_to_agent_profile(bg: BayesianGame, strategy) -> list[np.ndarray]:
    """The agent-form mixed profile induced by a type-indexed strategy."""
    strategy = check_bayes_strategy(bg, strategy)
    return [strategy[i][v].copy() for (i, v) in agent_index(bg)]


def mechanism_efficiency_ratio(lam: float, mu: float) -> float:
    """lam / max(1, mu): the efficiency ratio convention for mechanisms.

    Distinct from the game-smoothness ratio lam / (1 + mu); the two must
    never be conflated when moving between the views.
    """
    return lam / max(1.0, mu)


# ---------------------------------------------------------------------------
# File format


def bayesian_to_dict(bg: BayesianGame) -> dict:
    out = {
        "kind": "bayesian",
        "players": bg.n,
        "types": list(bg.types),
        "actions": list(bg.actions),
        "utilities": [u.ravel().tolist() for u in bg.utilities],
    }
    if bg.revenue is not None:
        out["revenue"] = bg.revenue.ravel().tolist()
    return out


def bayesian_from_dict(data: dict) -> BayesianGame:
    n = int(data["players"])
    types = [int(v) for v in data["types"]]
    actions = [int(a) for a in data["actions"]]
    if len(types) != n or len(actions) != n:
        raise ValueError("'types' and 'actions' must list one entry per player")
    shape = tuple(actions)
    utilities = [
        np.asarray(flat, dtype=float).reshape((types[i],) + shape)
        for i, flat in enumerate(data["utilities"])
    ]
    revenue = None
    if data.get("revenue") is not None:
        revenue = np.asarray(data["revenue"], dtype=float).reshape(shape)
    return BayesianGame(types, actions, utilities, revenue)


def save_bayesian(bg: BayesianGame, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(bayesian_to_dict(bg), fh)
        fh.write("\n")


def load_bayesian(path: str | os.PathLike) -> BayesianGame:
    with open(path) as fh:
        return bayesian_from_dict(json.load(fh))
