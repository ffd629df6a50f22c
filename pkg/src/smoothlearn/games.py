"""Game representations and game-level quantities.

Three concrete backings share one informal interface (``n``, ``actions``,
``utility_vector``, ``to_normal_form``): dense normal-form tensors, polymatrix
games over a directed edge set, and graphical games with bounded-degree
neighborhoods. Player utilities are multilinear: fixing everyone else's mixed
strategy, player i's expected utility is linear in x_i, with gradient
``utility_vector(i, x)``. Stacking those gradients gives the game operator F,
which drives all the learning dynamics.
"""

from __future__ import annotations

import json
import os
import warnings

import numpy as np

from .errors import DimensionMismatch, EnumerationTooLarge

DEFAULT_ENUMERATION_CAP = 10**7

# Tie tolerance when collecting welfare-maximizing pure profiles.
_TIE_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


def _check_range(arrays) -> tuple[float, float]:
    lo = min(float(a.min()) for a in arrays)
    hi = max(float(a.max()) for a in arrays)
    if lo < -1.0 - 1e-12 or hi > 1.0 + 1e-12:
        warnings.warn(
            f"utilities span [{lo:g}, {hi:g}], outside the customary [-1, 1]; "
            "range is recorded and bounds scale accordingly",
            stacklevel=3,
        )
    return lo, hi


class NormalFormGame:
    """n-player game given by one dense utility tensor per player.

    ``utilities[i]`` has shape ``(|A_1|, ..., |A_n|)``; entry ``a`` is player
    i's payoff under the pure joint action ``a``. Tensors are validated to be
    finite and frozen after construction, so instances are safe to share.
    """

    kind = "normal"

    def __init__(self, utilities, enumeration_cap: int = DEFAULT_ENUMERATION_CAP):
        tensors = [np.asarray(u, dtype=float) for u in utilities]
        if not tensors:
            raise ValueError("a game needs at least one player")
        shape = tensors[0].shape
        if len(shape) != len(tensors):
            raise ValueError(
                f"{len(tensors)} players but tensors have {len(shape)} axes"
            )
        for i, u in enumerate(tensors):
            if u.shape != shape:
                raise ValueError(f"player {i}: tensor shape {u.shape} != {shape}")
            if not np.all(np.isfinite(u)):
                raise ValueError(f"player {i}: utilities must be finite")
        self.n = len(tensors)
        self.actions = list(shape)
        self.utilities = tuple(_freeze(u) for u in tensors)
        self.enumeration_cap = enumeration_cap
        self.utility_range = _check_range(self.utilities)
        # Per-player tensor with the own axis first and opponents ascending,
        # built lazily; lets utility_vector contract via plain matmuls.
        self._own_first: dict[int, np.ndarray] = {}

    @classmethod
    def from_bimatrix(cls, a, b, **kw) -> "NormalFormGame":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.shape != b.shape or a.ndim != 2:
            raise ValueError("bimatrix payoffs must be two matrices of equal shape")
        return cls([a, b], **kw)

    @property
    def max_abs_utility(self) -> float:
        lo, hi = self.utility_range
        return max(abs(lo), abs(hi))

    def num_cells(self) -> int:
        cells = 1
        for a in self.actions:
            cells *= a
        return cells

    def check_cap(self, cap: int | None = None) -> None:
        cap = self.enumeration_cap if cap is None else cap
        if self.num_cells() > cap:
            raise EnumerationTooLarge(self.num_cells(), cap)

    def pure_utility(self, i: int, a) -> float:
        return float(self.utilities[i][tuple(a)])

    def utility_vector(self, i: int, profile) -> np.ndarray:
        """Expected-utility vector of player i over its own actions.

        ``profile`` is the full length-n strategy list; entry i is ignored.
        Entry a_i of the result is E[u_i(a_i, a_-i)] under the opponents'
        mixed strategies.
        """
        if len(profile) != self.n:
            raise DimensionMismatch(i, self.n, len(profile))
        if self.n == 1:
            return self.utilities[i].copy()
        u = self._own_first.get(i)
        if u is None:
            order = [i] + [j for j in range(self.n) if j != i]
            u = np.ascontiguousarray(np.transpose(self.utilities[i], order))
            self._own_first[i] = u
        # Contract opponents from the last axis inward; each step is a matmul
        # on the flattened front, ending at shape (|A_i|,).
        for j in range(self.n - 1, -1, -1):
            if j == i:
                continue
            xj = profile[j]
            if len(xj) != self.actions[j]:
                raise DimensionMismatch(j, self.actions[j], len(xj))
            u = u.reshape(-1, self.actions[j]) @ xj
        return u

    def to_normal_form(self, cap: int | None = None) -> "NormalFormGame":
        return self


class PolymatrixGame:
    """Pairwise-separable game over a directed edge set.

    Player i's utility is the 1/n-scaled sum, over its out-edges (i, j), of
    the bilinear form x_i^T M_(i,j) x_j. The scaling keeps utilities bounded
    independently of the number of players.
    """

    kind = "polymatrix"

    def __init__(self, actions, edges, enumeration_cap: int = DEFAULT_ENUMERATION_CAP):
        self.actions = [int(a) for a in actions]
        self.n = len(self.actions)
        self.edges: dict[tuple[int, int], np.ndarray] = {}
        for (i, j), m in dict(edges).items():
            if i == j or not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"bad edge ({i}, {j})")
            m = np.asarray(m, dtype=float)
            if m.shape != (self.actions[i], self.actions[j]):
                raise ValueError(
                    f"edge ({i}, {j}): matrix shape {m.shape} != "
                    f"({self.actions[i]}, {self.actions[j]})"
                )
            if not np.all(np.isfinite(m)):
                raise ValueError(f"edge ({i}, {j}): entries must be finite")
            self.edges[(i, j)] = _freeze(m)
        self.neighbors = [
            sorted(j for (i2, j) in self.edges if i2 == i) for i in range(self.n)
        ]
        self.enumeration_cap = enumeration_cap

    def utility_vector(self, i: int, profile) -> np.ndarray:
        if len(profile) != self.n:
            raise DimensionMismatch(i, self.n, len(profile))
        out = np.zeros(self.actions[i])
        for j in self.neighbors[i]:
            xj = profile[j]
            if len(xj) != self.actions[j]:
                raise DimensionMismatch(j, self.actions[j], len(xj))
            out += self.edges[(i, j)] @ xj
        return out / self.n

    def to_normal_form(self, cap: int | None = None) -> NormalFormGame:
        cap = self.enumeration_cap if cap is None else cap
        cells = 1
        for a in self.actions:
            cells *= a
        if cells > cap:
            raise EnumerationTooLarge(cells, cap)
        shape = tuple(self.actions)
        tensors = []
        for i in range(self.n):
            t = np.zeros(shape)
            for j in self.neighbors[i]:
                m = self.edges[(i, j)]
                expand = [1] * self.n
                expand[i] = self.actions[i]
                expand[j] = self.actions[j]
                block = m if i < j else m.T
                t += block.reshape(expand)
            tensors.append(t / self.n)
        return NormalFormGame(tensors, enumeration_cap=cap)


class GraphicalGame:
    """Game whose players interact only within bounded neighborhoods.

    ``tables[i]`` has shape ``(|A_i|, |A_j1|, ..., |A_jk|)`` for the sorted
    neighborhood ``neighborhoods[i] = [j1 < ... < jk]``. The degree is the
    larger of the biggest neighborhood and the biggest influence count (how
    many other players list i as a neighbor).
    """

    kind = "graphical"

    def __init__(
        self,
        actions,
        neighborhoods,
        tables,
        enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    ):
        self.actions = [int(a) for a in actions]
        self.n = len(self.actions)
        if len(neighborhoods) != self.n or len(tables) != self.n:
            raise ValueError("need one neighborhood and one table per player")
        self.neighborhoods = []
        self.tables = []
        for i in range(self.n):
            nb = sorted(int(j) for j in neighborhoods[i])
            if i in nb or any(not 0 <= j < self.n for j in nb):
                raise ValueError(f"player {i}: invalid neighborhood {nb}")
            t = np.asarray(tables[i], dtype=float)
            want = tuple([self.actions[i]] + [self.actions[j] for j in nb])
            if t.shape != want:
                raise ValueError(
                    f"player {i}: table shape {t.shape} != {want} for "
                    f"neighborhood {nb}"
                )
            if not np.all(np.isfinite(t)):
                raise ValueError(f"player {i}: table entries must be finite")
            self.neighborhoods.append(nb)
            self.tables.append(_freeze(t))
        influence = [0] * self.n
        for nb in self.neighborhoods:
            for j in nb:
                influence[j] += 1
        self.degree = max(
            [len(nb) for nb in self.neighborhoods] + influence + [0]
        )
        self.enumeration_cap = enumeration_cap

    def utility_vector(self, i: int, profile) -> np.ndarray:
        if len(profile) != self.n:
            raise DimensionMismatch(i, self.n, len(profile))
        u = self.tables[i]
        # Contract neighbor axes from the back; axis 0 (own action) survives.
        for pos in range(len(self.neighborhoods[i]) - 1, -1, -1):
            j = self.neighborhoods[i][pos]
            xj = profile[j]
            if len(xj) != self.actions[j]:
                raise DimensionMismatch(j, self.actions[j], len(xj))
            u = np.tensordot(u, xj, axes=([pos + 1], [0]))
        return u

    def to_normal_form(self, cap: int | None = None) -> NormalFormGame:
        cap = self.enumeration_cap if cap is None else cap
        cells = 1
        for a in self.actions:
            cells *= a
        if cells > cap:
            raise EnumerationTooLarge(cells, cap)
        shape = tuple(self.actions)
        tensors = []
        for i in range(self.n):
            axes = [i] + self.neighborhoods[i]
            expand = [1] * self.n
            for j in axes:
                expand[j] = self.actions[j]
            # Reorder table axes into increasing player order, then broadcast.
            order = np.argsort(axes)
            block = np.transpose(self.tables[i], order).reshape(expand)
            tensors.append(np.broadcast_to(block, shape).copy())
        return NormalFormGame(tensors, enumeration_cap=cap)


Game = NormalFormGame | PolymatrixGame | GraphicalGame


# ---------------------------------------------------------------------------
# Mixed profiles


def check_profile(game: Game, profile, tol: float = 1e-9) -> list[np.ndarray]:
    """Validate one simplex point per player; returns float copies."""
    if len(profile) != game.n:
        raise DimensionMismatch(0, game.n, len(profile))
    out = []
    for i, x in enumerate(profile):
        x = np.asarray(x, dtype=float)
        if x.shape != (game.actions[i],):
            raise DimensionMismatch(i, game.actions[i], x.size)
        if not np.all(np.isfinite(x)):
            raise ValueError(f"player {i}: strategy has non-finite entries")
        if x.min() < -1e-12 or abs(x.sum() - 1.0) > tol:
            raise ValueError(
                f"player {i}: strategy is not a distribution "
                f"(min {x.min():g}, sum {x.sum():g})"
            )
        out.append(np.clip(x, 0.0, None))
    return out


def uniform_profile(game: Game) -> list[np.ndarray]:
    return [np.full(a, 1.0 / a) for a in game.actions]


def pure_profile(game: Game, a) -> list[np.ndarray]:
    out = []
    for i, ai in enumerate(a):
        x = np.zeros(game.actions[i])
        x[ai] = 1.0
        out.append(x)
    return out


# ---------------------------------------------------------------------------
# The game operator and welfare


def game_operator(game: Game, profile) -> list[np.ndarray]:
    """F(x): the stacked per-player utility-gradient vectors."""
    return [game.utility_vector(i, profile) for i in range(game.n)]


def social_welfare(game: Game, profile) -> float:
    """Sum of expected utilities; equals <x, F(x)> by multilinearity."""
    return float(
        sum(np.dot(profile[i], game.utility_vector(i, profile)) for i in range(game.n))
    )


def welfare_tensor(game: Game, cap: int | None = None) -> np.ndarray:
    g = game.to_normal_form(cap)
    g.check_cap(cap)
    total = np.zeros(tuple(g.actions))
    for u in g.utilities:
        total = total + u
    return total


def optimal_welfare(game: Game, cap: int | None = None):
    """Best pure social welfare and all attaining profiles.

    Multilinearity makes a pure maximizer exact for the mixed extension. Ties
    (within 1e-9) come back in lexicographic order.
    """
    sw = welfare_tensor(game, cap)
    opt = float(sw.max())
    ties = [tuple(int(v) for v in idx) for idx in np.argwhere(sw >= opt - _TIE_TOL)]
    return opt, ties


def constant_sum_value(game: Game, tol: float = 1e-9, cap: int | None = None):
    """The constant V when every pure profile has welfare V, else None."""
    sw = welfare_tensor(game, cap)
    if float(sw.max() - sw.min()) <= tol:
        return float(sw.ravel()[0])
    return None


# ---------------------------------------------------------------------------
# Structural scalars


def sensitivity(game: Game, cap: int | None = None) -> float:
    """Worst additive impact of any opponent's unilateral pure deviation.

    max over players i, pure profiles a, deviators i' != i and replacement
    actions a'_i' of |u_i(a with a_i' replaced) - u_i(a)|.
    """
    g = game.to_normal_form(cap)
    g.check_cap(cap)
    if g.n == 1:
        return 0.0
    eps = 0.0
    for i in range(g.n):
        u = g.utilities[i]
        for j in range(g.n):
            if j == i:
                continue
            spread = u.max(axis=j) - u.min(axis=j)
            eps = max(eps, float(spread.max()))
    return eps


def max_abs_utility(game: Game) -> float:
    """Cheap bound on |u_i| over pure profiles, per the backing's structure."""
    if isinstance(game, NormalFormGame):
        return game.max_abs_utility
    if isinstance(game, PolymatrixGame):
        per_player = [
            sum(float(np.abs(game.edges[(i, j)]).max()) for j in game.neighbors[i])
            / game.n
            for i in range(game.n)
        ]
        return max(per_player, default=0.0)
    return max((float(np.abs(t).max()) for t in game.tables if t.size), default=0.0)


def lipschitz_bound(game: Game) -> float:
    """Upper bound on the Lipschitz constant of the game operator.

    Picks the tightest structural bound available for the backing: spectral
    norms for polymatrix games, degree-scaled action counts for graphical
    games, and for dense normal form the smaller of the generic n*max|A_i|
    bound and the sensitivity-aware one. Clamped below at 1, the regime where
    the learning-rate recipes apply.
    """
    if isinstance(game, PolymatrixGame):
        norms = [np.linalg.norm(m, 2) for m in game.edges.values()]
        bound = max(norms) if norms else 0.0
    elif isinstance(game, GraphicalGame):
        scale = max(
            (float(np.abs(t).max()) for t in game.tables if t.size), default=0.0
        )
        bound = game.degree * max(game.actions) * scale
    else:
        scale = game.max_abs_utility
        bound = game.n * max(game.actions) * scale
        try:
            game.check_cap()
        except EnumerationTooLarge:
            pass
        else:
            bound = min(bound, sensitivity(game) * game.n * max(game.actions))
    return max(1.0, float(bound))


# ---------------------------------------------------------------------------
# Dominance elimination


def _strictly_dominated(tensor: np.ndarray, axis: int) -> list[int]:
    """Indices along ``axis`` strictly dominated by another slice."""
    m = np.moveaxis(tensor, axis, 0).reshape(tensor.shape[axis], -1)
    out = []
    for r in range(m.shape[0]):
        for s in range(m.shape[0]):
            if s != r and np.all(m[s] > m[r]):
                out.append(r)
                break
    return out


def eliminate_dominated(game: Game, cap: int | None = None):
    """Iteratively remove pure actions strictly dominated by pure actions.

    Strict dominance makes the fixpoint independent of removal order. Returns
    the reduced game, the removal log as (player, original action) pairs, and
    the surviving original action indices per player.
    """
    g = game.to_normal_form(cap)
    g.check_cap(cap)
    kept = [list(range(a)) for a in g.actions]
    log: list[tuple[int, int]] = []
    tensors = [np.asarray(u) for u in g.utilities]
    changed = True
    while changed:
        changed = False
        for i in range(g.n):
            if len(kept[i]) <= 1:
                continue
            dead = _strictly_dominated(tensors[i], i)
            if not dead:
                continue
            changed = True
            for r in sorted(dead, reverse=True):
                log.append((i, kept[i][r]))
                del kept[i][r]
            keep_idx = [k for k in range(tensors[i].shape[i]) if k not in dead]
            tensors = [np.take(t, keep_idx, axis=i) for t in tensors]
    reduced = NormalFormGame(tensors, enumeration_cap=g.enumeration_cap)
    return reduced, log, kept


# ---------------------------------------------------------------------------
# Constructions


def barman_augment(game: Game, k: float, eps: float) -> NormalFormGame:
    """Append one fallback action per player, welfare-thresholded at ``k``.

    In the augmented game: profiles of original actions split the base welfare
    evenly; a lone fallback player collects k/n while everyone else gets 0;
    two or more fallback players each get eps/n and the rest 0. Requires
    k > 0 and k/n <= eps <= k.
    """
    g = game.to_normal_form()
    g.check_cap()
    n = g.n
    if k <= 0:
        raise ValueError("welfare threshold k must be positive")
    if not (k / n - 1e-12 <= eps <= k + 1e-12):
        raise ValueError(f"eps must lie in [k/n, k] = [{k / n:g}, {k:g}], got {eps:g}")
    shape = tuple(a + 1 for a in g.actions)
    cells = 1
    for a in shape:
        cells *= a
    if cells > g.enumeration_cap:
        raise EnumerationTooLarge(cells, g.enumeration_cap)

    grid = np.indices(shape)
    fallback = np.stack(
        [grid[i] == g.actions[i] for i in range(n)]
    )  # (n, *shape) bool
    count = fallback.sum(axis=0)
    original = count == 0
    lone = count == 1
    several = count >= 2

    base_sw = welfare_tensor(g)
    tensors = []
    for i in range(n):
        t = np.zeros(shape)
        t[original] = (base_sw / n).ravel()
        t[lone & fallback[i]] = k / n
        t[several & fallback[i]] = eps / n
        tensors.append(t)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return NormalFormGame(tensors, enumeration_cap=g.enumeration_cap)


def random_game(
    n: int,
    action_counts,
    seed: int,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> NormalFormGame:
    """i.i.d. uniform-[0, 1] utilities from a seeded generator."""
    counts = [int(a) for a in action_counts]
    if len(counts) != n:
        raise ValueError(f"expected {n} action counts, got {len(counts)}")
    cells = 1
    for a in counts:
        cells *= a
    if cells > enumeration_cap:
        raise EnumerationTooLarge(cells, enumeration_cap)
    rng = np.random.default_rng(seed)
    tensors = [rng.random(tuple(counts)) for _ in range(n)]
    return NormalFormGame(tensors, enumeration_cap=enumeration_cap)


# ---------------------------------------------------------------------------
# File format


def game_to_dict(game: Game) -> dict:
    if isinstance(game, NormalFormGame):
        return {
            "players": game.n,
            "actions": list(game.actions),
            "utilities": [u.ravel().tolist() for u in game.utilities],
        }
    if isinstance(game, PolymatrixGame):
        return {
            "kind": "polymatrix",
            "players": game.n,
            "actions": list(game.actions),
            "edges": [
                {"from": i, "to": j, "matrix": m.tolist()}
                for (i, j), m in sorted(game.edges.items())
            ],
        }
    if isinstance(game, GraphicalGame):
        return {
            "kind": "graphical",
            "players": game.n,
            "actions": list(game.actions),
            "neighborhoods": [list(nb) for nb in game.neighborhoods],
            "tables": [t.ravel().tolist() for t in game.tables],
        }
    raise TypeError(f"cannot serialize {type(game).__name__}")


def game_from_dict(data: dict) -> Game:
    kind = data.get("kind", "normal")
    n = int(data["players"])
    actions = [int(a) for a in data["actions"]]
    if len(actions) != n:
        raise ValueError(f"'actions' has {len(actions)} entries for {n} players")
    if kind == "normal":
        shape = tuple(actions)
        utilities = [
            np.asarray(flat, dtype=float).reshape(shape)
            for flat in data["utilities"]
        ]
        if len(utilities) != n:
            raise ValueError(f"'utilities' has {len(utilities)} entries for {n} players")
        return NormalFormGame(utilities)
    if kind == "polymatrix":
        edges = {
            (int(e["from"]), int(e["to"])): np.asarray(e["matrix"], dtype=float)
            for e in data["edges"]
        }
        return PolymatrixGame(actions, edges)
    if kind == "graphical":
        neighborhoods = [[int(j) for j in nb] for nb in data["neighborhoods"]]
        tables = []
        for i in range(n):
            shape = tuple([actions[i]] + [actions[j] for j in neighborhoods[i]])
            tables.append(np.asarray(data["tables"][i], dtype=float).reshape(shape))
        return GraphicalGame(actions, neighborhoods, tables)
    raise ValueError(f"unknown game kind {kind!r}")


def save_game(game: Game, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(game_to_dict(game), fh)
        fh.write("\n")


def load_game(path: str | os.PathLike) -> Game:
    with open(path) as fh:
        return game_from_dict(json.load(fh))
