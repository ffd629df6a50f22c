"""Built-in example games used by the CLI and the reproduction suite."""

from __future__ import annotations

import warnings

import numpy as np

from .games import Game, NormalFormGame, barman_augment

SHAPLEY3_A = np.array([[1.0, 1.0, 2.0], [2.0, 1.0, 1.0], [1.0, 2.0, 1.0]])
SHAPLEY3_B = np.array([[1.0, 2.0, 1.0], [1.0, 1.0, 2.0], [2.0, 1.0, 1.0]])

COUNTEREXAMPLE_A = np.array(
    [
        [0.2, 0.8, 0.9, 0.3],
        [0.2, 0.8, 0.2, 0.3],
        [0.9, 0.2, 0.4, 0.4],
        [0.6, 0.9, 0.3, 0.1],
    ]
)
COUNTEREXAMPLE_B = np.array(
    [
        [0.4, 0.2, 0.0, 0.1],
        [0.5, 0.0, 0.2, 0.8],
        [0.7, 0.8, 0.0, 0.4],
        [0.0, 0.0, 0.1, 0.4],
    ]
)

SHAPLEY2_A = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
SHAPLEY2_B = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])

DOMINANCE_A = np.array([[0.0, 0.0], [1.0, 1.0]])
DOMINANCE_B = np.array([[1.0, 0.0], [0.0, 1.0]])

MP_A = np.array([[1.0, 0.0], [0.0, 1.0]])
MP_B = 1.0 - MP_A


def shapley3() -> NormalFormGame:
    """Three-player constant-sum cycling game (welfare 3 everywhere).

    Players 1 and 2 play a 3x3 cycling bimatrix; player 3 absorbs the slack,
    so its strategy never matters and the welfare is constant.
    """
    u1 = np.repeat(SHAPLEY3_A[:, :, None], 3, axis=2)
    u2 = np.repeat(SHAPLEY3_B[:, :, None], 3, axis=2)
    u3 = 3.0 - u1 - u2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return NormalFormGame([u1, u2, u3])


# The documented starting point for the shapley3 non-convergence run; player
# 3's utility is strategy-independent, so uniform is as good as anything.
SHAPLEY3_INIT = [
    np.array([0.5, 0.25, 0.25]),
    np.array([0.25, 0.5, 0.25]),
    np.array([1.0, 1.0, 1.0]) / 3.0,
]

# Off-equilibrium start for the 3x3 cycling bimatrix: the uniform profile is
# its unique equilibrium, hence a fixed point of the dynamics.
SHAPLEY2_INIT = [
    np.array([0.5, 0.25, 0.25]),
    np.array([0.25, 0.5, 0.25]),
]


def counterexample() -> NormalFormGame:
    return NormalFormGame.from_bimatrix(COUNTEREXAMPLE_A, COUNTEREXAMPLE_B)


def shapley2() -> NormalFormGame:
    return NormalFormGame.from_bimatrix(SHAPLEY2_A, SHAPLEY2_B)


def dominance() -> NormalFormGame:
    return NormalFormGame.from_bimatrix(DOMINANCE_A, DOMINANCE_B)


def mp() -> NormalFormGame:
    """Matching pennies rescaled to [0, 1]; constant-sum with value 1."""
    return NormalFormGame.from_bimatrix(MP_A, MP_B)


BARMAN_DEMO_K = 1.5


def barman_demo() -> NormalFormGame:
    """The fallback-action augmentation applied to the dominance game.

    Threshold k = 1.5 sits strictly below the base optimum of 2, and the
    multi-fallback payoff parameter is set to k itself.
    """
    return barman_augment(dominance(), k=BARMAN_DEMO_K, eps=BARMAN_DEMO_K)


_BUILTINS = {
    "shapley3": shapley3,
    "counterexample": counterexample,
    "shapley2": shapley2,
    "dominance": dominance,
    "mp": mp,
    "barman-demo": barman_demo,
}

_DEFAULT_INITS = {
    "shapley3": SHAPLEY3_INIT,
    "shapley2": SHAPLEY2_INIT,
}

BUILTIN_NAMES = sorted(_BUILTINS)


def builtin_game(name: str) -> Game:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ValueError(
            f"unknown builtin {name!r}; available: {', '.join(BUILTIN_NAMES)}"
        ) from None


def builtin_default_init(name: str):
    """The documented starting profile for a builtin, or None for uniform."""
    init = _DEFAULT_INITS.get(name)
    return [x.copy() for x in init] if init is not None else None
