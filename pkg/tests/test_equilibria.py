import numpy as np
import pytest

from smoothlearn import catalog
from smoothlearn.equilibria import (
    UndeterminedRatio,
    bimatrix_nash,
    enumerate_equilibria,
    mixed_grid,
    poa,
    pure_nash,
)
from smoothlearn.errors import EnumerationTooLarge
from smoothlearn.games import NormalFormGame, random_game
from smoothlearn.metrics import ne_gap
from smoothlearn.smoothness import rpoa


def closed_form_2x2(a, b):
    """Oracle: all equilibria of a 2x2 bimatrix game, pure cases plus the
    standard interior indifference formula."""
    out = []
    for r in range(2):
        for c in range(2):
            if a[r][c] >= a[1 - r][c] and b[r][c] >= b[r][1 - c]:
                x = np.eye(2)[r]
                y = np.eye(2)[c]
                out.append((x, y))
    den_p = (b[0][0] - b[0][1]) + (b[1][1] - b[1][0])
    den_q = (a[0][0] - a[1][0]) + (a[1][1] - a[0][1])
    if abs(den_p) > 1e-12 and abs(den_q) > 1e-12:
        p = (b[1][1] - b[1][0]) / den_p
        q = (a[1][1] - a[0][1]) / den_q
        if 1e-12 < p < 1 - 1e-12 and 1e-12 < q < 1 - 1e-12:
            out.append((np.array([p, 1 - p]), np.array([q, 1 - q])))
    return out


# --- pure equilibria ----------------------------------------------------------


def test_pure_nash_dominance():
    eqs = pure_nash(catalog.dominance())
    assert len(eqs) == 1
    np.testing.assert_array_equal(eqs.members[0].profile[0], [0.0, 1.0])
    np.testing.assert_array_equal(eqs.members[0].profile[1], [0.0, 1.0])
    assert eqs.members[0].welfare == pytest.approx(2.0)


def test_pure_nash_matching_pennies_empty():
    assert len(pure_nash(catalog.mp())) == 0


def test_pure_nash_augmented_fallback_profile():
    g = catalog.barman_demo()
    eqs = pure_nash(g)
    fallback = [np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, 1.0])]
    found = any(
        all(np.array_equal(e.profile[i], fallback[i]) for i in range(2))
        for e in eqs
    )
    assert found


def test_pure_nash_three_player():
    g = catalog.shapley3()
    eqs = pure_nash(g)
    assert len(eqs) == 0  # the cycling bimatrix block has no pure equilibrium


# --- support enumeration --------------------------------------------------------


def test_bimatrix_matching_pennies_unique_uniform():
    eqs = bimatrix_nash(catalog.mp())
    assert len(eqs) == 1
    np.testing.assert_allclose(eqs.members[0].profile[0], [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(eqs.members[0].profile[1], [0.5, 0.5], atol=1e-12)
    assert not eqs.degenerate


def test_bimatrix_contains_pure_equilibria():
    eqs = bimatrix_nash(catalog.dominance())
    pure = pure_nash(catalog.dominance())
    for e in pure:
        assert any(
            all(np.allclose(e.profile[i], f.profile[i], atol=1e-9) for i in range(2))
            for f in eqs
        )


def test_bimatrix_cycling_game_unique_uniform():
    eqs = bimatrix_nash(catalog.shapley2())
    assert len(eqs) == 1
    for i in range(2):
        np.testing.assert_allclose(eqs.members[0].profile[i], np.full(3, 1 / 3), atol=1e-9)


def test_bimatrix_members_reverify():
    for seed in range(10):
        g = random_game(2, [4, 4], seed=900 + seed)
        for e in bimatrix_nash(g):
            assert ne_gap(g, e.profile).negap <= 1e-8


def test_bimatrix_against_closed_form_2x2():
    for seed in range(200):
        g = random_game(2, [2, 2], seed=1000 + seed)
        a, b = g.utilities
        oracle = closed_form_2x2(a.tolist(), b.tolist())
        mine = bimatrix_nash(g)
        assert len(mine) == len(oracle), f"seed {seed}"
        for x, y in oracle:
            assert any(
                np.allclose(e.profile[0], x, atol=1e-8)
                and np.allclose(e.profile[1], y, atol=1e-8)
                for e in mine
            ), f"seed {seed}: oracle equilibrium {x}, {y} missing"


def test_bimatrix_degenerate_flagged():
    # Identical rows for the row player: a continuum of equilibria.
    a = np.array([[1.0, 1.0], [1.0, 1.0]])
    b = np.array([[0.3, 0.7], [0.6, 0.4]])
    eqs = bimatrix_nash(NormalFormGame.from_bimatrix(a, b))
    assert eqs.degenerate
    assert len(eqs) >= 1


def test_bimatrix_size_guard():
    g = random_game(2, [6, 3], seed=1)
    with pytest.raises(EnumerationTooLarge):
        bimatrix_nash(g)
    assert len(enumerate_equilibria(g)) >= 0  # falls back to pure enumeration


# --- efficiency ratios ------------------------------------------------------------


def test_poa_constant_sum_is_one():
    for g in (catalog.mp(), catalog.shapley3()):
        if g.n == 2:
            assert poa(g, "worst") == pytest.approx(1.0)
            assert poa(g, "best") == pytest.approx(1.0)


def test_poa_dominance_worst_mode():
    assert poa(catalog.dominance(), "worst") == pytest.approx(1.0)
    assert poa(catalog.dominance(), "best") == pytest.approx(1.0)


def test_poa_undetermined_when_no_pure_equilibria():
    with pytest.raises(UndeterminedRatio):
        poa(catalog.shapley3(), "worst")


def test_poa_modes_ordered_and_bounded():
    for seed in range(10):
        g = random_game(2, [3, 3], seed=1200 + seed)
        worst = poa(g, "worst")
        best = poa(g, "best")
        assert worst <= best + 1e-12
        assert 0.0 <= worst and best <= 1.0 + 1e-9


def test_poa_dominates_certified_ratio():
    for seed in range(10):
        g = random_game(2, [3, 3], seed=1300 + seed)
        assert poa(g, "worst") >= rpoa(g).rho - 1e-6


def test_poa_epsilon_widens_range():
    g = catalog.mp()
    exact = poa(g, "worst")
    approx = poa(g, "worst", eps=0.2, grid_step=0.1)
    assert approx <= exact + 1e-12
    assert poa(g, "best", eps=0.2, grid_step=0.1) >= poa(g, "best") - 1e-12


def test_poa_mode_validation():
    with pytest.raises(ValueError):
        poa(catalog.mp(), "median")
    with pytest.raises(ValueError):
        poa(catalog.shapley3(), "worst", eps=0.1)


def test_mixed_grid_covers_simplex():
    grid = mixed_grid(3, 0.25)
    assert grid.shape == (15, 3)
    np.testing.assert_allclose(grid.sum(axis=1), 1.0)
    assert grid.min() >= 0.0


def test_barman_augmented_poa_reflects_threshold():
    # the all-fallback equilibrium keeps welfare eps = k, so the worst ratio
    # sits at k over the base optimum
    g = catalog.barman_demo()
    k = catalog.BARMAN_DEMO_K
    worst = poa(g, "worst")
    assert worst == pytest.approx(k / 2.0, abs=1e-9)
