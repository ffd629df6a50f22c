import itertools

import numpy as np
import pytest

from smoothlearn import catalog
from smoothlearn.bayesian import (
    BayesianGame,
    agent_form,
    agent_index,
    bayesian_from_dict,
    bayesian_to_dict,
    bne_gap,
    flatten_to_agent_profile,
    load_bayesian,
    mechanism_efficiency_ratio,
    save_bayesian,
)
from smoothlearn.dynamics import run_ogd
from smoothlearn.errors import EnumerationTooLarge
from smoothlearn.games import lipschitz_bound, random_game
from smoothlearn.metrics import brgap_matrix, ne_gap
from smoothlearn.smoothness import is_smooth


def singleton_wrap(game):
    """A complete-information game recast with one type per player."""
    return BayesianGame(
        types=[1] * game.n,
        actions=list(game.actions),
        utilities=[u[None, ...] for u in game.utilities],
    )


def two_type_toy():
    """Hand-built two-action toy: player 1 has a low and a high type (the
    high tensor doubles the low one), player 2 a single type."""
    m_low = np.array([[1.0, 0.2], [0.3, 0.4]])
    m_high = 2.0 * m_low
    n_mat = np.array([[0.5, 0.1], [0.2, 0.3]])
    return BayesianGame(
        types=[2, 1],
        actions=[2, 2],
        utilities=[np.stack([m_low, m_high]), n_mat[None, ...]],
    ), m_low, m_high, n_mat


# --- agent form ------------------------------------------------------------------


def test_singleton_types_isomorphic_to_base():
    g = random_game(3, [2, 3, 2], seed=40)
    ag = agent_form(singleton_wrap(g))
    assert ag.n == 3
    assert ag.actions == g.actions
    for i in range(3):
        np.testing.assert_allclose(ag.utilities[i], g.utilities[i], atol=1e-12)


def test_two_types_scale_by_half():
    bg, m_low, m_high, n_mat = two_type_toy()
    ag = agent_form(bg)
    assert ag.actions == [2, 2, 2]  # agents (1,low), (1,high), player 2
    # agent (1, low): utility depends on its own action and player 2's only
    for a_low, a_high, a2 in itertools.product(range(2), repeat=3):
        assert ag.utilities[0][a_low, a_high, a2] == pytest.approx(
            0.5 * m_low[a_low, a2]
        )
        assert ag.utilities[1][a_low, a_high, a2] == pytest.approx(
            0.5 * m_high[a_high, a2]
        )
        assert ag.utilities[2][a_low, a_high, a2] == pytest.approx(
            0.5 * (n_mat[a_low, a2] + n_mat[a_high, a2])
        )


def test_agent_utilities_bounded_by_base():
    bg, *_ = two_type_toy()
    ag = agent_form(bg)
    base_max = max(float(u.max()) for u in bg.utilities)
    for u in ag.utilities:
        assert u.min() >= 0.0
        assert u.max() <= base_max + 1e-12


def test_law_of_total_expectation():
    # Summing a player's agents over its types recovers the unconditional
    # expected utility of the strategy.
    bg, m_low, m_high, n_mat = two_type_toy()
    ag = agent_form(bg)
    rng = np.random.default_rng(9)
    for _ in range(10):
        rows1 = rng.dirichlet([1, 1], size=2)
        rows2 = rng.dirichlet([1, 1], size=1)
        agent_profile = flatten_to_agent_profile(bg, [rows1, rows2])
        total = 0.0
        for agent in range(2):  # the two type-agents of player 1
            u = ag.utilities[agent]
            val = u
            for j, x in enumerate(agent_profile):
                val = np.tensordot(val, x, axes=([0], [0]))
            total += float(val)
        direct = 0.0
        for v1 in range(2):
            m = bg.utilities[0][v1]
            direct += 0.5 * float(rows1[v1] @ m @ rows2[0])
        assert total == pytest.approx(direct, abs=1e-12)


def test_agent_form_cap():
    bg, *_ = two_type_toy()
    bg.enumeration_cap = 4
    with pytest.raises(EnumerationTooLarge):
        agent_form(bg)


# --- gaps ---------------------------------------------------------------------------


def test_singleton_bne_gap_equals_ne_gap():
    g = random_game(2, [3, 3], seed=41)
    bg = singleton_wrap(g)
    rng = np.random.default_rng(10)
    for _ in range(5):
        x = [rng.dirichlet(np.ones(3)) for _ in range(2)]
        gaps = bne_gap(bg, [x[0][None, :], x[1][None, :]])
        report = ne_gap(g, x)
        np.testing.assert_allclose(
            [gaps[0][0], gaps[1][0]], report.gaps, atol=1e-12
        )


def test_rescaling_identity_random_instances():
    rng = np.random.default_rng(11)
    for seed in range(5):
        base = np.random.default_rng(60 + seed)
        bg = BayesianGame(
            types=[2, 2],
            actions=[2, 3],
            utilities=[base.random((2, 2, 3)), base.random((2, 2, 3))],
        )
        ag = agent_form(bg)
        strategy = [
            np.stack([rng.dirichlet(np.ones(2)) for _ in range(2)]),
            np.stack([rng.dirichlet(np.ones(3)) for _ in range(2)]),
        ]
        gaps = bne_gap(bg, strategy)
        profile = flatten_to_agent_profile(bg, strategy)
        agent_gaps = ne_gap(ag, profile).gaps
        for agent_pos, (i, v) in enumerate(agent_index(bg)):
            assert gaps[i][v] == pytest.approx(
                bg.types[i] * agent_gaps[agent_pos], abs=1e-9
            )


def test_ogd_on_agent_form_reaches_small_gap():
    # Singleton-type constant-sum instance: the agent form is the base game,
    # and the best iterate's gaps transfer to the incomplete-information view.
    bg = singleton_wrap(catalog.mp())
    ag = agent_form(bg)
    eta = 1.0 / (4.0 * lipschitz_bound(ag))
    traj = run_ogd(ag, eta=eta, steps=10**4)
    gaps = brgap_matrix(traj)
    t_star = int(np.argmin(gaps.max(axis=1)))
    strategy = [traj.xs[i][t_star][None, :] for i in range(2)]
    measured = bne_gap(bg, strategy)
    assert max(float(g.max()) for g in measured) <= 0.05


# --- smoothness transfer ---------------------------------------------------------------


def test_smoothness_transfers_to_agent_form():
    # Enumerate the incomplete-information smoothness constraints directly
    # (zero principal revenue): with the welfare-best deviation fixed per
    # type, lambda_max is the worst ratio of deviation welfare to optimum.
    bg, m_low, m_high, n_mat = two_type_toy()
    welfare = {0: m_low + n_mat, 1: m_high + n_mat}
    opL = welfare[0].max()
    opH = welfare[1].max()
    assert np.unravel_index(welfare[0].argmax(), (2, 2)) == (0, 0)
    assert np.unravel_index(welfare[1].argmax(), (2, 2)) == (0, 0)
    lam_max = min(
        min(
            (mv[0, a2] + n_mat[a1, 0]) / opt
            for a1 in range(2)
            for a2 in range(2)
        )
        for mv, opt in ((m_low, opL), (m_high, opH))
    )
    assert lam_max == pytest.approx(0.24)
    ok, _ = is_smooth(agent_form(bg), lam_max, 0.0)
    assert ok


def test_rational_priors_by_type_duplication():
    from smoothlearn.bayesian import with_uniform_priors

    bg, m_low, m_high, n_mat = two_type_toy()
    # player 1's types with prior (1/3, 2/3): duplicate the high type
    expanded = with_uniform_priors(bg, weights=[[1, 2], [1]])
    assert expanded.types == [3, 1]
    np.testing.assert_array_equal(expanded.utilities[0][0], m_low)
    np.testing.assert_array_equal(expanded.utilities[0][1], m_high)
    np.testing.assert_array_equal(expanded.utilities[0][2], m_high)
    # gaps under the expanded uniform model match the weighted expectation:
    # player 2 faces (1/3) low + (2/3) high behavior
    rng = np.random.default_rng(5)
    x_low, x_high = rng.dirichlet([1, 1]), rng.dirichlet([1, 1])
    x2 = rng.dirichlet([1, 1])
    strategy = [np.stack([x_low, x_high, x_high]), x2[None, :]]
    gaps = bne_gap(expanded, strategy)
    mixed = (x_low + 2.0 * x_high) / 3.0
    u2 = n_mat.T @ mixed
    expect = max(0.0, float(u2.max() - np.dot(x2, u2)))
    assert gaps[1][0] == pytest.approx(expect, abs=1e-12)
    with pytest.raises(ValueError):
        with_uniform_priors(bg, weights=[[1, 0], [1]])


def test_mechanism_ratio_convention():
    assert mechanism_efficiency_ratio(1.0, 0.5) == pytest.approx(1.0)
    assert mechanism_efficiency_ratio(1.0, 2.0) == pytest.approx(0.5)
    # deliberately different from the game convention lam / (1 + mu)
    assert mechanism_efficiency_ratio(1.0, 1.0) != 1.0 / (1.0 + 1.0)


# --- serialization -----------------------------------------------------------------------


def test_bayesian_json_round_trip(tmp_path):
    bg, *_ = two_type_toy()
    path = tmp_path / "bayes.json"
    save_bayesian(bg, path)
    back = load_bayesian(path)
    assert back.types == bg.types and back.actions == bg.actions
    for u, v in zip(back.utilities, bg.utilities):
        np.testing.assert_array_equal(u, v)
    assert bayesian_to_dict(back)["kind"] == "bayesian"


def test_bayesian_json_revenue(tmp_path):
    bg, m_low, m_high, n_mat = two_type_toy()
    with_rev = BayesianGame(
        bg.types, bg.actions, bg.utilities, revenue=np.full((2, 2), 0.25)
    )
    path = tmp_path / "bayes.json"
    save_bayesian(with_rev, path)
    back = load_bayesian(path)
    np.testing.assert_array_equal(back.revenue, with_rev.revenue)


def test_bayesian_validation():
    with pytest.raises(ValueError):
        BayesianGame(types=[1], actions=[2], utilities=[-np.ones((1, 2))])
    with pytest.raises(ValueError):
        bayesian_from_dict(
            {"players": 2, "types": [1], "actions": [2, 2], "utilities": []}
        )
