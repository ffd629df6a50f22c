import itertools
import math

import numpy as np
import pytest
from test_lp import vertex_enumeration_optimum

from smoothlearn import catalog
from smoothlearn.dynamics import run_ogd
from smoothlearn.games import (
    NormalFormGame,
    constant_sum_value,
    eliminate_dominated,
    lipschitz_bound,
    optimal_welfare,
    random_game,
)
from smoothlearn.geometry import product_diameter
from smoothlearn.lp import LinearProgram
from smoothlearn.metrics import brgap_matrix, regrets
from smoothlearn.smoothness import (
    brgap_bound,
    cgd_cce_bound,
    cgd_min_horizon,
    horizon,
    is_smooth,
    minty_certificate,
    rpoa,
    verify_certificate,
    verify_minty,
    weighted_rpoa,
)


def constant_sum_random(size, seed):
    a = random_game(1, [size * size], seed=seed).utilities[0].reshape(size, size)
    return NormalFormGame.from_bimatrix(a, 1.0 - a)


# --- smoothness checking ------------------------------------------------------


def test_counterexample_is_smooth_at_published_pair():
    ok, witness = is_smooth(catalog.counterexample(), 0.125, 0.0)
    assert ok and witness is None


def test_counterexample_tightness():
    # (0.125, 0) is tight: the deviation welfare at the worst profile is
    # exactly 0.2 = 0.125 * 1.6, so any noticeably larger lam fails.
    ok, witness = is_smooth(catalog.counterexample(), 0.130, 0.0)
    assert not ok and witness is not None


def test_cycling_game_never_smooth():
    g = catalog.shapley2()
    for lam, mu in [(0.01, 0.0), (0.5, 1.0), (1e-6, 10.0), (0.2, -0.5)]:
        ok, witness = is_smooth(g, lam, mu)
        assert not ok and witness is not None
    # the structural reason: for the maximizer a* = (0, 1), the diagonal
    # profile (1, 1) has zero welfare AND zero deviation welfare, so the
    # constraint collapses to 0 >= lam
    assert catalog.SHAPLEY2_A[0, 1] + catalog.SHAPLEY2_B[1, 1] == 0.0
    assert catalog.SHAPLEY2_A[1, 1] + catalog.SHAPLEY2_B[1, 1] == 0.0


def test_vanishing_lambda_is_smooth_when_deviations_pay():
    # strictly positive deviation welfare everywhere -> (lam -> 0+, 0) holds
    g = catalog.counterexample()
    ok, _ = is_smooth(g, 1e-9, 0.0)
    assert ok


def test_is_smooth_validates_parameters():
    g = catalog.mp()
    with pytest.raises(ValueError):
        is_smooth(g, 0.0, 0.0)
    with pytest.raises(ValueError):
        is_smooth(g, 0.5, -1.0)


# --- uniform-weight ratio program -----------------------------------------------


def test_rpoa_cycling_game_zero():
    cert = rpoa(catalog.shapley2())
    assert cert.rho == pytest.approx(0.0, abs=1e-6)
    assert cert.lam is None and cert.mu is None


def test_rpoa_dominance_half_then_one_after_elimination():
    cert = rpoa(catalog.dominance())
    assert cert.rho == pytest.approx(0.5, abs=1e-6)
    assert cert.lam == pytest.approx(0.5, abs=1e-6)
    assert cert.mu == pytest.approx(0.0, abs=1e-6)
    assert not cert.flagged_degenerate

    reduced, _, _ = eliminate_dominated(catalog.dominance())
    cert2 = rpoa(reduced)
    assert cert2.rho == pytest.approx(1.0, abs=1e-6)
    assert not cert2.flagged_degenerate


def test_rpoa_constant_sum_degenerate():
    for g in (catalog.mp(), catalog.shapley3()):
        assert constant_sum_value(g) is not None
        cert = rpoa(g, z_min=0.0)
        assert cert.rho == pytest.approx(1.0, abs=1e-6)
        assert float(cert.z) <= 1e-9
        assert cert.flagged_degenerate


def test_rpoa_monotone_in_z_min():
    for seed in range(6):
        g = random_game(2, [3, 3], seed=700 + seed)
        values = [rpoa(g, z_min=z).rho for z in (0.0, 0.3, 1.0, 3.0)]
        for a, b in zip(values, values[1:]):
            assert b <= a + 1e-8


def test_rpoa_certificates_reverify():
    for seed in range(6):
        g = random_game(2, [3, 4], seed=710 + seed)
        cert = rpoa(g)
        assert verify_certificate(g, cert) >= -1e-7


def test_rpoa_against_vertex_oracle():
    for seed in range(6):
        g = random_game(2, [3, 3], seed=720 + seed)
        cert = rpoa(g)
        sw = sum(g.utilities).ravel()
        opt, ties = optimal_welfare(g)
        best = -math.inf
        for a_star in ties:
            dev = np.zeros((3, 3))
            for a in itertools.product(range(3), range(3)):
                dev[a] = g.utilities[0][a_star[0], a[1]] + g.utilities[1][a[0], a_star[1]]
            gain = dev.ravel() - sw
            lp = LinearProgram(
                [1.0, 0.0],
                np.column_stack([np.full(9, opt), -gain]),
                sw,
                lower=[-np.inf, 0.0],
                upper=[np.inf, 50.0],  # bounded box so the oracle terminates
            )
            val = vertex_enumeration_optimum(lp)
            best = max(best, val)
        assert cert.rho == pytest.approx(best, abs=1e-6)


# --- weighted ratio program -------------------------------------------------------


def test_weighted_dominates_uniform():
    for seed in range(6):
        g = random_game(2, [3, 3], seed=730 + seed)
        assert weighted_rpoa(g).rho >= rpoa(g).rho - 1e-6


def test_weighted_equals_uniform_at_ratio_one():
    for seed in range(4):
        g = random_game(2, [3, 3], seed=740 + seed)
        assert weighted_rpoa(g, ratio_bound=1.0).rho == pytest.approx(
            rpoa(g).rho, abs=1e-6
        )


def test_weighted_dominance_golden():
    # Frozen after verification against the vertex-enumeration oracle below:
    # per-player weights certify full efficiency for the dominance game.
    cert = weighted_rpoa(catalog.dominance())
    assert cert.rho == pytest.approx(1.0, abs=1e-6)
    np.testing.assert_allclose(cert.z, [2.0, 1.0], atol=1e-6)
    assert verify_certificate(catalog.dominance(), cert) >= -1e-7

    g = catalog.dominance()
    sw = sum(g.utilities).ravel()
    dev = np.zeros((2, 2, 2))  # player, a1, a2
    for a in itertools.product(range(2), range(2)):
        dev[0][a] = g.utilities[0][1, a[1]] - g.utilities[0][a]
        dev[1][a] = g.utilities[1][a[0], 1] - g.utilities[1][a]
    rows = np.column_stack([np.full(4, 2.0), -dev[0].ravel(), -dev[1].ravel()])
    lp = LinearProgram(
        [1.0, 0.0, 0.0],
        rows,
        sw,
        lower=[-np.inf, 0.0, 0.0],
        upper=[np.inf, 50.0, 50.0],
    )
    assert vertex_enumeration_optimum(lp) == pytest.approx(1.0, abs=1e-9)


def test_weighted_constant_sum_all_zero_weights():
    cert = weighted_rpoa(catalog.mp())
    assert cert.rho == pytest.approx(1.0, abs=1e-6)
    assert np.max(cert.z) <= 1e-9
    assert cert.flagged_degenerate


def test_weighted_validates_ratio_bound():
    with pytest.raises(ValueError):
        weighted_rpoa(catalog.mp(), ratio_bound=0.5)


# --- variational certificate --------------------------------------------------------


def test_minty_mp_is_uniform():
    cert = minty_certificate(catalog.mp())
    assert cert is not None
    np.testing.assert_allclose(cert.profile[0], [0.5, 0.5], atol=1e-9)
    np.testing.assert_allclose(cert.profile[1], [0.5, 0.5], atol=1e-9)
    assert cert.worst_slack >= -1e-7
    assert verify_minty(catalog.mp(), cert) >= -1e-7


def test_minty_two_player_constant_sum_always_feasible():
    for seed in range(20):
        g = constant_sum_random(3, seed=800 + seed)
        cert = minty_certificate(g)
        assert cert is not None, f"seed {seed}"
        assert verify_minty(g, cert) >= -1e-7


def test_minty_cycling_game_infeasible_golden():
    # Frozen outcome: no profile dominates the welfare pointwise here. The
    # grid cross-check sweeps coarse mixed profiles and finds every one
    # violated somewhere.
    g = catalog.shapley2()
    assert minty_certificate(g) is None
    ticks = [np.array(c) / 4 for c in itertools.product(range(5), repeat=3) if sum(c) == 4]
    worst_best = -math.inf
    for x1 in ticks:
        for x2 in ticks:
            slack = math.inf
            for a1 in range(3):
                for a2 in range(3):
                    dev = float(
                        np.dot(x1, catalog.SHAPLEY2_A[:, a2])
                        + np.dot(x2, catalog.SHAPLEY2_B[a1, :])
                    )
                    sw = catalog.SHAPLEY2_A[a1, a2] + catalog.SHAPLEY2_B[a1, a2]
                    slack = min(slack, dev - sw)
            worst_best = max(worst_best, slack)
    assert worst_best < 0


def test_minty_three_player_constant_sum_can_fail():
    # Constant welfare alone is not enough: the 3-player cycling game admits
    # no dominating profile, matching its non-convergence behavior.
    assert minty_certificate(catalog.shapley3()) is None


def test_minty_implies_nonnegative_regret_sum():
    for seed in range(3):
        g = constant_sum_random(3, seed=820 + seed)
        assert minty_certificate(g) is not None
        traj = run_ogd(g, eta=1.0 / (4 * lipschitz_bound(g)), steps=300)
        assert regrets(g, traj).total >= -1e-6 * traj.steps


# --- horizon formulas ------------------------------------------------------------


def test_horizon_halves_when_shortfall_doubles():
    g = constant_sum_random(3, seed=830)
    opt, _ = optimal_welfare(g)
    t1 = horizon(g, eps_n=0.01, mu=0.0, eta=0.05)
    t2 = horizon(g, eps_n=0.02, mu=0.0, eta=0.05)
    assert t1 == math.ceil(product_diameter(g.actions) ** 2 / (2 * 0.05 * 0.01 * opt))
    assert abs(t2 - math.ceil(t1 / 2)) <= 1


def test_horizon_rejects_nonpositive_shortfall():
    with pytest.raises(ValueError):
        horizon(catalog.mp(), eps_n=0.0, mu=0.0, eta=0.1)


def test_brgap_bound_decays_like_one_over_t():
    g = constant_sum_random(3, seed=831)
    eta = 1.0 / (4 * lipschitz_bound(g))
    b1 = brgap_bound(g, 0.0, 0.0, eta, steps=100)
    b2 = brgap_bound(g, 0.0, 0.0, eta, steps=200)
    assert b1 == pytest.approx(2 * b2)
    with pytest.raises(ValueError):
        brgap_bound(g, 0.0, 0.0, eta)


def test_horizon_balances_the_two_bound_terms():
    # The horizon is exactly the step count where the 1/T decay term matches
    # the shortfall term, so the generic bound evaluated there reproduces the
    # shortfall-form constant (up to the ceiling).
    from smoothlearn.geometry import diameter
    from smoothlearn.metrics import utility_norm_bound

    g = constant_sum_random(3, seed=832)
    opt, _ = optimal_welfare(g)
    eta, eps_n, mu = 0.05, 0.01, 0.25
    steps = horizon(g, eps_n, mu, eta)
    const = max(diameter(d) ** 2 for d in g.actions) / eta**2 + max(
        utility_norm_bound(g, i) ** 2 for i in range(g.n)
    )
    at_horizon = 4.0 * const * (
        2.0 * product_diameter(g.actions) ** 2 / steps
        + 4.0 * eta * eps_n * (1.0 + mu) * opt
    )
    assert at_horizon <= brgap_bound(g, eps_n, mu, eta) + 1e-9
    assert at_horizon >= 0.9 * brgap_bound(g, eps_n, mu, eta)
    # and the shortfall form instantiates its formula literally
    assert brgap_bound(g, eps_n, mu, eta) == pytest.approx(
        32.0 * const * eta * eps_n * (1.0 + mu) * opt
    )


def test_sensitivity_horizon_bound_holds_on_low_impact_game():
    # A game whose cross-player impact is a small perturbation: each player's
    # utility is mostly its own-action term, so the sensitivity is tiny and
    # the sensitivity-driven horizon certifies a small best-iterate gap sum.
    from smoothlearn.smoothness import sensitivity_horizon

    rng = np.random.default_rng(850)
    own = [rng.random(3) for _ in range(2)]
    cross = [0.05 * rng.random((3, 3)) for _ in range(2)]
    u1 = own[0][:, None] + cross[0]
    u2 = own[1][None, :] + cross[1]
    g = NormalFormGame([u1, u2])
    steps, bound, eps = sensitivity_horizon(g)
    assert eps <= 0.05 + 1e-12
    eta = 1.0 / (4.0 * lipschitz_bound(g))
    traj = run_ogd(g, eta=eta, steps=steps)
    best = float((brgap_matrix(traj) ** 2).sum(axis=1).min())
    assert best <= bound + 1e-6
    with pytest.raises(ValueError):
        sensitivity_horizon(NormalFormGame([np.zeros((2, 2)), np.zeros((2, 2))]))


def test_cgd_horizon_gate():
    g = catalog.mp()
    L = lipschitz_bound(g)
    dx = product_diameter(g.actions)
    assert cgd_min_horizon(g, eps0=0.5) == math.ceil(64 * L**2 * dx**4 / 0.25)
    assert cgd_cce_bound(g, steps=1000) == pytest.approx(4 * L * dx**2 / 1000)


def test_theorem_bound_on_constant_sum_run():
    # Exact-ratio branch: the best iterate's summed squared gaps sit under
    # (8 / T) (max D^2 / eta^2 + max B^2) D_X^2.
    for seed in (840, 841):
        g = constant_sum_random(4, seed=seed)
        eta = 1.0 / (4.0 * lipschitz_bound(g))
        traj = run_ogd(g, eta=eta, steps=500)
        best = float((brgap_matrix(traj) ** 2).sum(axis=1).min())
        assert best <= brgap_bound(g, 0.0, 0.0, eta, steps=500) + 1e-6


def test_best_iterate_bound_with_efficiency_shortfall():
    # General branch at an arbitrary horizon: the best iterate obeys
    # 4 (max D^2/eta^2 + max B^2) (2 D_X^2 / T + 4 eta eps (1+mu) OPT) with
    # the shortfall eps read off the certified ratio.
    from smoothlearn.geometry import diameter
    from smoothlearn.metrics import utility_norm_bound

    g = catalog.counterexample()
    cert = rpoa(g)
    eps_n = 1.0 - cert.rho
    opt, _ = optimal_welfare(g)
    eta = 1.0 / (4.0 * lipschitz_bound(g))
    T = 400
    traj = run_ogd(g, eta=eta, steps=T)
    best = float((brgap_matrix(traj) ** 2).sum(axis=1).min())
    const = max(diameter(d) ** 2 for d in g.actions) / eta**2 + max(
        utility_norm_bound(g, i) ** 2 for i in range(2)
    )
    rhs = 4.0 * const * (
        2.0 * product_diameter(g.actions) ** 2 / T
        + 4.0 * eta * eps_n * (1.0 + (cert.mu or 0.0)) * opt
    )
    assert best <= rhs + 1e-6
