import itertools

import numpy as np
import pytest

from smoothlearn.lp import LinearProgram, solve


def vertex_enumeration_optimum(lp):
    """Brute-force LP oracle: check every basic point of the inequality system.

    Stacks G y <= h with the finite variable bounds, solves every square
    subsystem of active constraints, keeps the feasible ones, and returns the
    best objective value. Only for small dense instances.
    """
    nvar = lp.c.size
    rows = [lp.G[i] for i in range(lp.G.shape[0])]
    rhs = list(lp.h)
    for j in range(nvar):
        if np.isfinite(lp.lower[j]):
            e = np.zeros(nvar)
            e[j] = -1.0
            rows.append(e)
            rhs.append(-lp.lower[j])
        if np.isfinite(lp.upper[j]):
            e = np.zeros(nvar)
            e[j] = 1.0
            rows.append(e)
            rhs.append(lp.upper[j])
    A = np.array(rows)
    b = np.array(rhs)
    best = None
    for combo in itertools.combinations(range(len(rows)), nvar):
        sub = A[list(combo)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        y = np.linalg.solve(sub, b[list(combo)])
        if np.all(A @ y <= b + 1e-9):
            val = float(lp.c @ y)
            if best is None or val > best:
                best = val
    return best


def random_bounded_lp(rng, nvar, nrows):
    """A feasible bounded LP: boxed variables plus random inequalities through
    a known interior point."""
    c = rng.normal(size=nvar)
    G = rng.normal(size=(nrows, nvar))
    interior = rng.uniform(-0.5, 0.5, size=nvar)
    h = G @ interior + rng.uniform(0.1, 1.0, size=nrows)
    lower = np.full(nvar, -2.0)
    upper = np.full(nvar, 2.0)
    return LinearProgram(c, G, h, lower, upper)


def test_simple_maximum():
    sol = solve(LinearProgram([1.0], [[1.0]], [3.0], lower=[0.0]))
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(3.0)
    np.testing.assert_allclose(sol.y, [3.0])


def test_infeasible():
    # y >= 1 and y <= 0 cannot hold together.
    sol = solve(LinearProgram([1.0], [[-1.0]], [-1.0], upper=[0.0]))
    assert sol.status == "infeasible"


def test_unbounded():
    sol = solve(LinearProgram([1.0], np.zeros((0, 1)), []))
    assert sol.status == "unbounded"


def test_equality_via_paired_inequalities():
    # maximize y1 + y2 with y1 + y2 == 1, 0 <= y <= 1
    lp = LinearProgram(
        [1.0, 1.0],
        [[1.0, 1.0], [-1.0, -1.0]],
        [1.0, -1.0],
        lower=[0.0, 0.0],
        upper=[1.0, 1.0],
    )
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(1.0)


def test_free_variable():
    # maximize -y with y >= -4 expressed as a row; variable itself unbounded.
    lp = LinearProgram([-1.0], [[-1.0]], [4.0])
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(4.0)
    np.testing.assert_allclose(sol.y, [-4.0])


def test_matches_vertex_enumeration_oracle():
    # Up to 8 variables and 20 constraint rows in total (the box bounds count
    # as rows for the oracle's subset enumeration).
    rng = np.random.default_rng(7)
    for trial in range(40):
        nvar = int(rng.integers(1, 7))
        nrows = int(rng.integers(1, 21 - 2 * nvar))
        lp = random_bounded_lp(rng, nvar, nrows)
        sol = solve(lp)
        assert sol.status == "optimal", f"trial {trial}"
        oracle = vertex_enumeration_optimum(lp)
        assert oracle is not None
        assert sol.value == pytest.approx(oracle, abs=1e-6)
    lp = random_bounded_lp(rng, 8, 4)
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(vertex_enumeration_optimum(lp), abs=1e-6)


def test_optimal_points_are_feasible():
    rng = np.random.default_rng(8)
    for _ in range(40):
        lp = random_bounded_lp(rng, int(rng.integers(2, 7)), int(rng.integers(2, 15)))
        sol = solve(lp)
        assert sol.status == "optimal"
        assert np.all(lp.G @ sol.y <= lp.h + 1e-7)
        assert np.all(sol.y >= lp.lower - 1e-7)
        assert np.all(sol.y <= lp.upper + 1e-7)
        assert sol.value == pytest.approx(float(lp.c @ sol.y), abs=1e-7)


def test_weak_duality_spot_check():
    # For max c.y s.t. Gy <= h, y in [lo, up]: any dual certificate
    # z >= 0 gives bound z.h + sum over bound terms; check against a
    # handcrafted dual for a small instance.
    lp = LinearProgram(
        [2.0, 1.0],
        [[1.0, 1.0], [1.0, 0.0]],
        [4.0, 3.0],
        lower=[0.0, 0.0],
    )
    sol = solve(lp)
    assert sol.status == "optimal"
    # z = (1, 1) is dual feasible: G^T z = (2, 1) >= c componentwise.
    z = np.array([1.0, 1.0])
    assert np.all(lp.G.T @ z >= lp.c - 1e-12)
    assert sol.value <= float(z @ lp.h) + 1e-9


def test_duality_on_random_instances():
    # Primal: max c.y s.t. Gy <= h, 0 <= y <= 2. Dual: min h.z + 2 sum(w)
    # s.t. G^T z + w >= c, z >= 0, w >= 0. Weak duality must hold for the
    # solved pair, and at the optima the two values coincide.
    rng = np.random.default_rng(77)
    for _ in range(20):
        nvar = int(rng.integers(2, 6))
        nrows = int(rng.integers(2, 10))
        c = rng.normal(size=nvar)
        G = rng.normal(size=(nrows, nvar))
        h = G @ rng.uniform(0.2, 1.8, size=nvar) + rng.uniform(0.1, 1.0, size=nrows)
        primal = solve(
            LinearProgram(c, G, h, np.zeros(nvar), np.full(nvar, 2.0))
        )
        assert primal.status == "optimal"
        dual_c = np.concatenate([-h, -2.0 * np.ones(nvar)])
        dual_G = np.hstack([-G.T, -np.eye(nvar)])
        dual = solve(
            LinearProgram(dual_c, dual_G, -c, lower=np.zeros(nrows + nvar))
        )
        assert dual.status == "optimal"
        dual_value = -dual.value  # the dual was solved as a maximization
        assert primal.value <= dual_value + 1e-7
        assert primal.value == pytest.approx(dual_value, abs=1e-6)


def test_deterministic():
    rng = np.random.default_rng(9)
    lp = random_bounded_lp(rng, 5, 12)
    a = solve(lp)
    b = solve(lp)
    assert a.status == b.status == "optimal"
    assert a.value == b.value
    assert np.array_equal(a.y, b.y)


def test_dimension_validation():
    with pytest.raises(ValueError):
        LinearProgram([1.0, 2.0], [[1.0]], [1.0])
    with pytest.raises(ValueError):
        LinearProgram([np.nan], [[1.0]], [1.0])
    with pytest.raises(ValueError):
        LinearProgram([1.0], [[1.0]], [1.0], lower=[2.0], upper=[1.0])
