"""Small dense linear-program solver.

Problems arrive as maximize c.y subject to G y <= h plus per-variable bounds.
The solver is a two-phase tableau simplex with Bland's pivoting rule, which
makes it anti-cycling and bit-deterministic: identical input yields the
identical pivot sequence. Instances here are tiny (tens of rows), so clarity
and reproducibility beat asymptotics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedProgram

_PIVOT_TOL = 1e-9
_FEAS_TOL = 1e-7


@dataclass
class LinearProgram:
    """maximize c.y  s.t.  G y <= h,  lower <= y <= upper."""

    c: np.ndarray
    G: np.ndarray
    h: np.ndarray
    lower: np.ndarray = field(default=None)  # type: ignore[assignment]
    upper: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.c = np.atleast_1d(np.asarray(self.c, dtype=float))
        nvar = self.c.size
        self.G = np.asarray(self.G, dtype=float).reshape(-1, nvar)
        self.h = np.atleast_1d(np.asarray(self.h, dtype=float))
        if self.h.size != self.G.shape[0]:
            raise ValueError(
                f"{self.G.shape[0]} constraint rows but {self.h.size} bounds"
            )
        if self.lower is None:
            self.lower = np.full(nvar, -np.inf)
        if self.upper is None:
            self.upper = np.full(nvar, np.inf)
        self.lower = np.asarray(self.lower, dtype=float).reshape(nvar)
        self.upper = np.asarray(self.upper, dtype=float).reshape(nvar)
        for name, arr in (("c", self.c), ("G", self.G), ("h", self.h)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("a lower bound exceeds its upper bound")
        if np.any(np.isposinf(self.lower)) or np.any(np.isneginf(self.upper)):
            raise ValueError("bounds may be unbounded only outward")


@dataclass
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float | None = None
    y: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row - 1] = col


def _run_simplex(
    tableau: np.ndarray,
    basis: np.ndarray,
    ncols: int,
    allowed: np.ndarray | None = None,
) -> str:
    """Drive the priced-out tableau to optimality; Bland's rule throughout.

    Row 0 holds reduced costs for maximization; rows 1.. are constraints with
    the rhs in the last column. Columns where ``allowed`` is false never enter
    the basis. Returns "optimal" or "unbounded".
    """
    while True:
        reduced = tableau[0, :ncols]
        entering = -1
        for j in range(ncols):
            if reduced[j] > _PIVOT_TOL and (allowed is None or allowed[j]):
                entering = j
                break
        if entering < 0:
            return "optimal"
        col = tableau[1:, entering]
        rows = np.nonzero(col > _PIVOT_TOL)[0]
        if rows.size == 0:
            return "unbounded"
        ratios = tableau[1 + rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12]
        leave = tied[np.argmin(basis[tied])]
        _pivot(tableau, basis, 1 + leave, entering)


def _standard_form(lp: LinearProgram):
    """Rewrite with nonnegative variables; returns (c, G, h, recover).

    recover maps a nonnegative solution vector back to the original y.
    """
    nvar = lp.c.size
    cols: list[np.ndarray] = []
    c_std: list[float] = []
    shift = np.zeros(nvar)
    extra_rows: list[np.ndarray] = []
    extra_rhs: list[float] = []
    plan: list[tuple] = []

    for j in range(nvar):
        lo, hi = lp.lower[j], lp.upper[j]
        gj = lp.G[:, j]
        if np.isfinite(lo):
            plan.append(("shift", j, lo, len(cols)))
            shift[j] = lo
            cols.append(gj)
            c_std.append(lp.c[j])
            if np.isfinite(hi):
                extra_rows.append(("ub", len(cols) - 1))
                extra_rhs.append(hi - lo)
        elif np.isfinite(hi):
            plan.append(("neg", j, hi, len(cols)))
            shift[j] = hi
            cols.append(-gj)
            c_std.append(-lp.c[j])
        else:
            plan.append(("split", j, len(cols), len(cols) + 1))
            cols.append(gj)
            c_std.append(lp.c[j])
            cols.append(-gj)
            c_std.append(-lp.c[j])

    nstd = len(cols)
    G_std = np.column_stack(cols) if lp.G.shape[0] else np.zeros((0, nstd))
    h_std = lp.h - lp.G @ shift
    for (tag, col), rhs in zip(extra_rows, extra_rhs):
        row = np.zeros(nstd)
        row[col] = 1.0
        G_std = np.vstack([G_std, row])
        h_std = np.append(h_std, rhs)

    def recover(x_std: np.ndarray) -> np.ndarray:
        y = np.zeros(nvar)
        for step in plan:
            if step[0] == "shift":
                _, j, lo, col = step
                y[j] = lo + x_std[col]
            elif step[0] == "neg":
                _, j, hi, col = step
                y[j] = hi - x_std[col]
            else:
                _, j, cp, cm = step
                y[j] = x_std[cp] - x_std[cm]
        return y

    return np.asarray(c_std), G_std, h_std, recover


def solve(lp: LinearProgram) -> LPSolution:
    """Two-phase simplex; returns a vertex-optimal solution when one exists."""
    c, G, h, recover = _standard_form(lp)
    m, nstd = G.shape

    # Equality form: G x + s = h with s >= 0; rows with negative rhs are
    # negated and receive an artificial variable for phase 1.
    A = np.hstack([G, np.eye(m)])
    b = h.copy()
    art_cols: list[int] = []
    basis = np.zeros(m, dtype=int)
    for r in range(m):
        if b[r] < 0:
            A[r] *= -1.0
            b[r] *= -1.0
            art_cols.append(A.shape[1] + len(art_cols))
            basis[r] = art_cols[-1]
        else:
            basis[r] = nstd + r
    nart = len(art_cols)
    if nart:
        art_block = np.zeros((m, nart))
        k = 0
        for r in range(m):
            if basis[r] >= A.shape[1]:
                art_block[r, k] = 1.0
                k += 1
        A = np.hstack([A, art_block])

    ntot = nstd + m + nart
    tableau = np.zeros((m + 1, ntot + 1))
    tableau[1:, :ntot] = A
    tableau[1:, -1] = b

    if nart:
        # Phase 1: maximize minus the artificial mass.
        obj = np.zeros(ntot)
        obj[nstd + m :] = -1.0
        tableau[0, :ntot] = obj
        for r in range(m):
            if basis[r] >= nstd + m:
                tableau[0] -= obj[basis[r]] * tableau[1 + r]
        status = _run_simplex(tableau, basis, ntot)
        assert status == "optimal"  # phase-1 objective is bounded above by 0
        # Row 0's rhs carries minus the objective value, i.e. the artificial mass.
        if tableau[0, -1] > _FEAS_TOL:
            return LPSolution("infeasible")
        # Remove lingering artificials from the basis where possible; a row
        # with no eligible pivot is redundant and keeps its artificial parked
        # at zero (it can still leave through degenerate pivots later).
        for r in range(m):
            if basis[r] >= nstd + m:
                row = tableau[1 + r, : nstd + m]
                candidates = np.nonzero(np.abs(row) > _PIVOT_TOL)[0]
                if candidates.size:
                    _pivot(tableau, basis, 1 + r, int(candidates[0]))
                elif abs(tableau[1 + r, -1]) <= _FEAS_TOL:
                    tableau[1 + r, -1] = 0.0
                else:
                    raise IllConditionedProgram(
                        r, int(basis[r]), float(np.abs(row).max(initial=0.0))
                    )

    # Phase 2 on the real objective; artificial columns may never re-enter.
    obj = np.zeros(ntot)
    obj[:nstd] = c
    tableau[0, :] = 0.0
    tableau[0, :ntot] = obj
    for r in range(m):
        tableau[0] -= obj[basis[r]] * tableau[1 + r]
    allowed = np.ones(ntot, dtype=bool)
    allowed[nstd + m :] = False
    status = _run_simplex(tableau, basis, ntot, allowed)
    if status == "unbounded":
        return LPSolution("unbounded")

    x = np.zeros(ntot)
    for r in range(m):
        x[basis[r]] = tableau[1 + r, -1]
    y = recover(x[:nstd])
    return LPSolution("optimal", float(lp.c @ y), y)
