"""Euclidean geometry on probability simplices.

Everything the learning dynamics touch geometrically lives here: projection
onto the simplex, the prox step it induces, and simplex diameters.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NonFiniteInput

# A point whose entries are nonnegative and whose mass is this close to 1 is
# treated as already on the simplex; returning it unchanged makes the
# projection bit-idempotent.
_ON_SIMPLEX_TOL = 1e-9

# Below this size the scalar threshold search beats numpy's vectorized one.
_SMALL = 64


def _project(v: np.ndarray) -> np.ndarray:
    """Sort-and-threshold projection, no input validation.

    Single implementation shared by the public entry point and the dynamics
    hot loop, so results are bit-identical wherever a projection happens.
    """
    if v.size <= _SMALL:
        vals = v.tolist()
        if min(vals) >= 0.0 and abs(sum(vals) - 1.0) <= _ON_SIMPLEX_TOL:
            return v.copy()
        s = sorted(vals, reverse=True)
        total = 0.0
        tau = 0.0
        d = len(s)
        for j in range(d - 1):
            total += s[j]
            cand = (total - 1.0) / (j + 1)
            if cand >= s[j + 1]:
                tau = cand
                break
        else:
            tau = (total + s[d - 1] - 1.0) / d
    else:
        if v.min() >= 0.0 and abs(v.sum() - 1.0) <= _ON_SIMPLEX_TOL:
            return v.copy()
        s = np.sort(v)[::-1]
        cumulative = np.cumsum(s) - 1.0
        k = np.arange(1, v.size + 1)
        support = np.nonzero(s - cumulative / k > 0)[0]
        tau = cumulative[support[-1]] / (support[-1] + 1)
    w = np.maximum(v - tau, 0.0)
    return w / w.sum()


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``v`` onto the probability simplex.

    Uses the sort-and-threshold method: find the largest k such that the top-k
    entries shifted by a common threshold stay positive, clip the rest to
    zero, renormalize away the last float ulp. O(d log d).
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("projection expects a nonempty 1-D vector")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput(f"cannot project non-finite vector {v!r}")
    return _project(v)


def prox(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Prox step from ``x`` along the linear utility ``u``.

    argmax over the simplex of <x', u> - ||x - x'||^2 / 2, which collapses to
    the projection of x + u.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != u.shape:
        raise ValueError(f"prox shape mismatch: {x.shape} vs {u.shape}")
    return project_simplex(x + u)


def diameter(dimension: int) -> float:
    """l2-diameter of the probability simplex on ``dimension`` outcomes."""
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    return math.sqrt(2.0) if dimension >= 2 else 0.0


def product_diameter(dimensions: list[int]) -> float:
    """Diameter of a product of simplices: squared diameters add."""
    return math.sqrt(sum(diameter(d) ** 2 for d in dimensions))
