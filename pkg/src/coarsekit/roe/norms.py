"""Certified intervals for l^p -> l^p operator norms.

``p = 1`` and ``p = inf`` are exact (column / row sums).  For other ``p`` the
upper end is the Riesz-Thorin interpolation bound
``||a||_1^(1/p) * ||a||_inf^(1 - 1/p)`` and the lower end is the best ratio
``||a x||_p / ||x||_p`` seen along Boyd's nonlinear power iteration, which for
``p = 2`` is ordinary power iteration on ``a^T a``.  Every lower value is the
ratio of an actual vector, hence sound up to float rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import InvariantViolation
from .operator import SparseOperator

# relative slack for float round-off when the lower bound meets the upper one
_ROUNDOFF = 1e-9


@dataclass(frozen=True)
class NormEstimate:
    p: float
    lower: float
    upper: float
    methods: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.lower > self.upper:
            raise InvariantViolation(f"lower {self.lower} > upper {self.upper}")

    @property
    def exact(self):
        return self.lower == self.upper

    def to_json(self):
        p = "inf" if math.isinf(self.p) else self.p
        return {"p": p, "lower": self.lower, "upper": self.upper, "methods": list(self.methods)}


def norm1_exact(a: SparseOperator) -> Fraction:
    """Max absolute column sum."""
    cols: dict[int, Fraction] = {}
    for (_, j), v in a._entries.items():
        cols[j] = cols.get(j, 0) + abs(v)
    return max(cols.values(), default=Fraction(0))


def norm_inf_exact(a: SparseOperator) -> Fraction:
    """Max absolute row sum."""
    rows: dict[int, Fraction] = {}
    for (i, _), v in a._entries.items():
        rows[i] = rows.get(i, 0) + abs(v)
    return max(rows.values(), default=Fraction(0))


def _as_array(a):
    if isinstance(a, SparseOperator):
        return a.to_dense()
    return np.asarray(a, dtype=float)


def _pnorm(x, p):
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


def _dual(x, p):
    return np.sign(x) * np.abs(x) ** (p - 1)


def boyd_lower(A: np.ndarray, p: float, x0: np.ndarray, iters=500, tol=1e-14) -> float:
    """Best ``||A x||_p / ||x||_p`` along Boyd's iteration started at ``x0``."""
    q = p / (p - 1)
    x = x0 / _pnorm(x0, p)
    best = 0.0
    prev = -1.0
    for _ in range(iters):
        y = A @ x
        val = _pnorm(y, p)
        best = max(best, val)
        if val == 0.0:
            break
        z = A.T @ _dual(y, p)
        if not np.any(z):
            break
        x = _dual(z, q)
        x = x / _pnorm(x, p)
        if abs(val - prev) <= tol * max(val, 1.0):
            break
        prev = val
    return best


def norm_bounds(a, p, seed=0, starts=3, iters=500) -> NormEstimate:
    """Interval ``[lower, upper]`` containing ``||a||_{p -> p}``.

    ``p`` is a number in ``[1, inf)`` or ``math.inf``; randomised restarts are
    drawn from ``numpy.random.default_rng(seed)``.
    """
    p = float(p)
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if isinstance(a, SparseOperator):
        n1, ninf = float(norm1_exact(a)), float(norm_inf_exact(a))
    else:
        A = np.abs(np.asarray(a, dtype=float))
        n1 = float(A.sum(axis=0).max()) if A.size else 0.0
        ninf = float(A.sum(axis=1).max()) if A.size else 0.0
    if p == 1:
        return NormEstimate(p, n1, n1, ("column-sum",))
    if math.isinf(p):
        return NormEstimate(p, ninf, ninf, ("row-sum",))
    upper = n1 ** (1 / p) * ninf ** (1 - 1 / p)
    A = _as_array(a)
    if not A.any():
        return NormEstimate(p, 0.0, 0.0, ("zero",))
    methods = ["riesz-thorin"]
    # unit vectors give the column p-norms outright
    lower = float(max(_pnorm(A[:, j], p) for j in range(A.shape[1])))
    nonneg = bool((A >= 0).all())
    lower = max(lower, boyd_lower(A, p, np.ones(A.shape[1]), iters))
    methods.append("power-iteration" if p == 2 else "boyd")
    if not nonneg:
        rng = np.random.default_rng(seed)
        for _ in range(starts):
            lower = max(lower, boyd_lower(A, p, rng.standard_normal(A.shape[1]), iters))
        methods.append(f"restarts={starts}")
    if lower > upper:
        if lower > upper * (1 + _ROUNDOFF):
            raise InvariantViolation(f"lower bound {lower} exceeds Riesz-Thorin {upper}")
        lower = upper
    return NormEstimate(p, lower, upper, tuple(methods))
