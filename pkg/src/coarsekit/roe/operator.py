"""Exact sparse operators on l^p of a finite window.

Entries are :class:`fractions.Fraction` keyed by ``(row, column)`` positions
in the space's point order; ``T[x, y]`` is the coefficient of ``delta_x`` in
``T delta_y``.  Zero entries are never stored.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from ..errors import IdentityFailure
from ..space import Space


class SparseOperator:
    __slots__ = ("space", "_entries", "_prop")

    def __init__(self, space: Space, entries: Mapping | None = None):
        self.space = space
        clean = {}
        n = len(space)
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < n and 0 <= j < n):
                raise IndexError(f"entry ({i}, {j}) outside a {n}-point space")
            v = Fraction(v)
            if v:
                clean[int(i), int(j)] = v
        self._entries = clean
        self._prop = None

    # construction -----------------------------------------------------------

    @classmethod
    def from_points(cls, space: Space, entries: Mapping) -> SparseOperator:
        """Entries keyed by ``(row point, column point)``."""
        return cls(space, {(space.index(x), space.index(y)): v for (x, y), v in entries.items()})

    @classmethod
    def zero(cls, space):
        return cls(space)

    @classmethod
    def identity(cls, space):
        return cls(space, {(i, i): 1 for i in range(len(space))})

    @classmethod
    def indicator(cls, space, pts: Iterable):
        """Diagonal multiplication operator ``1_Y``."""
        return cls(space, {(i, i): 1 for i in set(space.indices(pts))})

    @classmethod
    def diagonal_from(cls, space, values: Mapping):
        return cls(space, {(space.index(x), space.index(x)): v for x, v in values.items()})

    @classmethod
    def unit(cls, space, x, y):
        """Matrix unit ``e_xy``."""
        return cls(space, {(space.index(x), space.index(y)): 1})

    @classmethod
    def from_dense(cls, space, arr):
        arr = np.asarray(arr)
        return cls(space, {(i, j): Fraction(arr[i, j]).limit_denominator(10**12)
                           if arr.dtype.kind == "f" else Fraction(int(arr[i, j]))
                           for i, j in zip(*np.nonzero(arr))})

    # access -------------------------------------------------------------------

    @property
    def entries(self):
        return dict(self._entries)

    @property
    def nnz(self):
        return len(self._entries)

    def __getitem__(self, key):
        x, y = key
        return self._entries.get((self.space.index(x), self.space.index(y)), Fraction(0))

    def items(self):
        """``((row point, column point), value)`` pairs."""
        pts = self.space.points
        return [((pts[i], pts[j]), v) for (i, j), v in sorted(self._entries.items())]

    @property
    def support(self) -> set:
        pts = self.space.points
        return {(pts[i], pts[j]) for i, j in self._entries}

    @property
    def propagation(self) -> int:
        """``max{d(x, y) : T_xy != 0}`` (0 for the zero operator)."""
        if self._prop is None:
            m = self.space.metric
            self._prop = max((int(m[i, j]) for i, j in self._entries), default=0)
        return self._prop

    def column_support(self, y) -> set:
        j = self.space.index(y)
        return {self.space.points[i] for (i, jj) in self._entries if jj == j}

    def is_zero(self):
        return not self._entries

    def is_diagonal(self):
        return all(i == j for i, j in self._entries)

    def is_idempotent(self):
        return self @ self == self

    def diagonal(self) -> dict:
        """``{x: T_xx}`` over points with a nonzero diagonal entry."""
        pts = self.space.points
        return {pts[i]: v for (i, j), v in self._entries.items() if i == j}

    def trace(self) -> Fraction:
        return sum((v for (i, j), v in self._entries.items() if i == j), Fraction(0))

    def to_dense(self, dtype=float) -> np.ndarray:
        n = len(self.space)
        out = np.zeros((n, n), dtype=dtype)
        for (i, j), v in self._entries.items():
            out[i, j] = v if dtype is object else float(v)
        return out

    # algebra ------------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, SparseOperator):
            return NotImplemented
        if other.space is not self.space:
            raise ValueError("operators act on different spaces")
        return None

    def __eq__(self, other):
        if not isinstance(other, SparseOperator):
            return NotImplemented
        return self.space is other.space and self._entries == other._entries

    __hash__ = None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self._entries)
        for k, v in other._entries.items():
            out[k] = out.get(k, 0) + v
        return SparseOperator(self.space, out)

    def __neg__(self):
        return SparseOperator(self.space, {k: -v for k, v in self._entries.items()})

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, SparseOperator):
            return NotImplemented
        c = Fraction(c)
        return SparseOperator(self.space, {k: c * v for k, v in self._entries.items()})

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / Fraction(c))

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        rows = defaultdict(list)
        for (k, j), v in other._entries.items():
            rows[k].append((j, v))
        out = defaultdict(Fraction)
        for (i, k), a in self._entries.items():
            for j, b in rows.get(k, ()):
                out[i, j] += a * b
        return SparseOperator(self.space, out)

    @property
    def T(self):
        return SparseOperator(self.space, {(j, i): v for (i, j), v in self._entries.items()})

    def restrict(self, rows: Iterable | None = None, cols: Iterable | None = None):
        """``1_rows T 1_cols`` (``None`` means all points)."""
        r = None if rows is None else set(self.space.indices(rows))
        c = None if cols is None else set(self.space.indices(cols))
        return SparseOperator(self.space, {
            (i, j): v for (i, j), v in self._entries.items()
            if (r is None or i in r) and (c is None or j in c)
        })

    def apply(self, vec: Mapping) -> dict:
        """Apply to a finitely supported vector ``{point: value}``."""
        idx = {self.space.index(x): Fraction(v) for x, v in vec.items()}
        out = defaultdict(Fraction)
        for (i, j), v in self._entries.items():
            if j in idx:
                out[i] += v * idx[j]
        pts = self.space.points
        return {pts[i]: v for i, v in out.items() if v}

    def __repr__(self):
        return f"SparseOperator({self.space.space_id}, nnz={self.nnz}, prop={self.propagation})"


def commutator(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    return a @ b - b @ a


def cond_expectation(a: SparseOperator) -> SparseOperator:
    """Diagonal part ``E_0(T)(x) = (T delta_x)(x)``."""
    return SparseOperator(a.space, {(i, j): v for (i, j), v in a._entries.items() if i == j})


# --------------------------------------------------------------------------
# algebraic equivalence of idempotents


@dataclass(frozen=True)
class EquivWitness:
    """``e = xy`` and ``f = yx`` with ``x = exf``, ``y = fye``; all checked exactly."""

    e: SparseOperator
    f: SparseOperator
    x: SparseOperator
    y: SparseOperator


def alg_equiv_check(e, f, x, y) -> EquivWitness:
    """Verify ``e ~ f`` via ``x, y``; raise :class:`IdentityFailure` naming the first failure."""
    checks = (
        ("e^2 = e", lambda: e @ e == e),
        ("f^2 = f", lambda: f @ f == f),
        ("xy = e", lambda: x @ y == e),
        ("yx = f", lambda: y @ x == f),
    )
    for name, ok in checks:
        if not ok():
            raise IdentityFailure(name)
    xn, yn = e @ x @ f, f @ y @ e
    if xn @ yn != e or yn @ xn != f:
        raise IdentityFailure("normalised witnesses", "exf, fye do not reproduce e, f")
    return EquivWitness(e, f, xn, yn)


def exact_rank(a: SparseOperator) -> int:
    """Rank over Q by fraction-exact Gaussian elimination."""
    rows = defaultdict(dict)
    for (i, j), v in a._entries.items():
        rows[i][j] = v
    pivots: dict[int, dict] = {}
    for row in rows.values():
        row = dict(row)
        while row:
            col = min(row)
            if col not in pivots:
                pivots[col] = row
                break
            piv = pivots[col]
            factor = row[col] / piv[col]
            for j, v in piv.items():
                nv = row.get(j, 0) - factor * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
    return len(pivots)
