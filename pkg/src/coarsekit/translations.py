"""Partial translations: bijections between subsets with bounded displacement."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import InjectivityError
from .space import Space, separated_partition


@dataclass(frozen=True, eq=False)
class PartialTranslation:
    space: Space
    mapping: Mapping  # source point -> target point
    displacement: int

    @property
    def domain(self):
        return list(self.mapping)

    @property
    def range(self):
        return list(self.mapping.values())

    def __call__(self, x):
        return self.mapping[x]

    def __len__(self):
        return len(self.mapping)

    def __eq__(self, other):
        if not isinstance(other, PartialTranslation):
            return NotImplemented
        return self.space is other.space and dict(self.mapping) == dict(other.mapping)

    def __repr__(self):
        return f"PartialTranslation({len(self)} pairs, displacement={self.displacement})"

    def pairs(self):
        return list(self.mapping.items())


def from_pairs(space: Space, pairs: Iterable) -> PartialTranslation:
    """Build a translation from ``(source, target)`` pairs, checking injectivity."""
    mapping = {}
    targets = set()
    for src, dst in pairs:
        space.index(src), space.index(dst)
        if src in mapping:
            raise InjectivityError(f"source {src!r} appears twice")
        if dst in targets:
            raise InjectivityError(f"target {dst!r} is hit twice")
        mapping[src] = dst
        targets.add(dst)
    disp = max((space.d(x, y) for x, y in mapping.items()), default=0)
    return PartialTranslation(space, mapping, disp)


def identity(space: Space, pts: Iterable | None = None) -> PartialTranslation:
    pts = space.points if pts is None else pts
    return from_pairs(space, ((x, x) for x in pts))


def shift(space: Space, k: int) -> PartialTranslation:
    """``x -> x + k`` wherever both ends lie in an integer window."""
    return from_pairs(space, ((x, x + k) for x in space.points if x + k in space))


def compose(t: PartialTranslation, t2: PartialTranslation) -> PartialTranslation:
    """``t o t2`` on ``t2^-1(dom(t) n ran(t2))``."""
    if t.space is not t2.space:
        raise ValueError("translations live on different spaces")
    return from_pairs(t.space, ((x, t.mapping[y]) for x, y in t2.mapping.items()
                                if y in t.mapping))


def inverse(t: PartialTranslation) -> PartialTranslation:
    return PartialTranslation(t.space, {y: x for x, y in t.mapping.items()}, t.displacement)


def tij_family(space: Space, R: int):
    """Translations ``t_ij`` sending ``y in X_j`` to the ``x in X_i`` with ``d(x, y) <= R``.

    The classes ``X_i`` come from :func:`separated_partition` with ``S = 2R + 1``;
    since ``S > 2R`` the target, when it exists, is unique.  Returns the
    partition and a dict keyed by ``(i, j)`` (empty translations included).
    """
    if R < 0:
        raise ValueError("R must be nonnegative")
    part = separated_partition(space, 2 * R + 1)
    idx = [np.array(space.indices(c)) for c in part.classes]
    family = {}
    for i, ci in enumerate(idx):
        for j, cj in enumerate(idx):
            close = space.metric[np.ix_(ci, cj)] <= R
            if (close.sum(axis=0) > 1).any():  # impossible for an honest partition
                raise InjectivityError("separated partition is not (2R+1)-separated")
            rows, cols = np.nonzero(close)
            pairs = [(space.points[cj[b]], space.points[ci[a]]) for a, b in zip(rows, cols)]
            family[i, j] = from_pairs(space, sorted(pairs, key=lambda p: space.index(p[0])))
    return part, family


def to_operator(space: Space, t: PartialTranslation):
    """The 0/1 operator ``V_t`` with ``(V_t)_{xy} = 1`` iff ``x = t(y)``."""
    from .roe.operator import SparseOperator

    return SparseOperator.from_points(space, {(y, x): 1 for x, y in t.mapping.items()})
