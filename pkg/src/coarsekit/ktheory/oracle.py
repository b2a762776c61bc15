"""Brute-force model of the inductive limit on a finite truncation.

Stage ``n`` is ``Z^(L * k_N / k_n)`` and the connecting map to stage ``n+1``
is the explicit 0/1 matrix summing ``r_n`` consecutive coordinates.  The
colimit of this finite system is read off the last stage: an element is zero
when its image there vanishes, and the positive cone is the union of the
images of the nonnegative orthants of all stages.  Everything is plain
integer linear algebra, independent of the period bookkeeping in
:mod:`.classes`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .towers import TowerSpec


def _sum_matrix(rows: int, r: int) -> np.ndarray:
    m = np.zeros((rows, rows * r), dtype=object)
    for i in range(rows):
        m[i, i * r:(i + 1) * r] = 1
    return m


@dataclass
class TruncatedLimit:
    tower: TowerSpec
    N: int
    L: int
    dims: list
    maps: list  # maps[n]: stage n -> stage n+1

    @property
    def width(self):
        """Number of base coordinates covered, ``L * k_N``."""
        return self.dims[0]

    def images(self, x):
        """Images of a base vector at stages ``0..N``."""
        v = np.zeros(self.width, dtype=object)
        x = list(x)
        if len(x) > self.width:
            if any(x[self.width:]):
                raise ValueError("support exceeds the truncation")
            x = x[:self.width]
        v[:len(x)] = x
        out = [v]
        for m in self.maps:
            v = m.dot(v)
            out.append(v)
        return out

    def cone_generators(self):
        """Columns of every composite map into the last stage (images of unit vectors)."""
        gens = set()
        comp = np.identity(self.dims[-1], dtype=object)
        for n in range(self.N, -1, -1):
            for col in comp.T:
                gens.add(tuple(int(c) for c in col))
            if n:
                comp = comp.dot(self.maps[n - 1])
        return sorted(gens)

    def in_cone(self, y) -> bool:
        gens = self.cone_generators()
        units = all(sorted(g) == [0] * (len(g) - 1) + [1] for g in gens)
        if not units:
            raise AssertionError("block-sum maps should send units to units")
        # the cone generated by unit vectors is the nonnegative orthant
        return all(int(c) >= 0 for c in y)

    def zero_stage(self, x):
        """First stage where the image of ``x`` vanishes, or None."""
        for n, v in enumerate(self.images(x)):
            if not any(v):
                return n
        return None

    def positive_stage(self, x):
        """First stage where the image of ``x`` lies in the cone, or None."""
        imgs = self.images(x)
        if not self.in_cone(imgs[-1]):
            return None
        for n, v in enumerate(imgs):
            if all(int(c) >= 0 for c in v):
                return n
        return None


def truncated_limit_oracle(tower: TowerSpec, N: int, L: int) -> TruncatedLimit:
    if N < 0 or L < 1:
        raise ValueError("need N >= 0 and L >= 1")
    kN = tower.order(N)
    dims = [L * kN // tower.order(n) for n in range(N + 1)]
    maps = [_sum_matrix(dims[n + 1], tower.increment(n)) for n in range(N)]
    return TruncatedLimit(tower, N, L, dims, maps)
