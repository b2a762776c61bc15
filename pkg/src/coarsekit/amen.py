"""Følner sets, paradox certificates and Følner-averaged traces.

Everything here is window-scale evidence.  A failed Følner search or a
saturating matching on a ball says something about that ball, not a proof
about the infinite space; reports carry that label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import PreconditionError, ValidationError
from .matching import BipartiteMatcher
from .space import Space, family_origin, make_window, parse_family, zd_window

WINDOW_NOTE = "window-scale evidence; amenability is asymptotic and not decided here"


def boundary(space: Space, A: Iterable, R) -> list:
    """``{x : d(x, A) <= R and d(x, X \\ A) <= R}`` computed literally."""
    inside = space.mask(A)
    near_a = space.distance_to(space.subset(inside)) <= R
    near_c = space.distance_to(space.subset(~inside)) <= R
    return space.subset(near_a & near_c)


def folner_ratio(space: Space, A: Iterable, R) -> Fraction:
    A = list(A)
    if not A:
        raise ValueError("A must be nonempty")
    return Fraction(len(boundary(space, A, R)), len(set(A)))


@dataclass(frozen=True)
class FolnerWitness:
    set: tuple
    R: int
    ratio: Fraction
    window: str


@dataclass(frozen=True)
class FolnerExhaustion:
    R: int
    eps: Fraction
    min_ratio: Fraction
    best_set: tuple
    scanned: int
    strategy: str
    note: str = WINDOW_NOTE


class _BallWindow:
    """Window containing ``B_rho(origin)`` together with its ``R``-collar."""

    def __init__(self, fam, radius):
        name = fam["family"]
        if name == "z":
            self.space = make_window({"family": "z", "start": -radius}, 2 * radius + 1)
            self.origin = 0
        elif name == "zd":
            self.space = zd_window(fam["d"], 2 * radius + 1)
            self.origin = (radius,) * fam["d"]
        elif name in ("free", "tower"):
            self.space = make_window(fam, radius)
            self.origin = family_origin(fam)
        else:
            raise NotImplementedError(f"Følner search is not available for {name!r}")
        self._near = self.space.metric <= 1

    def ratio(self, A_idx: list, R):
        sp = self.space
        inside = np.zeros(len(sp), dtype=bool)
        inside[A_idx] = True
        near_a = (sp.metric[:, A_idx] <= R).any(axis=1)
        cand = np.flatnonzero(near_a)
        comp = np.flatnonzero(~inside)
        near_c = np.zeros(len(sp), dtype=bool)
        near_c[cand] = ~inside[cand]
        inner = cand[inside[cand]]
        if len(comp) and len(inner):
            near_c[inner] = (sp.metric[np.ix_(inner, comp)] <= R).any(axis=1)
        return Fraction(int((near_a & near_c).sum()), len(A_idx))


def folner_search(family_spec, R: int, eps, strategy="balls", max_radius=6, max_size=6):
    """First ``(R, eps)``-Følner set found, else a :class:`FolnerExhaustion` report.

    ``balls`` scans ``B_rho(origin)`` for ``rho = 0..max_radius``;
    ``exhaustive`` scans every set containing the origin that is connected by
    unit steps, by increasing size up to ``max_size``.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    fam = parse_family(family_spec)
    best = None
    scanned = 0
    if strategy == "balls":
        for rho in range(max_radius + 1):
            win = _BallWindow(fam, rho + R)
            sp = win.space
            A_idx = list(np.flatnonzero(sp.metric[sp.index(win.origin)] <= rho))
            ratio = win.ratio(A_idx, R)
            scanned += 1
            A = tuple(sp.points[i] for i in A_idx)
            if best is None or ratio < best[0]:
                best = (ratio, A)
            if ratio <= eps:
                return FolnerWitness(A, R, ratio, sp.space_id)
    elif strategy == "exhaustive":
        win = _BallWindow(fam, max_size - 1 + R)
        sp = win.space
        root = sp.index(win.origin)
        level = {frozenset([root])}
        for size in range(1, max_size + 1):
            for S in sorted(level, key=sorted):
                A_idx = sorted(S)
                ratio = win.ratio(A_idx, R)
                scanned += 1
                if best is None or ratio < best[0]:
                    best = (ratio, tuple(sp.points[i] for i in A_idx))
                if ratio <= eps:
                    return FolnerWitness(tuple(sp.points[i] for i in A_idx), R, ratio, sp.space_id)
            if size == max_size:
                break
            grown = set()
            for S in level:
                nbrs = np.flatnonzero(win._near[sorted(S)].any(axis=0))
                for v in nbrs:
                    if v not in S:
                        grown.add(S | {int(v)})
            level = grown
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return FolnerExhaustion(R, eps, best[0], best[1], scanned, strategy)


# --------------------------------------------------------------------------
# paradox certificates


@dataclass(frozen=True)
class ParadoxCertificate:
    """Two injections ``t_+``, ``t_-`` of the interior into the window with
    displacement ``<= R`` and disjoint images: the finite shadow of a
    paradoxical decomposition ``X = X_+ u X_-``."""

    R: int
    collar: int
    interior: tuple
    plus_pairs: tuple
    minus_pairs: tuple

    @property
    def X_plus(self):
        return tuple(y for _, y in self.plus_pairs)

    @property
    def X_minus(self):
        return tuple(y for _, y in self.minus_pairs)

    def to_json(self):
        return {
            "R": self.R, "collar": self.collar, "interior": list(self.interior),
            "plus_pairs": [list(p) for p in self.plus_pairs],
            "minus_pairs": [list(p) for p in self.minus_pairs],
        }


@dataclass(frozen=True)
class HallViolation:
    """Left vertices ``(x, sign)`` whose joint neighbourhood is too small."""

    R: int
    collar: int
    left: tuple
    neighbors: tuple
    note: str = WINDOW_NOTE

    @property
    def deficiency(self):
        return len(self.left) - len(self.neighbors)


@dataclass(frozen=True)
class EmptyInterior:
    R: int
    collar: int
    reason: str = "no point of the window has its collar-ball inside the window"


def _bipartite(space: Space, interior, R):
    graph = {}
    for x in interior:
        row = space.metric[space.index(x)]
        nbrs = [space.points[j] for j in np.flatnonzero(row <= R)]
        graph[x, "+"] = nbrs
        graph[x, "-"] = nbrs
    return graph


def paradox_certificate(space: Space, R: int, collar: int):
    """Match two copies of the interior into the window along edges ``d <= R``.

    Returns a :class:`ParadoxCertificate` when the doubled interior is
    saturated, otherwise a :class:`HallViolation` (or :class:`EmptyInterior`).
    """
    if collar < R:
        raise PreconditionError(f"collar {collar} < R {R}")
    interior = space.interior(collar)
    if not interior:
        return EmptyInterior(R, collar)
    matcher = BipartiteMatcher(_bipartite(space, interior, R))
    match = matcher.solve()
    if matcher.saturates_left:
        plus = tuple((x, match[x, "+"]) for x in interior)
        minus = tuple((x, match[x, "-"]) for x in interior)
        return ParadoxCertificate(R, collar, tuple(interior), plus, minus)
    A, NA = matcher.hall_violator()
    order = space.index
    return HallViolation(R, collar, tuple(A), tuple(sorted(NA, key=order)))


def verify_certificate(space: Space, cert: ParadoxCertificate) -> bool:
    """Independent re-check; raise :class:`ValidationError` on any defect."""
    interior = list(cert.interior)
    if set(interior) != set(space.interior(cert.collar)):
        raise ValidationError("interior does not match the collar")
    for name, pairs in (("plus", cert.plus_pairs), ("minus", cert.minus_pairs)):
        if sorted(map(space.index, (x for x, _ in pairs))) != sorted(map(space.index, interior)):
            raise ValidationError(f"{name} branch is not defined exactly on the interior")
        for x, y in pairs:
            if y not in space:
                raise ValidationError(f"{name} branch leaves the window at {y!r}")
            if space.d(x, y) > cert.R:
                raise ValidationError(f"{name} branch moves {x!r} by more than R")
    images = [y for _, y in cert.plus_pairs] + [y for _, y in cert.minus_pairs]
    if len(set(images)) != len(images):
        raise ValidationError("branches are not jointly injective")
    return True


def verify_hall_violation(space: Space, viol: HallViolation) -> bool:
    """Recompute ``N(A)`` by enumeration and check ``|N(A)| < |A|``."""
    interior = set(space.interior(viol.collar))
    for x, sign in viol.left:
        if x not in interior or sign not in "+-":
            raise ValidationError(f"({x!r}, {sign!r}) is not a left vertex")
    neigh = {y for x, _ in viol.left for y in space.points if space.d(x, y) <= viol.R}
    if neigh != set(viol.neighbors):
        raise ValidationError("recorded neighbourhood is wrong")
    if not len(neigh) < len(set(viol.left)):
        raise ValidationError("not a Hall violation")
    return True


# --------------------------------------------------------------------------
# traces


def approx_trace(a, F: Iterable) -> Fraction:
    """Average of the diagonal of ``a`` over the finite set ``F``."""
    F = list(dict.fromkeys(F))
    if not F:
        raise ValueError("F must be nonempty")
    return sum((a[x, x] for x in F), Fraction(0)) / len(F)


def trace_defect(a, b, F: Iterable) -> Fraction:
    return abs(approx_trace(a @ b - b @ a, F))


def normalized_trace(space: Space, a) -> Fraction:
    """The unique normalised trace of the full matrix algebra on a finite window."""
    return a.trace() / len(space)


@dataclass(frozen=True)
class TraceBound:
    """``C / |F|`` with ``C = 2 prop maxball max|entry|^2``."""

    constant: Fraction
    size: int
    value: Fraction = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "value", self.constant / self.size)


def trace_defect_bound(a, b, F) -> TraceBound:
    space = a.space
    prop = max(a.propagation, b.propagation)
    ball = max(len(space.ball(x, prop)) for x in space.points)
    m = max((abs(v) for v in list(a.entries.values()) + list(b.entries.values())),
            default=Fraction(0))
    return TraceBound(2 * prop * ball * m * m, len(set(F)))
