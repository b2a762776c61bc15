"""Finite windows of bounded-geometry metric spaces.

A :class:`Space` is an honest finite metric space: an ordered tuple of point
ids and a dense symmetric integer distance matrix.  The ``family_tag`` records
which infinite space it is a window of, so that "interior" points (those whose
ambient ball of a given radius is entirely visible) can be identified.

Two separation conventions are in use and both are deliberate:

* a :class:`SeparatedPartition` with parameter ``S`` has pairwise distance
  ``>= S`` inside each class;
* the pieces of a :class:`UVDecomposition` with parameter ``r`` are pairwise
  at distance ``> r`` within each colour.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import ValidationError
from .ktheory.towers import TowerSpec


@dataclass(frozen=True, eq=False)
class Space:
    points: tuple
    metric: np.ndarray
    family_tag: dict = field(default_factory=lambda: {"kind": "Explicit"})
    # consecutive blocks X_1, X_2, ... for gap unions; None otherwise
    blocks: tuple | None = None

    def __post_init__(self):
        points = tuple(self.points)
        metric = np.array(self.metric, dtype=np.int64)
        metric.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "metric", metric)
        index = {x: i for i, x in enumerate(points)}
        if len(index) != len(points):
            raise ValidationError("duplicate point ids")
        if metric.shape != (len(points), len(points)):
            raise ValidationError(
                f"metric has shape {metric.shape}, expected {(len(points),) * 2}"
            )
        object.__setattr__(self, "_index", index)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, x):
        return x in self._index

    def __repr__(self):
        return f"Space({self.space_id}, {len(self)} points)"

    def index(self, x):
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"point {x!r} is not in {self.space_id}") from None

    def indices(self, pts: Iterable) -> list[int]:
        return [self.index(x) for x in pts]

    def d(self, x, y) -> int:
        return int(self.metric[self.index(x), self.index(y)])

    def mask(self, pts: Iterable) -> np.ndarray:
        m = np.zeros(len(self), dtype=bool)
        m[self.indices(pts)] = True
        return m

    def subset(self, m: np.ndarray) -> list:
        return [self.points[i] for i in np.flatnonzero(m)]

    @property
    def kind(self):
        return self.family_tag["kind"]

    @property
    def space_id(self):
        tag = dict(self.family_tag)
        kind = tag.pop("kind")
        if kind == "Explicit":
            import hashlib

            h = hashlib.sha1(repr((self.points, self.metric.tolist())).encode())
            return f"Explicit({h.hexdigest()[:12]})"
        args = ",".join(f"{k}={_tag_value(v)}" for k, v in sorted(tag.items()))
        return f"{kind}({args})"

    def ball(self, x, radius) -> list:
        return self.subset(self.metric[self.index(x)] <= radius)

    def distance_to(self, pts: Iterable) -> np.ndarray:
        """``d(x, A)`` for every point ``x``; ``inf`` when ``A`` is empty."""
        idx = self.indices(pts)
        if not idx:
            return np.full(len(self), np.inf)
        return self.metric[:, idx].min(axis=1)

    def neighborhood(self, pts: Iterable, r) -> list:
        """The closed ``r``-neighbourhood ``{x : d(x, A) <= r}``."""
        return self.subset(self.distance_to(pts) <= r)

    def diameter(self, pts: Iterable) -> int:
        idx = self.indices(pts)
        if not idx:
            return 0
        return int(self.metric[np.ix_(idx, idx)].max())

    def interior(self, radius) -> list:
        """Points whose ambient ball of the given radius lies inside the window."""
        tag = self.family_tag
        kind = tag["kind"]
        if kind == "ZWindow":
            lo, hi = tag["start"] + radius, tag["start"] + tag["n"] - 1 - radius
            return [x for x in self.points if lo <= x <= hi]
        if kind == "ZdWindow":
            lo, hi = radius, tag["n"] - 1 - radius
            return [x for x in self.points if all(lo <= c <= hi for c in x)]
        if kind == "FreeGroupBall":
            return [w for w in self.points if len(w) + radius <= tag["radius"]]
        if kind == "TowerGroupWindow":
            # the ambient ball of radius rho about g is the coset g*G_rho
            return list(self.points) if radius <= tag["level"] else []
        return list(self.points)

    def validate(self):
        """Check the metric axioms; raise :class:`ValidationError` on failure."""
        validate_metric(self.metric)
        return self


def _tag_value(v):
    if isinstance(v, TowerSpec):
        return f"{list(v.prefix)}|{list(v.cycle)}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(str(x) for x in v) + "]"
    return str(v)


def validate_metric(metric) -> None:
    m = np.asarray(metric)
    n = m.shape[0]
    if m.ndim != 2 or m.shape != (n, n):
        raise ValidationError("metric must be a square matrix")
    if not np.issubdtype(m.dtype, np.integer):
        raise ValidationError("metric entries must be integers")
    if (m < 0).any():
        raise ValidationError("metric entries must be nonnegative")
    if (np.diag(m) != 0).any():
        raise ValidationError("metric(x, x) must be 0")
    if not (m == m.T).all():
        i, j = np.argwhere(m != m.T)[0]
        raise ValidationError(f"metric not symmetric at ({i}, {j})")
    off = ~np.eye(n, dtype=bool)
    if (m[off] == 0).any():
        raise ValidationError("distinct points at distance 0")
    for k in range(n):
        bad = m > m[:, k, None] + m[None, k, :]
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ValidationError(
                f"triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})"
            )


# --------------------------------------------------------------------------
# built-in families


def z_window(n: int, start: int = 0) -> Space:
    """The integers ``start, ..., start + n - 1`` with ``|x - y|``."""
    if n < 1:
        raise ValidationError("window size must be >= 1")
    pts = np.arange(start, start + n)
    metric = np.abs(pts[:, None] - pts[None, :])
    return Space(tuple(int(x) for x in pts), metric, {"kind": "ZWindow", "n": n, "start": start})


def zd_window(d: int, n: int) -> Space:
    """The cube ``{0..n-1}^d`` in ``Z^d`` with the word (l1) metric."""
    if n < 1 or d < 1:
        raise ValidationError("ZdWindow needs d >= 1 and n >= 1")
    coords = np.array(np.meshgrid(*[np.arange(n)] * d, indexing="ij")).reshape(d, -1).T
    metric = np.abs(coords[:, None, :] - coords[None, :, :]).sum(axis=2)
    pts = tuple(tuple(int(c) for c in row) for row in coords)
    return Space(pts, metric, {"kind": "ZdWindow", "d": d, "n": n})


def free_generators(k: int) -> list[str]:
    if not 1 <= k <= 26:
        raise ValidationError("free group rank must be in 1..26")
    gens = [chr(ord("a") + i) for i in range(k)]
    return gens + [g.upper() for g in gens]


def _inverse_letter(c: str) -> str:
    return c.lower() if c.isupper() else c.upper()


def free_group_ball(k: int, radius: int) -> Space:
    """Ball of the given radius about the identity in the free group ``F_k``.

    Elements are reduced words over ``a, b, ...`` with inverses ``A, B, ...``;
    the identity is ``""``.  Points are listed in shortlex order.
    """
    if radius < 0:
        raise ValidationError("radius must be >= 0")
    letters = free_generators(k)
    words = [""]
    parent = {"": None}
    frontier = [""]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for c in letters:
                if w and c == _inverse_letter(w[-1]):
                    continue
                nxt.append(w + c)
                parent[w + c] = w
        words.extend(nxt)
        frontier = nxt
    index = {w: i for i, w in enumerate(words)}
    rows = [index[w] for w in words[1:]]
    cols = [index[parent[w]] for w in words[1:]]
    n = len(words)
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    # balls in a tree are geodesically convex, so graph distance = word metric
    metric = shortest_path(adj, directed=False, unweighted=True).astype(np.int64)
    return Space(tuple(words), metric, {"kind": "FreeGroupBall", "k": k, "radius": radius})


def gap_union(sizes: Sequence[int], gaps: Sequence[int]) -> Space:
    """Blocks of consecutive integers with ``d(X_n, X_1 u ... u X_{n-1}) = gaps[n-2]``.

    Only the first ``len(sizes) - 1`` gaps are used; the gap sequence must be
    strictly increasing.
    """
    sizes = [int(s) for s in sizes]
    gaps = [int(g) for g in gaps]
    if not sizes or any(s < 1 for s in sizes):
        raise ValidationError("gap_union needs nonempty positive block sizes")
    if len(gaps) < len(sizes) - 1:
        raise ValidationError(f"need {len(sizes) - 1} gaps, got {len(gaps)}")
    if any(g < 1 for g in gaps):
        raise ValidationError("gaps must be >= 1")
    if any(b <= a for a, b in zip(gaps, gaps[1:])):
        raise ValidationError("gap rule must be strictly increasing")
    blocks = []
    pos = 0
    for n, s in enumerate(sizes):
        if n:
            pos = blocks[-1][-1] + gaps[n - 1]
        blocks.append(tuple(range(pos, pos + s)))
    pts = [x for b in blocks for x in b]
    arr = np.array(pts)
    metric = np.abs(arr[:, None] - arr[None, :])
    tag = {"kind": "GapUnion", "sizes": sizes, "gaps": gaps[: len(sizes) - 1]}
    return Space(tuple(pts), metric, tag, blocks=tuple(blocks))


def tower_window(tower: TowerSpec, level: int) -> Space:
    """The finite subgroup ``G_level`` with ``d(g, h) = min{n : g^-1 h in G_n}``."""
    if level < 0:
        raise ValidationError("level must be >= 0")
    incs = tower.increments(level)
    size = int(np.prod(incs, dtype=np.int64)) if incs else 1
    g = np.arange(size)
    digits = np.zeros((size, level), dtype=np.int64)
    rest = g.copy()
    for n, r in enumerate(incs):
        rest, digits[:, n] = np.divmod(rest, r)
    metric = np.zeros((size, size), dtype=np.int64)
    for n in range(level):
        differ = digits[:, None, n] != digits[None, :, n]
        metric[differ] = n + 1
    return Space(tuple(int(x) for x in g), metric,
                 {"kind": "TowerGroupWindow", "tower": tower, "level": level})


def explicit_space(points: Sequence[Hashable], metric) -> Space:
    """A user-supplied finite metric space; the metric axioms are checked."""
    m = np.asarray(metric)
    if m.dtype.kind == "f":
        if not np.all(m == np.round(m)):
            raise ValidationError("metric entries must be integers")
        m = m.astype(np.int64)
    validate_metric(m)
    return Space(tuple(points), m, {"kind": "Explicit"})


# --------------------------------------------------------------------------
# family specifications

_ALIASES = {
    "z": "z", "zwindow": "z", "line": "z",
    "zd": "zd", "zdwindow": "zd",
    "free": "free", "freegroupball": "free",
    "tower": "tower", "towergroupwindow": "tower",
    "gap": "gap", "gapunion": "gap",
    "explicit": "explicit",
}


def parse_family(spec) -> dict:
    """Normalise a family spec.

    Accepts a dict ``{"family": name, ...params}`` or a short string:
    ``"z"``, ``"z2"`` (``Z^2``), ``"f2"`` (free group of rank 2).
    """
    if isinstance(spec, str):
        s = spec.strip().lower()
        if s in _ALIASES:
            spec = {"family": s}
        elif s.startswith("z") and s[1:].isdigit():
            spec = {"family": "zd", "d": int(s[1:])}
        elif s.startswith("f") and s[1:].isdigit():
            spec = {"family": "free", "k": int(s[1:])}
        else:
            raise ValidationError(f"unknown family {spec!r}")
    if not isinstance(spec, dict) or "family" not in spec:
        raise ValidationError("family spec needs a 'family' field")
    name = _ALIASES.get(str(spec["family"]).lower())
    if name is None:
        raise ValidationError(f"unknown family {spec['family']!r}")
    out = dict(spec)
    out["family"] = name
    if name == "free":
        out.setdefault("k", 2)
    elif name == "zd":
        out.setdefault("d", 2)
    elif name == "tower":
        t = out.get("tower")
        if t is None:
            raise ValidationError("tower family needs a 'tower' field")
        if not isinstance(t, TowerSpec):
            out["tower"] = TowerSpec.from_json(t)
    elif name == "gap":
        for key in ("sizes", "gaps"):
            if key not in out:
                raise ValidationError(f"gap family needs a '{key}' field")
    return out


def make_window(family_spec, size: int) -> Space:
    """Build the window of the given size of a named family.

    ``size`` is the number of points for ``z``, the side length for ``zd``,
    the radius for ``free``, the level for ``tower`` and the number of blocks
    for ``gap``.  Explicit families ignore ``size``.
    """
    fam = parse_family(family_spec)
    name = fam["family"]
    if name in ("z", "zd", "gap") and size < 1:
        raise ValidationError("window size must be >= 1")
    if name == "z":
        return z_window(size, fam.get("start", 0))
    if name == "zd":
        return zd_window(fam["d"], size)
    if name == "free":
        return free_group_ball(fam["k"], size)
    if name == "tower":
        return tower_window(fam["tower"], size)
    if name == "gap":
        return gap_union(_rule(fam["sizes"], size), _rule(fam["gaps"], size - 1))
    if "metric" not in fam or "points" not in fam:
        raise ValidationError("explicit family needs 'points' and 'metric'")
    return explicit_space(fam["points"], fam["metric"])


def _rule(rule, count) -> list[int]:
    if callable(rule):
        return [int(rule(n)) for n in range(1, count + 1)]
    rule = list(rule)
    if len(rule) < count:
        raise ValidationError(f"rule has {len(rule)} entries, {count} needed")
    return rule[:count]


def family_origin(family_spec):
    """A base point of the infinite space, present in every window."""
    fam = parse_family(family_spec)
    return {"z": fam.get("start", 0), "zd": None, "free": "", "tower": 0,
            "gap": 0, "explicit": None}[fam["family"]]


# --------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty classes covering a space, built at parameter ``parameter``."""

    classes: tuple
    parameter: int

    def __len__(self):
        return len(self.classes)

    def sizes(self):
        return [len(c) for c in self.classes]

    def class_of(self):
        return {x: i for i, c in enumerate(self.classes) for x in c}


@dataclass(frozen=True)
class SeparatedPartition(Partition):
    """Partition whose classes are ``S``-separated: distinct points at distance ``>= S``."""

    @property
    def separation(self):
        return self.parameter


def _classes_from_labels(space: Space, labels) -> tuple:
    order = {}
    for i, lab in enumerate(labels):
        order.setdefault(lab, []).append(space.points[i])
    return tuple(tuple(c) for c in order.values())


def r_components(space: Space, R) -> Partition:
    """Equivalence classes of the relation generated by ``d(x, y) <= R``."""
    if R < 0:
        raise ValueError("R must be nonnegative")
    adj = csr_matrix(space.metric <= R)
    _, labels = connected_components(adj, directed=False)
    return Partition(_classes_from_labels(space, labels), R)


def separated_partition(space: Space, S: int) -> SeparatedPartition:
    """Greedy first-fit split of the space into ``S``-separated classes."""
    if S < 1:
        raise ValueError("S must be >= 1")
    blocked: list[np.ndarray] = []
    members: list[list] = []
    for i, x in enumerate(space.points):
        for c, mask in enumerate(blocked):
            if not mask[i]:
                break
        else:
            c = len(members)
            members.append([])
            blocked.append(np.zeros(len(space), dtype=bool))
        members[c].append(x)
        blocked[c] |= space.metric[i] < S
    return SeparatedPartition(tuple(tuple(m) for m in members), S)


def growth_profile(space: Space, radii: Iterable[int]) -> list[int]:
    """``max_x |B_R(x)|`` for each radius."""
    out = []
    for R in radii:
        if R < 0:
            raise ValueError("radii must be nonnegative")
        out.append(int((space.metric <= R).sum(axis=1).max()))
    return out


def asdim_zero_witness(family_spec, r, window_sizes: Iterable[int]) -> list[int]:
    """Largest ``r``-component in each window; bounded traces indicate asdim 0."""
    return [max(r_components(make_window(family_spec, n), r).sizes()) for n in window_sizes]


# --------------------------------------------------------------------------
# asymptotic dimension one


@dataclass(frozen=True)
class UVDecomposition:
    """``X = U u V`` with ``U``, ``V`` unions of pieces pairwise ``> r`` apart.

    Every piece has diameter ``<= bound``.
    """

    u_pieces: tuple
    v_pieces: tuple
    r: int
    bound: int

    @property
    def u(self):
        return [x for p in self.u_pieces for x in p]

    @property
    def v(self):
        return [x for p in self.v_pieces for x in p]


def check_uv_decomposition(space: Space, uv: UVDecomposition) -> bool:
    """Re-check every invariant of ``uv``; raise :class:`ValidationError` on failure."""
    pieces = list(uv.u_pieces) + list(uv.v_pieces)
    seen = set()
    for piece in pieces:
        if not piece:
            raise ValidationError("empty piece")
        for x in piece:
            if x in seen:
                raise ValidationError(f"point {x!r} lies in two pieces")
            seen.add(x)
    if seen != set(space.points):
        raise ValidationError("pieces do not cover the space")
    for piece in pieces:
        if space.diameter(piece) > uv.bound:
            raise ValidationError(f"piece of diameter {space.diameter(piece)} > {uv.bound}")
    for name, coll in (("U", uv.u_pieces), ("V", uv.v_pieces)):
        idx = [space.indices(p) for p in coll]
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                dist = space.metric[np.ix_(idx[a], idx[b])].min()
                if dist <= uv.r:
                    raise ValidationError(
                        f"{name}-pieces {a} and {b} at distance {dist} <= r={uv.r}"
                    )
    return True


def asdim_one_decomposition(family_spec, r: int, window: int) -> UVDecomposition:
    """Verified two-colour decomposition for ``Z`` and free-group windows.

    ``Z``: consecutive intervals of ``2r`` points, coloured alternately.
    Free groups: annuli ``2rm <= |w| < 2r(m+1)`` coloured by the parity of
    ``m``, each annulus split according to the prefix of length
    ``2rm - ceil(r/2)`` (the subtree the word hangs from).
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    fam = parse_family(family_spec)
    space = make_window(fam, window)
    if fam["family"] == "z":
        start = space.family_tag["start"]
        groups: dict[int, list] = {}
        for x in space.points:
            groups.setdefault((x - start) // (2 * r), []).append(x)
        u = tuple(tuple(g) for m, g in sorted(groups.items()) if m % 2 == 0)
        v = tuple(tuple(g) for m, g in sorted(groups.items()) if m % 2 == 1)
        uv = UVDecomposition(u, v, r, 2 * r - 1)
    elif fam["family"] == "free":
        half = -(-r // 2)
        annuli: dict[tuple, list] = {}
        for w in space.points:
            m = len(w) // (2 * r)
            cut = max(0, 2 * r * m - half)
            annuli.setdefault((m, w[:cut]), []).append(w)
        keys = sorted(annuli, key=lambda k: (k[0], len(k[1]), k[1]))
        u = tuple(tuple(annuli[k]) for k in keys if k[0] % 2 == 0)
        v = tuple(tuple(annuli[k]) for k in keys if k[0] % 2 == 1)
        uv = UVDecomposition(u, v, r, 2 * (2 * r - 1 + half))
    else:
        raise NotImplementedError(
            f"no built-in asdim-one decomposition for family {fam['family']!r}"
        )
    check_uv_decomposition(space, uv)
    return uv


def bfs_order(space: Space, root, step: int = 1) -> list:
    """Points reachable from ``root`` through steps of length ``<= step``, in BFS order."""
    seen = {space.index(root)}
    order = [root]
    queue = deque([space.index(root)])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(space.metric[i] <= step):
            if j not in seen:
                seen.add(j)
                order.append(space.points[j])
                queue.append(j)
    return order
