"""Explicit finite-propagation operators built from the coarse structure of a window.

Everything here is exact: entries are fractions and every identity is
checked with ``==`` on :class:`SparseOperator`, never with a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..amen import ParadoxCertificate, verify_certificate
from ..errors import IdentityFailure, PreconditionError
from ..space import Partition, Space, UVDecomposition, r_components
from ..translations import tij_family, to_operator
from .norms import norm1_exact, norm_inf_exact
from .operator import EquivWitness, SparseOperator, alg_equiv_check


# --------------------------------------------------------------------------
# truncated shift along a ray


def shift_from_ray(space: Space, ray: Sequence, R: int):
    """The isometry ``S`` pushing ``delta_{x_n}`` to ``delta_{x_{n+1}}`` and ``T = S^T``.

    ``S`` fixes every basis vector off the ray and kills ``delta_{x_m}`` (the
    window end of the ray), so ``TS = 1 - e_{x_m x_m}``.
    """
    ray = list(ray)
    if not ray:
        raise PreconditionError("ray must be nonempty")
    if len(set(ray)) != len(ray):
        raise PreconditionError("ray repeats a point")
    for a, b in zip(ray, ray[1:]):
        if space.d(a, b) > R:
            raise PreconditionError(f"ray is not {R}-connected at {a!r} -> {b!r}")
    on_ray = set(ray)
    entries = {(y, y): 1 for y in space.points if y not in on_ray}
    entries.update({(b, a): 1 for a, b in zip(ray, ray[1:])})
    S = SparseOperator.from_points(space, entries)
    return S, S.T


def truncated_shift_report(S: SparseOperator, T: SparseOperator, ray: Sequence) -> dict:
    """Window-scale shadow of a non-invertible left-invertible isometry."""
    space = S.space
    first, last = ray[0], ray[-1]
    one = SparseOperator.identity(space)
    return {
        "TS = 1 - e_last": T @ S == one - SparseOperator.unit(space, last, last),
        "first not in column supports": all(
            (first, y) not in S.support for y in space.points
        ),
        "propagation": S.propagation,
    }


# --------------------------------------------------------------------------
# quasidiagonalising projections on gap unions


@dataclass(frozen=True)
class QDCertificate:
    n: int
    projection: SparseOperator
    commutators_zero: bool
    norm_1: Fraction
    norm_inf: Fraction
    residuals: tuple = ()


def _residual_small(vec: Mapping, eps, p) -> bool:
    p = Fraction(p)
    if p.denominator == 1:
        total = sum((abs(Fraction(v)) ** int(p) for v in vec.values()), Fraction(0))
        return total < Fraction(eps) ** int(p)
    total = sum(abs(float(v)) ** float(p) for v in vec.values())
    return total ** (1 / float(p)) < float(eps)


def qd_projection(space: Space, ops: Iterable[SparseOperator], vectors: Iterable[Mapping],
                  eps, p=1) -> QDCertificate:
    """Least ``n`` such that ``P_n = 1_{X_1 u ... u X_n}`` commutes with every
    operator exactly and moves every vector by less than ``eps`` in l^p."""
    if space.blocks is None:
        raise PreconditionError("qd_projection needs a gap_union space")
    ops = list(ops)
    vecs = []
    for v in vectors:
        bad = [x for x in v if x not in space]
        if bad:
            raise PreconditionError(f"vector supported outside the window at {bad[0]!r}")
        vecs.append({x: Fraction(c) for x, c in v.items() if c})
    covered: list = []
    for n, block in enumerate(space.blocks, start=1):
        covered.extend(block)
        P = SparseOperator.indicator(space, covered)
        if not all(T @ P == P @ T for T in ops):
            continue
        inside = set(covered)
        residuals = [{x: c for x, c in v.items() if x not in inside} for v in vecs]
        if all(_residual_small(r, eps, p) for r in residuals):
            return QDCertificate(n, P, True, norm1_exact(P), norm_inf_exact(P),
                                 tuple(residuals))
    raise AssertionError("P_N = 1 always qualifies")  # pragma: no cover


# --------------------------------------------------------------------------
# the ideal generated by 1_B


@dataclass(frozen=True)
class IdealWitness:
    f: SparseOperator
    partition: Partition
    family: dict  # (i, j) -> T_ij
    counts: dict  # y in A -> (sum_ij T_ji 1_B T_ij)_yy

    @property
    def max_count(self):
        return max(self.counts.values(), default=0)


def ideal_witness(space: Space, A: Iterable, B: Iterable, R: int) -> IdealWitness:
    """``f`` diagonal with ``1_A = f 1_A sum_ij T_ji 1_B T_ij``, verified exactly.

    Requires ``d(x, B) <= R`` for every ``x`` in ``A``.
    """
    A, B = list(A), list(B)
    if not A or not B:
        raise PreconditionError("A and B must be nonempty")
    dist = space.distance_to(B)
    far = [x for x in A if dist[space.index(x)] > R]
    if far:
        raise PreconditionError(f"d({far[0]!r}, B) = {dist[space.index(far[0])]:g} > R = {R}")
    part, fam = tij_family(space, R)
    ops = {k: to_operator(space, t) for k, t in fam.items()}
    oneB = SparseOperator.indicator(space, B)
    oneA = SparseOperator.indicator(space, A)
    total = SparseOperator.zero(space)
    for (i, j), Tij in ops.items():
        term = ops[j, i] @ oneB @ Tij
        if not term.is_diagonal():
            raise IdentityFailure("T_ji 1_B T_ij is diagonal")
        total = total + term
    diag = total.diagonal()
    counts = {y: diag.get(y, Fraction(0)) for y in A}
    n = len(part)
    bad = [y for y, c in counts.items() if not (c.denominator == 1 and 1 <= c <= n)]
    if bad:
        raise IdentityFailure("counts lie in {1..n}", f"count {counts[bad[0]]} at {bad[0]!r}")
    f = SparseOperator.diagonal_from(space, {y: 1 / c for y, c in counts.items()})
    if f @ oneA @ total != oneA:
        raise IdentityFailure("1_A = f 1_A sum T_ji 1_B T_ij")
    return IdealWitness(f, part, ops, counts)


# --------------------------------------------------------------------------
# controlled Mayer-Vietoris split and glue


def mv_split(a: SparseOperator, uv: UVDecomposition):
    """``a = 1_U a + 1_V a``."""
    x1 = SparseOperator.indicator(a.space, uv.u) @ a
    x2 = SparseOperator.indicator(a.space, uv.v) @ a
    if x1 + x2 != a:
        raise IdentityFailure("x1 + x2 = a")
    return x1, x2


def _neighborhoods(space, pieces, r):
    return [set(space.neighborhood(p, r)) for p in pieces]


def _supported_in(a: SparseOperator, nbhds) -> bool:
    return all(any(x in N and y in N for N in nbhds) for x, y in a.support)


def mv_glue(a: SparseOperator, b: SparseOperator, uv: UVDecomposition, r: int) -> SparseOperator:
    """``c = (a chi' + b chi) / 2`` with ``chi``, ``chi'`` the indicators of the
    ``r``-neighbourhoods of the U- and V-pieces."""
    space = a.space
    nu = _neighborhoods(space, uv.u_pieces, r)
    nv = _neighborhoods(space, uv.v_pieces, r)
    if not _supported_in(a, nu):
        raise PreconditionError("a is not supported in the union of U_i^(r) x U_i^(r)")
    if not _supported_in(b, nv):
        raise PreconditionError("b is not supported in the union of V_j^(r) x V_j^(r)")
    chi = SparseOperator.indicator(space, set().union(*nu) if nu else ())
    chi2 = SparseOperator.indicator(space, set().union(*nv) if nv else ())
    return (a @ chi2 + b @ chi) / 2


# --------------------------------------------------------------------------
# block decomposition over ~_r classes


@dataclass(frozen=True)
class BlockDecomposition:
    partition: Partition
    blocks: tuple  # SparseOperator per class, supported in class x class
    residue: SparseOperator

    @property
    def exact(self):
        return self.residue.is_zero()

    def block_matrix(self, k):
        """Block ``k`` as a list of rows in the class's point order."""
        cls = self.partition.classes[k]
        blk = self.blocks[k]
        return [[blk[x, y] for y in cls] for x in cls]


def block_decompose(a: SparseOperator, r: int) -> BlockDecomposition:
    """Split ``a`` along the ``r``-components; the off-block remainder is returned as residue."""
    part = r_components(a.space, r)
    label = part.class_of()
    pts = a.space.points
    per_block: list[dict] = [{} for _ in part.classes]
    residue = {}
    for (i, j), v in a._entries.items():
        li, lj = label[pts[i]], label[pts[j]]
        if li == lj:
            per_block[li][i, j] = v
        else:
            residue[i, j] = v
    blocks = tuple(SparseOperator(a.space, e) for e in per_block)
    return BlockDecomposition(part, blocks, SparseOperator(a.space, residue))


# --------------------------------------------------------------------------
# Cuntz isometries from a paradox certificate


@dataclass(frozen=True)
class CuntzFamily:
    S1: SparseOperator
    S2: SparseOperator
    T1: SparseOperator
    T2: SparseOperator
    interior: tuple
    matched_range: tuple


@dataclass(frozen=True)
class LeavittReport:
    relations: dict
    interior_size: int
    range_size: int
    unmatched: tuple = field(default_factory=tuple)  # window points outside the range

    @property
    def all_hold(self):
        return all(self.relations.values())


def cuntz_build(space: Space, cert: ParadoxCertificate) -> CuntzFamily:
    """``S_i`` are the 0/1 operators of the two matching branches, ``T_i = S_i^T``."""
    verify_certificate(space, cert)
    S1 = SparseOperator.from_points(space, {(y, x): 1 for x, y in cert.plus_pairs})
    S2 = SparseOperator.from_points(space, {(y, x): 1 for x, y in cert.minus_pairs})
    rng = tuple(y for _, y in cert.plus_pairs) + tuple(y for _, y in cert.minus_pairs)
    return CuntzFamily(S1, S2, S1.T, S2.T, tuple(cert.interior), rng)


def leavitt_verify(fam: CuntzFamily) -> LeavittReport:
    """Leavitt relations on the interior sub-identity ``1_I``, checked exactly."""
    space = fam.S1.space
    one_I = SparseOperator.indicator(space, fam.interior)
    one_rng = SparseOperator.indicator(space, fam.matched_range)
    zero = SparseOperator.zero(space)
    rel = {
        "T1 S1 = 1_I": fam.T1 @ fam.S1 == one_I,
        "T2 S2 = 1_I": fam.T2 @ fam.S2 == one_I,
        "T1 S2 = 0": fam.T1 @ fam.S2 == zero,
        "T2 S1 = 0": fam.T2 @ fam.S1 == zero,
        "S1 T1 + S2 T2 = 1_range": fam.S1 @ fam.T1 + fam.S2 @ fam.T2 == one_rng,
    }
    inside = set(fam.matched_range)
    return LeavittReport(rel, len(fam.interior), len(inside),
                         tuple(x for x in space.points if x not in inside))


def standard_form_witness(fam: CuntzFamily):
    """``e = S1 T1``, equivalent to ``1_I`` via ``S1, T1``; its complement
    ``1_range - e`` is equivalent to ``1_I`` via ``S2, T2``."""
    space = fam.S1.space
    one_I = SparseOperator.indicator(space, fam.interior)
    one_rng = SparseOperator.indicator(space, fam.matched_range)
    e = fam.S1 @ fam.T1
    w1 = alg_equiv_check(e, one_I, fam.S1, fam.T1)
    w2 = alg_equiv_check(one_rng - e, one_I, fam.S2, fam.T2)
    return e, (w1, w2)


# --------------------------------------------------------------------------
# failure of cancellation along rays


@dataclass(frozen=True)
class NonCancellation:
    p: SparseOperator
    q: SparseOperator
    v: SparseOperator
    w: SparseOperator
    last_points: tuple  # support of 1 - p
    first_points: tuple  # support of 1 - q


def check_ray_family(space: Space, r: int, rays: Sequence[Sequence]) -> None:
    """Spacing conditions on a family of rays; raise :class:`PreconditionError` if violated."""
    rays = [list(s) for s in rays]
    if not rays or any(not s for s in rays):
        raise PreconditionError("need at least one nonempty ray")
    for n, s in enumerate(rays):
        for i in range(len(s) - 1):
            if space.d(s[i], s[i + 1]) > 2 * r:
                raise PreconditionError(f"ray {n}: step {i} longer than 2r")
            d1 = space.d(s[0], s[i + 1])
            if not (i + 1) * r <= d1 <= (i + 2) * r:
                raise PreconditionError(
                    f"ray {n}: d(x_1, x_{i + 2}) = {d1} not in [{(i + 1) * r}, {(i + 2) * r}]"
                )
    lengths = [len(s) for s in rays]
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise PreconditionError("ray lengths must strictly increase")
    gaps = []
    for n in range(1, len(rays)):
        earlier = [x for s in rays[:n] for x in s]
        gaps.append(int(space.distance_to(earlier)[space.indices(rays[n])].min()))
    if any(g <= 0 for g in gaps) or any(b <= a for a, b in zip(gaps, gaps[1:])):
        raise PreconditionError(f"gaps between rays must be positive and increasing, got {gaps}")


def noncancellation_witness(space: Space, r: int, rays: Sequence[Sequence]) -> NonCancellation:
    """Idempotents ``p ~ q`` (``wv = p``, ``vw = q``) whose complements are
    the last points and the first points of the rays."""
    check_ray_family(space, r, rays)
    rays = [list(s) for s in rays]
    C = {x for s in rays for x in s}
    off = [x for x in space.points if x not in C]
    A = [x for s in rays for x in s[:-1]]
    B = [x for s in rays for x in s[1:]]
    v_e = {(x, x): 1 for x in off}
    w_e = {(x, x): 1 for x in off}
    for s in rays:
        v_e.update({(s[i + 1], s[i]): 1 for i in range(len(s) - 1)})
        w_e.update({(s[i - 1], s[i]): 1 for i in range(1, len(s))})
    v = SparseOperator.from_points(space, v_e)
    w = SparseOperator.from_points(space, w_e)
    p = SparseOperator.indicator(space, A + off)
    q = SparseOperator.indicator(space, B + off)
    if w @ v != p:
        raise IdentityFailure("wv = p")
    if v @ w != q:
        raise IdentityFailure("vw = q")
    return NonCancellation(p, q, v, w, tuple(s[-1] for s in rays), tuple(s[0] for s in rays))


__all__ = [
    "BlockDecomposition", "CuntzFamily", "EquivWitness", "IdealWitness", "LeavittReport",
    "NonCancellation", "QDCertificate", "block_decompose", "check_ray_family", "cuntz_build",
    "ideal_witness", "leavitt_verify", "mv_glue", "mv_split", "noncancellation_witness",
    "qd_projection", "shift_from_ray", "standard_form_witness", "truncated_shift_report",
]
