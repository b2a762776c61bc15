import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsekit.amen import paradox_certificate
from coarsekit.errors import IdentityFailure, PreconditionError
from coarsekit.ktheory import TowerSpec
from coarsekit.roe import (SparseOperator, block_decompose, check_ray_family, cuntz_build,
                           ideal_witness, leavitt_verify, mv_glue, mv_split, norm1_exact,
                           norm_inf_exact, noncancellation_witness, qd_projection,
                           shift_from_ray, standard_form_witness, truncated_shift_report)
from coarsekit.space import (asdim_one_decomposition, free_group_ball, gap_union, tower_window,
                             z_window)


def test_shift_from_ray_examples():
    z = z_window(10)
    S, T = shift_from_ray(z, list(range(10)), 1)
    assert S.nnz == 9
    rep = truncated_shift_report(S, T, list(range(10)))
    assert rep["TS = 1 - e_last"] and rep["first not in column supports"]
    S1, T1 = shift_from_ray(z, [4], 1)
    assert T1 @ S1 == SparseOperator.identity(z) - SparseOperator.unit(z, 4, 4)
    assert S1[0, 0] == 1 and S1[4, 4] == 0
    with pytest.raises(PreconditionError):
        shift_from_ray(z, [0, 2], 1)


def test_qd_examples():
    g = gap_union([2] * 6, [1, 2, 3, 4, 5])
    one = SparseOperator.identity(g)
    assert qd_projection(g, [one], [{0: 1}], Fraction(1, 2)).n == 1
    band = SparseOperator(g, {(i, j): 1 for i in range(len(g)) for j in range(len(g))
                              if g.metric[i, j] <= 2})
    cert = qd_projection(g, [band], [], Fraction(1, 2))
    assert cert.n == 3
    assert cert.commutators_zero and cert.norm_1 == cert.norm_inf == 1
    assert band @ cert.projection == cert.projection @ band
    with pytest.raises(PreconditionError):
        qd_projection(g, [], [{999: 1}], Fraction(1, 2))
    with pytest.raises(PreconditionError):
        qd_projection(z_window(4), [], [], Fraction(1, 2))


def test_qd_vectors_push_n_out():
    g = gap_union([1] * 5, [1, 2, 3, 4])
    far = g.points[-1]
    cert = qd_projection(g, [], [{0: 1, far: Fraction(1, 10)}], Fraction(1, 20))
    assert cert.n == 5
    assert qd_projection(g, [], [{0: 1, far: Fraction(1, 100)}], Fraction(1, 20)).n == 1


def test_ideal_witness_examples():
    z = z_window(10)
    w = ideal_witness(z, z.points, [0, 2, 4, 6, 8], 1)
    f = w.f.diagonal()
    assert all(f[y] == 1 for y in (0, 2, 4, 6, 8))
    assert all(f[y] == Fraction(1, 2) for y in (1, 3, 5, 7))
    assert f[9] == 1  # the window end only sees one even neighbour
    A = [1, 5, 7]
    w0 = ideal_witness(z, A, A, 0)
    assert w0.f == SparseOperator.indicator(z, A)
    with pytest.raises(PreconditionError):
        ideal_witness(z, [0, 5], [0, 1, 2], 1)


def test_ideal_counts_bounded_by_class_count():
    t = tower_window(TowerSpec.constant(2), 4)
    w = ideal_witness(t, t.points, [0, 5, 10], 3)
    assert 1 <= min(w.counts.values()) and w.max_count <= len(w.partition)


UV = asdim_one_decomposition("z", 3, 40)
Z40 = z_window(40)


def _random_op(rng, space, nnz=30, prop=None):
    n = len(space)
    out = {}
    while len(out) < nnz:
        i, j = rng.randrange(n), rng.randrange(n)
        if prop is None or space.metric[i, j] <= prop:
            out[i, j] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    return SparseOperator(space, out)


@given(st.integers(0, 2**32 - 1))
def test_mv_split_contract(seed):
    a = _random_op(random.Random(seed), Z40)
    x1, x2 = mv_split(a, UV)
    assert x1 + x2 == a
    for p_norm in (norm1_exact, norm_inf_exact):
        assert max(p_norm(x1), p_norm(x2)) <= p_norm(a)


def test_mv_split_examples():
    one = SparseOperator.identity(Z40)
    x1, x2 = mv_split(one, UV)
    assert x1 == SparseOperator.indicator(Z40, UV.u)
    assert x2 == SparseOperator.indicator(Z40, UV.v)
    a = SparseOperator.unit(Z40, 0, 3)
    assert mv_split(a, UV) == (a, SparseOperator.zero(Z40))


def _nbhd_pairs(space, pieces, r):
    out = set()
    for p in pieces:
        N = space.neighborhood(p, r)
        out |= {(space.index(x), space.index(y)) for x in N for y in N}
    return out


U_PAIRS = _nbhd_pairs(Z40, UV.u_pieces, 3)
V_PAIRS = _nbhd_pairs(Z40, UV.v_pieces, 3)


def perturbation_pair(rng, scale):
    both = sorted(U_PAIRS & V_PAIRS)
    base = {k: Fraction(rng.randint(-5, 5)) for k in rng.sample(both, 12)}
    da = {k: scale * rng.randint(-3, 3) for k in rng.sample(sorted(U_PAIRS), 6)}
    db = {k: scale * rng.randint(-3, 3) for k in rng.sample(sorted(V_PAIRS), 6)}
    a = SparseOperator(Z40, base) + SparseOperator(Z40, da)
    b = SparseOperator(Z40, base) + SparseOperator(Z40, db)
    return a, b


@given(st.integers(0, 2**32 - 1))
def test_mv_glue_within_five_halves_eps(seed):
    rng = random.Random(seed)
    a, b = perturbation_pair(rng, Fraction(1, 10**4))
    eps = norm1_exact(a - b) + Fraction(1, 10**9)
    c = mv_glue(a, b, UV, 3)
    assert norm1_exact(a - c) < Fraction(5, 2) * eps
    assert norm1_exact(b - c) < Fraction(5, 2) * eps


def test_mv_glue_examples_and_support_check():
    a = SparseOperator.unit(Z40, 7, 8)  # inside both neighbourhood structures
    assert mv_glue(a, a, UV, 3) == a
    with pytest.raises(PreconditionError):
        mv_glue(SparseOperator.unit(Z40, 0, 20), a, UV, 3)


def test_block_decompose_examples():
    t = tower_window(TowerSpec.constant(2), 3)
    d = SparseOperator.diagonal_from(t, {g: g + 1 for g in t.points})
    dec = block_decompose(d, 0)
    assert dec.exact and len(dec.blocks) == 8
    e = SparseOperator.unit(t, 0, 7)
    assert block_decompose(e, 1).residue == e
    a = _random_op(random.Random(1), t, nnz=12, prop=1)
    dec = block_decompose(a, 1)
    assert dec.exact and dec.partition.sizes() == [2, 2, 2, 2]
    assert sum((b for b in dec.blocks), SparseOperator.zero(t)) == a


def test_cuntz_family_free_group():
    ball = free_group_ball(2, 5)
    fam = cuntz_build(ball, paradox_certificate(ball, 1, 1))
    rep = leavitt_verify(fam)
    assert rep.all_hold, rep.relations
    assert fam.T1 @ fam.S2 == SparseOperator.zero(ball)
    e, (w1, w2) = standard_form_witness(fam)
    assert e @ e == e
    assert w1.x @ w1.y == e


def test_noncancellation_examples():
    g = gap_union([3, 5], [10])
    rays = [list(g.blocks[0]), list(g.blocks[1])]
    nc = noncancellation_witness(g, 1, rays)
    assert nc.w @ nc.v == nc.p and nc.v @ nc.w == nc.q
    one = SparseOperator.identity(g)
    assert one - nc.p == SparseOperator.indicator(g, nc.last_points)
    assert one - nc.q == SparseOperator.indicator(g, nc.first_points)
    assert nc.p.trace() - nc.q.trace() == 0
    single = noncancellation_witness(z_window(3), 1, [[1]])
    assert single.p == single.q and single.v == single.w
    with pytest.raises(PreconditionError):
        check_ray_family(g, 1, [list(g.blocks[1]), list(g.blocks[0])])


def test_identity_failure_carries_name():
    exc = IdentityFailure("wv = p", "detail")
    assert exc.identity == "wv = p" and "detail" in str(exc)
