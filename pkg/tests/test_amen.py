from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsekit.amen import (EmptyInterior, FolnerExhaustion, FolnerWitness, HallViolation,
                            ParadoxCertificate, approx_trace, boundary, folner_ratio,
                            folner_search, normalized_trace, paradox_certificate, trace_defect,
                            trace_defect_bound, verify_certificate, verify_hall_violation)
from coarsekit.errors import PreconditionError, ValidationError
from coarsekit.roe import SparseOperator, shift_from_ray
from coarsekit.space import explicit_space, free_group_ball, z_window, zd_window

from oracles import boundary_brute

Z100 = z_window(100)


def test_boundary_examples():
    assert boundary(Z100, range(10, 20), 1) == [9, 10, 19, 20]
    assert boundary(Z100, Z100.points, 3) == []
    assert boundary(Z100, range(10, 20), 0) == []


def test_folner_ratio_examples():
    assert folner_ratio(Z100, range(10, 20), 1) == Fraction(4, 10)
    assert folner_ratio(Z100, Z100.points, 1) == 0
    ball = free_group_ball(2, 5)
    A = [w for w in ball.points if len(w) <= 3]
    expect = boundary_brute(ball.points, ball.d, A, 1)
    assert folner_ratio(ball, A, 1) == Fraction(len(expect), 53)
    with pytest.raises(ValueError):
        folner_ratio(Z100, [], 1)


@given(st.sets(st.integers(0, 39), min_size=1), st.integers(0, 4))
def test_boundary_agrees_with_brute_force_on_z(A, R):
    z = z_window(40)
    assert set(boundary(z, A, R)) == boundary_brute(z.points, z.d, A, R)


@given(st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1), st.integers(0, 3))
def test_boundary_agrees_with_brute_force_on_z2(A, R):
    z = zd_window(2, 6)
    assert set(boundary(z, A, R)) == boundary_brute(z.points, z.d, A, R)


@given(st.sets(st.sampled_from(free_group_ball(2, 3).points), min_size=1), st.integers(0, 2))
def test_boundary_agrees_with_brute_force_on_free(A, R):
    b = free_group_ball(2, 3)
    assert set(boundary(b, A, R)) == boundary_brute(b.points, b.d, A, R)


def test_folner_search_z_finds_interval():
    res = folner_search("z", 1, Fraction(1, 2))
    assert isinstance(res, FolnerWitness)
    assert res.ratio <= Fraction(1, 2)
    # the witness is an interval, and intervals of length 10 qualify as well
    assert list(res.set) == list(range(res.set[0], res.set[-1] + 1))
    assert folner_ratio(z_window(30, start=-10), range(10), 1) == Fraction(4, 10)


def test_folner_search_free_group_exhausts():
    res = folner_search("f2", 1, Fraction(1, 10), max_radius=6)
    assert isinstance(res, FolnerExhaustion)
    assert res.min_ratio >= Fraction(1, 2)
    assert "window-scale" in res.note


def test_folner_search_exhaustive_z2():
    res = folner_search("z2", 1, Fraction(3), strategy="exhaustive", max_size=4)
    assert isinstance(res, FolnerWitness)
    assert res.ratio <= 3
    hopeless = folner_search("z2", 1, Fraction(1, 100), strategy="exhaustive", max_size=4)
    assert isinstance(hopeless, FolnerExhaustion)
    # sets containing the origin, 4-connected, sizes 1..4 in Z^2: 1 + 4 + 18 + 76 = 99
    assert hopeless.scanned == 99


def test_folner_search_large_eps_takes_singleton():
    res = folner_search("f2", 1, Fraction(5))
    assert isinstance(res, FolnerWitness) and len(res.set) == 1 and res.ratio == 5


def test_paradox_free_group_certificate():
    ball = free_group_ball(2, 5)
    cert = paradox_certificate(ball, 1, 1)
    assert isinstance(cert, ParadoxCertificate)
    assert len(cert.interior) == 161
    assert len(set(cert.X_plus) | set(cert.X_minus)) == 322
    assert verify_certificate(ball, cert)


def test_paradox_z_hall_violation():
    z = z_window(20)
    v = paradox_certificate(z, 1, 1)
    assert isinstance(v, HallViolation)
    assert verify_hall_violation(z, v)
    assert len(v.left) > len(v.neighbors)


def test_paradox_degenerate_and_preconditions():
    single = explicit_space(["p"], [[0]])
    res = paradox_certificate(single, 1, 1)
    assert isinstance(res, (HallViolation, EmptyInterior))
    assert isinstance(paradox_certificate(z_window(2), 1, 1), EmptyInterior)
    with pytest.raises(PreconditionError):
        paradox_certificate(z_window(5), 2, 1)


def test_tampered_certificate_is_rejected():
    ball = free_group_ball(2, 4)
    cert = paradox_certificate(ball, 1, 1)
    plus = list(cert.plus_pairs)
    plus[0] = (plus[0][0], cert.minus_pairs[0][1])
    bad = ParadoxCertificate(cert.R, cert.collar, cert.interior, tuple(plus), cert.minus_pairs)
    with pytest.raises(ValidationError, match="injective|more than R"):
        verify_certificate(ball, bad)


@pytest.mark.parametrize("radius,R", [(3, 1), (4, 1), (4, 2), (5, 2)])
def test_free_certificates_verify(radius, R):
    ball = free_group_ball(2, radius)
    res = paradox_certificate(ball, R, R)
    assert isinstance(res, ParadoxCertificate)
    verify_certificate(ball, res)


@pytest.mark.parametrize("n,R", [(20, 1), (30, 2), (8, 1)])
def test_z_violations_verify(n, R):
    z = z_window(n)
    res = paradox_certificate(z, R, R)
    assert isinstance(res, HallViolation)
    verify_hall_violation(z, res)


def test_traces():
    z = z_window(10)
    one = SparseOperator.identity(z)
    assert approx_trace(one, [1, 5, 7]) == 1
    d1 = SparseOperator.diagonal_from(z, {x: x for x in z.points})
    d2 = SparseOperator.diagonal_from(z, {x: 1 - x for x in z.points})
    assert trace_defect(d1, d2, z.points) == 0
    assert normalized_trace(z, one) == 1
    assert normalized_trace(z, SparseOperator.unit(z, 1, 2)) == 0
    assert normalized_trace(z, SparseOperator.unit(z, 3, 3)) == Fraction(1, 10)


def test_trace_defect_of_truncated_shifts():
    S, T = shift_from_ray(Z100, list(range(100)), 1)
    F = range(10, 90)
    assert trace_defect(S, T, F) <= Fraction(2, 80)
    assert trace_defect(S, T, F) <= trace_defect_bound(S, T, F).value


@given(st.integers(0, 2**32 - 1))
def test_normalized_trace_is_tracial(seed):
    import random
    rng = random.Random(seed)
    z = z_window(6)
    a = SparseOperator(z, {(rng.randrange(6), rng.randrange(6)): rng.randint(-3, 3)
                           for _ in range(8)})
    b = SparseOperator(z, {(rng.randrange(6), rng.randrange(6)): rng.randint(-3, 3)
                           for _ in range(8)})
    assert normalized_trace(z, a @ b) == normalized_trace(z, b @ a)
    assert normalized_trace(z, SparseOperator.identity(z)) == 1


def test_trace_defect_shrinks_along_folner_intervals():
    z = z_window(220)
    a = SparseOperator(z, {(i + 1, i): i % 4 + 1 for i in range(219)})
    b = SparseOperator(z, {(i, i + 1): Fraction(1, 3) for i in range(219)})
    defects = []
    for n in (21, 51, 101, 201):
        F = range(10, 10 + n)
        d = trace_defect(a, b, F)
        assert d <= trace_defect_bound(a, b, F).value
        defects.append(d)
    assert defects == sorted(defects, reverse=True) and defects[0] > 0
