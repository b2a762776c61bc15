import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsekit.errors import IdentityFailure, PreconditionError, ValidationError
from coarsekit.ktheory import (OMEGA, K0Class, TowerSpec, alpha, block_sums, class_add,
                               class_equal, class_neg, class_positive, class_sub, coarse_class,
                               compare_towers, level_sums, order_unit, sn_divides, sn_equal,
                               stage_to_base, supernatural, truncated_limit_oracle)
from coarsekit.ktheory.idempotents import idempotent_class
from coarsekit.roe import SparseOperator
from coarsekit.space import tower_window

T2 = TowerSpec.constant(2)


def test_tower_orders():
    t = TowerSpec((3,), (2, 5))
    assert [t.order(n) for n in range(5)] == [1, 3, 6, 30, 60]
    assert TowerSpec.finite(6).group_order == 6 and TowerSpec.finite(6).stable_level == 1
    with pytest.raises(ValidationError):
        TowerSpec((), ())
    with pytest.raises(ValidationError):
        TowerSpec((0,), (2,))
    with pytest.raises(ValidationError):
        TowerSpec.from_json({"prefix": [1], "cycle": "2"})


def test_supernatural_examples():
    assert supernatural(T2).exponents == ((2, OMEGA),)
    assert supernatural(TowerSpec((6,), (1,))).exponents == ((2, 1), (3, 1))
    assert supernatural(TowerSpec((), (2, 3))).exponents == ((2, OMEGA), (3, OMEGA))
    s = supernatural(TowerSpec((4,), (3,)))
    assert sn_divides(2, 2, s) and not sn_divides(2, 3, s) and sn_divides(3, 10**6, s)


towers = st.builds(lambda p, c: TowerSpec(tuple(p), tuple(c)),
                   st.lists(st.integers(1, 12), max_size=3),
                   st.lists(st.integers(1, 6), min_size=1, max_size=3))


@given(towers, st.integers(0, 5), st.integers(0, 3))
def test_supernatural_ignores_inserted_ones(t, pos, extra):
    pre = list(t.prefix)
    pos = min(pos, len(pre))
    padded = TowerSpec(tuple(pre[:pos] + [1] * extra + pre[pos:]), t.cycle + (1,) * extra)
    assert sn_equal(supernatural(t), supernatural(padded))


@given(towers, towers, towers)
def test_sn_equal_is_an_equivalence(a, b, c):
    sa, sb, sc = map(supernatural, (a, b, c))
    assert sn_equal(sa, sa)
    assert sn_equal(sa, sb) == sn_equal(sb, sa)
    if sn_equal(sa, sb) and sn_equal(sb, sc):
        assert sn_equal(sa, sc)


@given(towers, towers)
def test_compare_is_symmetric(a, b):
    assert compare_towers(a, b) == compare_towers(b, a)


def test_coarse_class_examples():
    assert str(coarse_class(TowerSpec.finite(4))) == "Finite(4)"
    assert str(coarse_class(T2)) == "Infinite"
    assert str(coarse_class(TowerSpec((), (1,)))) == "Finite(1)"


def test_compare_examples():
    assert all(compare_towers(T2, TowerSpec.constant(4)).values())
    r = compare_towers(T2, TowerSpec((), (2, 3)))
    assert r == {"bijectively_coarsely_equivalent": False, "coarsely_equivalent": True,
                 "ordered_K0_unit_iso": False, "K0_iso": True}
    assert not any(compare_towers(TowerSpec.finite(4), T2).values())
    assert all(compare_towers(TowerSpec.finite(4), TowerSpec((2, 2), (1,))).values())
    r = compare_towers(TowerSpec.finite(4), TowerSpec.finite(6))
    assert r["coarsely_equivalent"] and not r["ordered_K0_unit_iso"]


def test_alpha_examples():
    assert alpha(T2, 0, K0Class.constant(1)) == K0Class.constant(2)
    assert alpha(T2, 0, K0Class((), (1, -1))).period == (0,)
    out = alpha(T2, 0, K0Class((1,), (1, -1)))
    assert out.head(4) == [2, 0, 0, 0]
    assert alpha(T2, 0, [1, 2, 3, 4]) == [3, 7]


classes = st.builds(lambda p, q: K0Class(tuple(p), tuple(q)),
                    st.lists(st.integers(-4, 4), max_size=6),
                    st.lists(st.integers(-4, 4), min_size=1, max_size=4))


def _brute_blocks(x, length, count):
    return [sum(x[i] for i in range(j * length, (j + 1) * length)) for j in range(count)]


@given(classes, st.integers(1, 7))
def test_block_sums_match_brute_force(x, L):
    y = block_sums(x, L)
    assert y.head(20) == _brute_blocks(x, L, 20)


@given(classes, towers, st.integers(0, 3))
def test_alpha_functoriality(x, t, n):
    two = alpha(t, n + 1, alpha(t, n, x))
    combined = block_sums(x, t.increment(n) * t.increment(n + 1))
    assert two.head(15) == combined.head(15)


def test_class_arithmetic():
    x = K0Class((3,), (1, 2))
    assert class_add(x, class_neg(x)).head(10) == [0] * 10
    assert class_add(order_unit(), order_unit()) == K0Class.constant(2)
    assert len(class_add(K0Class((), (1, 2)), K0Class((), (1, 2, 3))).period) == 6


def test_class_equal_examples():
    assert class_equal(K0Class((), (1, -1)), K0Class(), T2).to_json() == {
        "result": "yes", "level": 1, "reason": "all block sums vanish at level 1"}
    assert class_equal(K0Class.constant(1), K0Class(), T2).result == "no"
    v = class_equal(K0Class((1,), (1, -1)), K0Class(), T2)
    assert v.result == "no" and "c = 2" in v.reason


def test_class_positive_examples():
    assert class_positive(K0Class((), (1, -1)), T2).level == 1
    assert class_positive(K0Class.constant(-1), T2).result == "no"
    assert class_positive(K0Class((), (-1, 2)), T2).level == 1
    assert class_positive(order_unit(), T2).level == 0


def test_non_aligned_period_is_undetermined():
    v = class_equal(K0Class((), (1, -1, 0)), K0Class(), T2, level_budget=6)
    assert v.result == "undetermined" and v.level == 6
    with pytest.raises(ValueError):
        class_equal(K0Class(), K0Class(), T2, level_budget=0)


def test_finite_towers_decide_at_stable_level():
    t = TowerSpec.finite(4)
    assert class_equal(K0Class.finite([1, -1, 0, 0, 2, -2]), K0Class(), t).result == "yes"
    assert class_equal(K0Class.constant(1), K0Class(), t).result == "no"
    assert class_positive(K0Class((), (-1, 1, 1, 1)), t).level == 1
    assert class_positive(K0Class((), (-3, 1, 1, 0)), t).result == "no"


def _verify_verdict(x, t, v, nonneg):
    ok = (lambda s: all(c >= 0 for c in s)) if nonneg else (lambda s: not any(s))
    horizon = len(x.preperiod) + 4 * len(x.period) * 8

    def holds(n):
        k = t.order(n)
        return ok(_brute_blocks(x, k, max(4, horizon // k + 2)))

    if v.result == "yes":
        assert holds(v.level)
        assert all(not holds(n) for n in range(v.level))
    elif v.result == "no":
        assert all(not holds(n) for n in range(6))


@given(classes, st.sampled_from([T2, TowerSpec.constant(3), TowerSpec((), (2, 3)),
                                 TowerSpec((3,), (2,)), TowerSpec.finite(6)]))
def test_verdicts_agree_with_direct_block_sums(x, t):
    _verify_verdict(class_sub(x, K0Class()), t, class_equal(x, K0Class(), t, 8), False)
    _verify_verdict(x, t, class_positive(x, t, 8), True)


@given(classes, towers)
def test_class_equal_reflexive_and_additive(x, t):
    assert class_equal(x, x, t).to_json()["level"] == 0
    y = K0Class((1, 0, -2), (0,))
    assert class_equal(x, y, t, 6) == class_equal(class_sub(x, y), K0Class(), t, 6)


@given(st.lists(st.integers(-3, 3), max_size=8), st.lists(st.integers(-3, 3), max_size=8))
def test_positive_cone_closed_under_addition(a, b):
    x, y = K0Class.finite(a), K0Class.finite(b)
    if class_positive(x, T2).yes and class_positive(y, T2).yes:
        assert class_positive(class_add(x, y), T2).yes


def _has_nonnegative_representative(x, levels, bound):
    """Search h in H^(n), n <= levels, supported in the window, with x + h >= 0."""
    width = len(x)
    for n in range(levels + 1):
        k = 2 ** n
        if width % k:
            continue
        # H^(n) restricted to the window: vectors whose k-blocks sum to zero
        blocks = []
        for j in range(width // k):
            opts = [h for h in itertools.product(range(-bound, bound + 1), repeat=k)
                    if sum(h) == 0]
            blocks.append(opts)
        for j in range(width // k):
            seg = x[j * k:(j + 1) * k]
            if not any(all(a + b >= 0 for a, b in zip(seg, h)) for h in blocks[j]):
                break
        else:
            return True
    return False


@pytest.mark.parametrize("seed", range(40))
def test_positivity_criterion_matches_nonnegative_representatives(seed):
    rng = random.Random(seed)
    x = [rng.randint(-2, 2) for _ in range(4)]
    brute = _has_nonnegative_representative(x, 2, 4)
    assert class_positive(K0Class.finite(x), T2).yes == brute


def test_oracle_shape_and_examples():
    orc = truncated_limit_oracle(T2, 3, 2)
    assert orc.dims == [16, 8, 4, 2]
    assert [m.shape for m in orc.maps] == [(8, 16), (4, 8), (2, 4)]
    assert orc.zero_stage([1, -1]) == 1
    assert class_equal(K0Class.finite([1, -1]), K0Class(), T2).level == 1
    unit = [1] * 16
    assert orc.zero_stage(unit) is None and orc.positive_stage(unit) == 0
    assert class_positive(K0Class.constant(1), T2).level == 0


@pytest.mark.parametrize("cycle", [(2,), (3,), (2, 3), (4,)])
def test_oracle_agreement_sample(cycle):
    t = TowerSpec((), cycle)
    N = 3 if max(cycle) < 4 else 2
    orc = truncated_limit_oracle(t, N, 2)
    rng = random.Random(hash(cycle) & 0xFFFF)
    kN = t.order(N)
    for _ in range(40):
        length = rng.randint(1, kN)
        x = [rng.randint(-2, 2) for _ in range(length)]
        ve = class_equal(K0Class.finite(x), K0Class(), t, N)
        vp = class_positive(K0Class.finite(x), t, N)
        assert ve.result != "undetermined" and vp.result != "undetermined"
        assert ve.level == orc.zero_stage(x)
        assert vp.level == orc.positive_stage(x)


def test_stage_to_base_round_trip():
    x = stage_to_base([3, -1, 2], T2, 2)
    assert level_sums(x, T2, 2).head(3) == [3, -1, 2]


def test_idempotent_class_examples():
    s = tower_window(T2, 3)
    assert idempotent_class(s, SparseOperator.identity(s), 1) == [2, 2, 2, 2]
    assert idempotent_class(s, SparseOperator.unit(s, 5, 5), 1) == [0, 0, 1, 0]
    half = Fraction(1, 2)
    e = SparseOperator(s, {(i, j): half for b in range(4) for i in (2 * b, 2 * b + 1)
                           for j in (2 * b, 2 * b + 1)})
    ranks = idempotent_class(s, e, 1)
    assert ranks == [1, 1, 1, 1]
    # [e] + [e] = [1] once both are read as level-1 vectors
    ce = stage_to_base(ranks, T2, 1)
    one = stage_to_base(idempotent_class(s, SparseOperator.identity(s), 1), T2, 1)
    assert class_equal(class_add(ce, ce), one, T2).yes
    assert class_equal(ce, one, T2).result == "no"
    with pytest.raises(IdentityFailure):
        idempotent_class(s, 2 * SparseOperator.identity(s), 1)
    with pytest.raises(PreconditionError):
        idempotent_class(s, SparseOperator.unit(s, 0, 0) + SparseOperator.unit(s, 0, 3), 1)
