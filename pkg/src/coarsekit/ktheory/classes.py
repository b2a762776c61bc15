"""The ordered group ``l^inf(N, Z) / H`` on eventually periodic sequences.

A sequence ``m_1, m_2, ...`` lies in ``H^(n)`` when every block of ``k_n``
consecutive entries sums to zero; ``H`` is the increasing union.  Two classes
are equal when their difference lies in some ``H^(n)``, and a class is
positive when some level has all block sums ``>= 0`` (inside a block any
integer vector with a given sum is reachable by adding an ``H^(n)`` element,
so this is the same as having a nonnegative representative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import accumulate

from ..errors import ValidationError
from .supernatural import divides_tower
from .towers import TowerSpec

# hard stop for scans that are guaranteed to terminate
_MAX_LEVELS = 10_000


@dataclass(frozen=True)
class K0Class:
    preperiod: tuple = ()
    period: tuple = (0,)

    def __post_init__(self):
        pre = tuple(int(v) for v in self.preperiod)
        per = tuple(int(v) for v in self.period)
        if not per:
            raise ValidationError("K0Class.period must be nonempty")
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)
        object.__setattr__(self, "_cum", (0,) + tuple(accumulate(per)))

    @classmethod
    def finite(cls, values):
        """Finitely supported sequence."""
        return cls(tuple(values), (0,))

    @classmethod
    def constant(cls, c):
        return cls((), (c,))

    def __getitem__(self, i):
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def head(self, count):
        return [self[i] for i in range(count)]

    @property
    def sigma(self):
        """Sum over one period."""
        return self._cum[-1]

    def range_sum(self, start, length):
        """``m_start + ... + m_(start+length-1)`` (0-based) in O(|preperiod| + |period|)."""
        total = 0
        end = start + length
        p = len(self.preperiod)
        if start < p:
            total += sum(self.preperiod[start:min(end, p)])
            start = min(end, p)
        if start >= end:
            return total
        a, b = start - p, end - p
        return total + self._prefix(b) - self._prefix(a)

    def _prefix(self, t):
        # sum of the first t periodic entries
        q = len(self.period)
        full, rest = divmod(t, q)
        return full * self.sigma + self._cum[rest]

    def is_zero(self):
        return not any(self.preperiod) and not any(self.period)

    def is_nonnegative(self):
        return all(v >= 0 for v in self.preperiod + self.period)

    def to_json(self):
        return {"preperiod": list(self.preperiod), "period": list(self.period)}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise ValidationError("K0Class: expected an object with 'preperiod' and 'period'")
        unknown = set(obj) - {"preperiod", "period"}
        if unknown:
            raise ValidationError(f"K0Class: unknown field(s) {sorted(unknown)}")
        for key in ("preperiod", "period"):
            value = obj.get(key, [] if key == "preperiod" else [0])
            if not isinstance(value, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in value
            ):
                raise ValidationError(f"K0Class.{key}: expected a list of integers")
        return cls(tuple(obj.get("preperiod", [])), tuple(obj.get("period", [0])))


def block_sums(x: K0Class, length: int) -> K0Class:
    """Sums of consecutive blocks of ``length`` entries, again eventually periodic."""
    if length < 1:
        raise ValueError("block length must be >= 1")
    p, q = len(x.preperiod), len(x.period)
    head = -(-p // length)  # blocks touching the preperiod
    cycle = q // math.gcd(length, q)
    pre = tuple(x.range_sum(j * length, length) for j in range(head))
    per = tuple(x.range_sum(j * length, length) for j in range(head, head + cycle))
    return K0Class(pre, per)


def level_sums(x: K0Class, tower: TowerSpec, n: int) -> K0Class:
    """Block sums at level ``n`` (block length ``k_n``)."""
    return block_sums(x, tower.order(n))


def alpha(tower: TowerSpec, n: int, x) -> K0Class | list:
    """Connecting map at level ``n``: sum ``r_n`` consecutive entries.

    Accepts a :class:`K0Class` or a finite list (whose length must be a
    multiple of ``r_n``).
    """
    r = tower.increment(n)
    if isinstance(x, K0Class):
        return block_sums(x, r)
    x = list(x)
    if len(x) % r:
        raise ValueError(f"length {len(x)} is not a multiple of r_{n} = {r}")
    return [sum(x[i:i + r]) for i in range(0, len(x), r)]


def _aligned_repr(x: K0Class, y: K0Class):
    p = max(len(x.preperiod), len(y.preperiod))
    q = math.lcm(len(x.period), len(y.period))
    return p, q


def class_add(x: K0Class, y: K0Class) -> K0Class:
    p, q = _aligned_repr(x, y)
    return K0Class(tuple(x[i] + y[i] for i in range(p)),
                   tuple(x[i] + y[i] for i in range(p, p + q)))


def class_neg(x: K0Class) -> K0Class:
    return K0Class(tuple(-v for v in x.preperiod), tuple(-v for v in x.period))


def class_sub(x: K0Class, y: K0Class) -> K0Class:
    return class_add(x, class_neg(y))


def order_unit(tower: TowerSpec | None = None) -> K0Class:
    return K0Class.constant(1)


# --------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Verdict:
    result: str  # "yes" | "no" | "undetermined"
    level: int | None = None
    reason: str = ""

    def __bool__(self):
        raise TypeError("use .result; a verdict may be undetermined")

    @property
    def yes(self):
        return self.result == "yes"

    def to_json(self):
        return {"result": self.result, "level": self.level, "reason": self.reason}


def aligned_level(x: K0Class, tower: TowerSpec):
    """First level ``n`` with ``k_n >= |preperiod|`` and ``|period|`` dividing ``k_n``, or None."""
    q, p = len(x.period), len(x.preperiod)
    if not divides_tower(q, tower):
        return None
    for n in range(_MAX_LEVELS):
        k = tower.order(n)
        if k % q == 0 and k >= p:
            return n
        if tower.is_finite and n >= tower.stable_level:
            return None
    raise RuntimeError("aligned level search did not terminate")


def _first_level(x, tower, ok, upto):
    for n in range(upto + 1):
        if ok(level_sums(x, tower, n)):
            return n
    return None


def _decide(x: K0Class, tower: TowerSpec, ok, test_c, budget: int, what: str) -> Verdict:
    """Shared aligned-level / budget logic once the period sum is known to be zero."""
    if tower.is_finite:
        n = tower.stable_level
        hit = _first_level(x, tower, ok, n)
        if hit is None:
            return Verdict("no", None, f"{what} fails at the stable level {n}")
        return Verdict("yes", hit, f"{what} at level {hit}")
    n = aligned_level(x, tower)
    if n is not None:
        c = x.range_sum(0, tower.order(n))
        if not test_c(c):
            return Verdict("no", None, f"aligned level {n}: initial block sum c = {c}")
        hit = _first_level(x, tower, ok, n)
        return Verdict("yes", hit, f"{what} at level {hit}")
    hit = _first_level(x, tower, ok, budget)
    if hit is not None:
        return Verdict("yes", hit, f"{what} at level {hit}")
    return Verdict("undetermined", budget,
                   f"no aligned level exists and levels 0..{budget} were inconclusive")


def class_equal(x: K0Class, y: K0Class, tower: TowerSpec, level_budget: int = 32) -> Verdict:
    if level_budget < 1:
        raise ValueError("level_budget must be >= 1")
    d = class_sub(x, y)
    if d.sigma != 0 and not tower.is_finite:
        return Verdict("no", None, f"period sum {d.sigma} != 0")
    return _decide(d, tower, K0Class.is_zero, lambda c: c == 0, level_budget,
                   "all block sums vanish")


def class_positive(x: K0Class, tower: TowerSpec, level_budget: int = 32) -> Verdict:
    if level_budget < 1:
        raise ValueError("level_budget must be >= 1")
    if x.sigma < 0 and not tower.is_finite:
        return Verdict("no", None, f"period sum {x.sigma} < 0")
    if x.sigma > 0 and not tower.is_finite:
        # block sums grow like k_n * sigma / |period|, so some level is all >= 0
        hit = _first_level(x, tower, K0Class.is_nonnegative, _MAX_LEVELS)
        if hit is None:
            raise RuntimeError("positive period sum but no nonnegative level found")
        return Verdict("yes", hit, f"all block sums >= 0 at level {hit}")
    return _decide(x, tower, K0Class.is_nonnegative, lambda c: c >= 0, level_budget,
                   "all block sums >= 0")


def stage_to_base(values, tower: TowerSpec, n: int) -> K0Class:
    """A finitely supported level-``n`` vector lifted to level 0.

    Each entry is placed on the first coordinate of its ``k_n``-block; the
    level-``n`` block sums of the result are ``values`` again.
    """
    k = tower.order(n)
    out = [0] * (k * len(values))
    for j, v in enumerate(values):
        out[j * k] = int(v)
    return K0Class.finite(out)
