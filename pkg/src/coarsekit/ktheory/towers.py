"""Subgroup towers of countable locally finite groups.

A tower ``{e} = G_0 <= G_1 <= ...`` is recorded only through its index
increments ``r_n = k_{n+1} / k_n`` where ``k_n = |G_n|``.  Increments are
eventually periodic: a finite ``prefix`` followed by a ``cycle`` repeated
forever.  ``cycle == (1,)`` (or any all-ones cycle) encodes a finite group.

The concrete group realised by :func:`coarsekit.space.tower_window` is the
restricted direct sum of cyclic groups ``Z/r_0 + Z/r_1 + ...``, whose element
``g`` is stored as the integer with mixed-radix digits ``g_n in [0, r_n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from ..errors import ValidationError


@dataclass(frozen=True)
class TowerSpec:
    prefix: tuple = ()
    cycle: tuple = (1,)

    def __post_init__(self):
        prefix = tuple(int(r) for r in self.prefix)
        cycle = tuple(int(r) for r in self.cycle)
        if not cycle:
            raise ValidationError("tower cycle must be nonempty")
        if any(r < 1 for r in prefix + cycle):
            raise ValidationError("tower increments must be >= 1")
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)

    @classmethod
    def constant(cls, r):
        """Tower with ``k_n = r**n``."""
        return cls((), (r,))

    @classmethod
    def finite(cls, order):
        return cls((order,), (1,))

    @property
    def is_finite(self):
        return all(r == 1 for r in self.cycle)

    def increment(self, n):
        """``r_n``, the index of ``G_n`` in ``G_{n+1}``."""
        if n < 0:
            raise ValueError("level must be nonnegative")
        if n < len(self.prefix):
            return self.prefix[n]
        return self.cycle[(n - len(self.prefix)) % len(self.cycle)]

    def increments(self, count):
        return [self.increment(n) for n in range(count)]

    def order(self, n):
        """``k_n = |G_n|`` (``k_0 = 1``)."""
        return prod(self.increments(n))

    @property
    def stable_level(self):
        """First level from which ``k_n`` is constant, or None for infinite towers."""
        if not self.is_finite:
            return None
        return len(self.prefix)

    @property
    def group_order(self):
        """Order of the whole group, or None when it is infinite."""
        if not self.is_finite:
            return None
        return prod(self.prefix)

    def digits(self, g, level):
        """Mixed-radix digits of the element ``g`` of ``G_level``."""
        out = []
        for n in range(level):
            r = self.increment(n)
            g, d = divmod(g, r)
            out.append(d)
        if g:
            raise ValueError(f"element outside G_{level}")
        return out

    def to_json(self):
        return {"prefix": list(self.prefix), "cycle": list(self.cycle)}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise ValidationError("tower: expected an object with 'prefix' and 'cycle'")
        unknown = set(obj) - {"prefix", "cycle"}
        if unknown:
            raise ValidationError(f"tower: unknown field(s) {sorted(unknown)}")
        for key in ("prefix", "cycle"):
            value = obj.get(key, [] if key == "prefix" else [1])
            if not isinstance(value, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in value
            ):
                raise ValidationError(f"tower.{key}: expected a list of integers")
        return cls(tuple(obj.get("prefix", [])), tuple(obj.get("cycle", [1])))
