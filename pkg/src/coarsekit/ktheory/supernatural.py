"""Supernatural numbers of towers and the coarse classification they drive."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .towers import TowerSpec

OMEGA = math.inf


def factorize(n: int) -> dict:
    """Prime factorisation by trial division (increments are small)."""
    if n < 1:
        raise ValueError("n must be positive")
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class SupernaturalNumber:
    """``prod p^e`` with ``e`` a nonnegative integer or ``OMEGA``; zero exponents are dropped."""

    exponents: tuple  # sorted ((prime, exponent), ...)

    @classmethod
    def from_dict(cls, exps: dict):
        return cls(tuple(sorted((p, e) for p, e in exps.items() if e)))

    def exponent(self, prime):
        return dict(self.exponents).get(prime, 0)

    @property
    def is_finite(self):
        return all(e != OMEGA for _, e in self.exponents)

    def value(self):
        """The ordinary integer when every exponent is finite."""
        if not self.is_finite:
            raise ValueError("infinite supernatural number")
        return math.prod(p**e for p, e in self.exponents)

    def __str__(self):
        if not self.exponents:
            return "1"
        return "*".join(f"{p}^{'w' if e == OMEGA else e}" for p, e in self.exponents)

    def to_json(self):
        return {str(p): ("omega" if e == OMEGA else e) for p, e in self.exponents}


def supernatural(tower: TowerSpec) -> SupernaturalNumber:
    exps: dict = {}
    for r in tower.prefix:
        for p, e in factorize(r).items():
            exps[p] = exps.get(p, 0) + e
    for p in factorize(math.prod(tower.cycle)):
        exps[p] = OMEGA
    return SupernaturalNumber.from_dict(exps)


def sn_equal(s: SupernaturalNumber, t: SupernaturalNumber) -> bool:
    return s.exponents == t.exponents


def sn_divides(prime: int, power: int, s: SupernaturalNumber) -> bool:
    """Whether ``prime**power`` divides ``s``."""
    return power <= s.exponent(prime)


def divides_tower(q: int, tower: TowerSpec) -> bool:
    """Whether the integer ``q`` divides some ``k_n``."""
    s = supernatural(tower)
    return all(sn_divides(p, e, s) for p, e in factorize(q).items())


@dataclass(frozen=True)
class CoarseClass:
    finite: bool
    order: int | None = None

    def __str__(self):
        return f"Finite({self.order})" if self.finite else "Infinite"


def coarse_class(tower: TowerSpec) -> CoarseClass:
    if tower.is_finite:
        return CoarseClass(True, tower.group_order)
    return CoarseClass(False)


def compare_towers(t1: TowerSpec, t2: TowerSpec) -> dict:
    """Four equivalence flags for the groups carried by two towers.

    Bijective coarse equivalence and unit-preserving ordered isomorphism of
    K_0 both reduce to equality of supernatural numbers.  Plain coarse
    equivalence and abstract K_0 isomorphism only see finite versus infinite:
    K_0 is ``Z`` for a finite group and not singly generated otherwise.
    """
    same_sn = sn_equal(supernatural(t1), supernatural(t2))
    same_kind = t1.is_finite == t2.is_finite
    return {
        "bijectively_coarsely_equivalent": same_sn,
        "coarsely_equivalent": same_kind,
        "ordered_K0_unit_iso": same_sn,
        "K0_iso": same_kind,
    }
