"""Rank vectors of idempotents on tower windows."""

from __future__ import annotations

from fractions import Fraction

from ..errors import IdentityFailure, PreconditionError, ValidationError
from ..roe.constructions import block_decompose
from ..roe.operator import SparseOperator, exact_rank


def idempotent_class(space, e: SparseOperator, r: int) -> list:
    """Per-block rank of ``e`` along the ``r``-components of a tower window.

    The ``r``-components of ``G_level`` are the cosets of ``G_r``, i.e.
    consecutive runs of ``k_r`` elements, so the output is the truncated
    integer sequence representing ``[e]``.  Each block's trace must be an
    integer equal to its rank.
    """
    if space.kind != "TowerGroupWindow":
        raise ValidationError("idempotent_class needs a tower window")
    if r < 0:
        raise ValueError("r must be nonnegative")
    if e @ e != e:
        raise IdentityFailure("e^2 = e")
    if e.propagation > r:
        raise PreconditionError(f"propagation {e.propagation} exceeds r = {r}")
    dec = block_decompose(e, r)
    if not dec.exact:
        raise PreconditionError("e does not respect the r-components")
    ranks = []
    for block in dec.blocks:
        tr = block.trace()
        if tr.denominator != 1:
            raise IdentityFailure("integer trace", f"block trace {tr} is not an integer")
        rk = exact_rank(block)
        if Fraction(rk) != tr:
            raise IdentityFailure("rank = trace", f"rank {rk} != trace {tr}")
        ranks.append(rk)
    return ranks
