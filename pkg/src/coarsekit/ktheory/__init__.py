"""K-theory of uniform Roe algebras of locally finite groups, via towers."""

from .classes import (K0Class, Verdict, aligned_level, alpha, block_sums, class_add,
                      class_equal, class_neg, class_positive, class_sub, level_sums,
                      order_unit, stage_to_base)
from .oracle import TruncatedLimit, truncated_limit_oracle
from .supernatural import (OMEGA, CoarseClass, SupernaturalNumber, coarse_class,
                           compare_towers, divides_tower, factorize, sn_divides, sn_equal,
                           supernatural)
from .towers import TowerSpec

__all__ = [
    "K0Class", "Verdict", "aligned_level", "alpha", "block_sums", "class_add", "class_equal",
    "class_neg", "class_positive", "class_sub", "level_sums", "order_unit", "stage_to_base",
    "TruncatedLimit", "truncated_limit_oracle", "OMEGA", "CoarseClass", "SupernaturalNumber",
    "coarse_class", "compare_towers", "divides_tower", "factorize", "sn_divides", "sn_equal",
    "supernatural", "TowerSpec",
]
