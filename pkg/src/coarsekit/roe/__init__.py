"""Exact finite-propagation operators, norm bounds and Roe-algebra constructions."""

from .operator import (EquivWitness, SparseOperator, alg_equiv_check, commutator,
                       cond_expectation, exact_rank)
from .norms import NormEstimate, boyd_lower, norm1_exact, norm_bounds, norm_inf_exact
from .constructions import (BlockDecomposition, CuntzFamily, IdealWitness, LeavittReport,
                            NonCancellation, QDCertificate, block_decompose, check_ray_family,
                            cuntz_build, ideal_witness, leavitt_verify, mv_glue, mv_split,
                            noncancellation_witness, qd_projection, shift_from_ray,
                            standard_form_witness, truncated_shift_report)

__all__ = [
    "EquivWitness", "SparseOperator", "alg_equiv_check", "commutator", "cond_expectation",
    "exact_rank", "NormEstimate", "boyd_lower", "norm1_exact", "norm_bounds", "norm_inf_exact",
    "BlockDecomposition", "CuntzFamily", "IdealWitness", "LeavittReport", "NonCancellation",
    "QDCertificate", "block_decompose", "check_ray_family", "cuntz_build", "ideal_witness",
    "leavitt_verify", "mv_glue", "mv_split", "noncancellation_witness", "qd_projection",
    "shift_from_ray", "standard_form_witness", "truncated_shift_report",
]
