"""Exact finite-propagation operators on small windows.

Norm intervals, a quasidiagonalising projection on a sparse union of blocks,
and the ray construction where an idempotent is equivalent to a proper
sub-idempotent of itself.
"""

import numpy as np

from coarsekit.roe import (SparseOperator, noncancellation_witness, norm_bounds, qd_projection,
                           shift_from_ray, truncated_shift_report)
from coarsekit.space import gap_union, r_components, z_window

z = z_window(8)

# %% norms
# Everything is rational; floats only show up inside the p-norm estimates.
jordan = SparseOperator(z, {(i, i): 1 for i in range(8)} | {(i, i + 1): 1 for i in range(7)})
for p in (1, 1.5, 2, 3, float("inf")):
    est = norm_bounds(jordan, p)
    print(f"p={p:<4} [{est.lower:.6f}, {est.upper:.6f}]  {', '.join(est.methods)}")
print("largest singular value", np.linalg.svd(jordan.to_dense().astype(float))[1][0])

# %% a shift that cannot be inverted inside the window
S, T = shift_from_ray(z, list(range(8)), 1)
print(truncated_shift_report(S, T, list(range(8))))

# %% blocks drifting apart
# Gaps grow, so every R sees components of bounded size and any operator of
# propagation R commutes with the projection onto the first few blocks.
g = gap_union([2] * 8, [1, 2, 3, 4, 5, 6, 7])
for R in (1, 2, 3):
    print(f"R={R}: largest component {max(r_components(g, R).sizes())}")
band = SparseOperator(g, {(i, j): 1 for i in range(len(g)) for j in range(len(g))
                          if g.metric[i, j] <= 3})
cert = qd_projection(g, [band], [], eps=0.5)
print(f"P_{cert.n} commutes with the band: {cert.commutators_zero}, "
      f"norms {cert.norm_1}, {cert.norm_inf}")

# %% rays and non-cancellation
g = gap_union([3, 5], [10])
nc = noncancellation_witness(g, 1, [list(b) for b in g.blocks])
print("wv = p:", nc.w @ nc.v == nc.p, "  vw = q:", nc.v @ nc.w == nc.q)
print("1 - p lives on", nc.last_points, " 1 - q lives on", nc.first_points)
