"""Amenable or paradoxical: Z against the free group on two letters.

Run with ``python walkthroughs/01_amenable_or_paradoxical.py``.
"""

from fractions import Fraction

from coarsekit.amen import (HallViolation, folner_ratio, folner_search, paradox_certificate,
                            verify_certificate)
from coarsekit.roe import cuntz_build, leavitt_verify, standard_form_witness
from coarsekit.space import free_group_ball, z_window

# %% Følner sets in Z
# An interval barely notices its 1-boundary once it is long.
for n in (10, 100, 1000):
    z = z_window(n + 20, start=-10)
    print(f"[0, {n - 1}]  boundary ratio {folner_ratio(z, range(n), 1)}")

found = folner_search("z", R=1, eps=Fraction(1, 3))
print("search in Z:", found.set, "ratio", found.ratio)

# %% ...and none in F2
# Balls in the free group keep a fixed fraction of their points on the sphere,
# so the search gives up and says how far it looked.
miss = folner_search("f2", R=1, eps=Fraction(1, 10), max_radius=4)
print("search in F2:", type(miss).__name__, "best ratio", miss.min_ratio)
print("  ", miss.note)

# %% Doubling the free group
ball = free_group_ball(2, 5)
cert = paradox_certificate(ball, R=1, collar=1)
assert verify_certificate(ball, cert)
print(f"interior {len(cert.interior)} points sent injectively onto "
      f"{len(cert.X_plus) + len(cert.X_minus)} disjoint targets")

# The two branches of the matching are partial translations; as 0/1 matrices
# they satisfy the Leavitt relations on the interior, exactly.
fam = cuntz_build(ball, cert)
for rel, ok in leavitt_verify(fam).relations.items():
    print(f"  {rel:28s} {ok}")
e, _ = standard_form_witness(fam)
print("e = S1 T1 is idempotent:", e @ e == e)

# %% The same question on Z has a certificate of failure
viol = paradox_certificate(z_window(20), R=1, collar=1)
assert isinstance(viol, HallViolation)
print(f"Z window: {len(viol.left)} demands, {len(viol.neighbors)} targets, "
      f"deficiency {viol.deficiency}")
