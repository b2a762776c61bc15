"""K_0 of a locally finite group, read off its subgroup tower.

A tower records the index jumps ``r_n``; the group orders are
``k_n = r_0 r_1 ... r_(n-1)``.  Classes are eventually periodic integer
sequences modulo those whose ``k_n``-block sums vanish at some level.
"""

from coarsekit.ktheory import (K0Class, TowerSpec, class_equal, class_positive, compare_towers,
                               supernatural, truncated_limit_oracle)

two, four, six = TowerSpec.constant(2), TowerSpec.constant(4), TowerSpec.constant(6)
print({str(t.cycle): str(supernatural(t)) for t in (two, four, six)})

# %% equality and positivity
x = K0Class.finite([1, -1])
print("[1,-1] = 0 over 2^n:", class_equal(x, K0Class(), two).to_json())
print("[1,-1] = 0 over 3^n:", class_equal(x, K0Class(), TowerSpec.constant(3)).to_json())
print("[-3,1,1,1] >= 0:", class_positive(K0Class.finite([-3, 1, 1, 1]), two).to_json())
print("[-3,1,1,0] >= 0:", class_positive(K0Class.finite([-3, 1, 1, 0]), two).to_json())

# a period of 3 never lines up with blocks of size 2^n, so a budget is needed
odd = K0Class((), (1, -1, 0))
print("period 3 over 2^n:", class_equal(odd, K0Class(), two, level_budget=6).to_json())

# %% the brute-force model agrees
orc = truncated_limit_oracle(two, 3, 1)
print("dims", orc.dims, " [1,-1] dies at stage", orc.zero_stage([1, -1]))

# %% which towers give the same group, coarsely?
pairs = {"2^n vs 4^n": (two, four), "2^n vs 6^n": (two, six),
         "Z/4 vs 2^n": (TowerSpec.finite(4), two)}
for label, (a, b) in pairs.items():
    flags = compare_towers(a, b)
    same = [k for k, v in flags.items() if v]
    print(f"{label}: {', '.join(same) or 'no equivalence'}")
