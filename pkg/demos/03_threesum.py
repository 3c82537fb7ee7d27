# %% [markdown]
# # 3-SUM through triangle listing
#
# Values hash to buckets with a nearly linear hash; a zero-sum triple becomes
# a triangle of the bucket graph.  The hash is off from linear by one of a few
# fixed offsets.

# %%
import numpy as np

from combbmm.threesum import (ThreeSumInstance, default_bucket_bits, measure_phi,
                              sample_linear_hash, solve_3sum_naive, solve_3sum_via_triangles)

bound = 10**6
h = sample_linear_hash(default_bucket_bits(100), seed=3, offset=bound)
print("offsets h(a)+h(b)-h(a+b) seen:", sorted(measure_phi(h, bound, pairs=20_000)))

# %% [markdown]
# With pair sampling switched off, the answer comes from the triangles of the
# bucket graph.

# %%
rng = np.random.default_rng(11)
vals = rng.integers(-bound, bound + 1, size=100)
vals[[5, 17, 60]] = [123_456, -400_000, 276_544]
inst = ThreeSumInstance.from_values(vals, bound=bound)
res = solve_3sum_via_triangles(inst, seed=0, pair_factor=0)
print(res)
print("naive agrees:", solve_3sum_naive(inst).found == res.found)
