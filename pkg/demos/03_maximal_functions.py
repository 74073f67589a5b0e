# %% [markdown]
# # Maximal functions
#
# `Mf(x)` is the largest average of `|f|` over balls containing `x`. For each
# center the prefix averages are turned into suffix maxima and scattered back
# to the points, which costs O(n^2 log n) overall.

# %%
import time

import numpy as np

from muckenhoupt import generate, lerner_pointwise_check, maximal, maximal_weighted, norm_ratio
from muckenhoupt.oracle import maximal_oracle

# %%
space = generate("grid1d", n=2048)
f = np.random.default_rng(1).random(space.n)
t0 = time.perf_counter()
Mf = maximal(space, f)
print(f"grid1d(2048): {time.perf_counter() - t0:.2f}s")

# %%
small = generate("grid2d", nx=8, ny=8)
g = np.random.default_rng(2).normal(size=small.n)
print("max error vs brute force:", np.abs(maximal(small, g) - maximal_oracle(small, g)).max())

# %% [markdown]
# The weighted maximal operator averages in `w dmu`. Composing two of them
# dominates `Mf` pointwise once `[w]_{A_p}` is factored in.

# %%
w = np.exp(np.random.default_rng(3).normal(size=small.n))
print(maximal_weighted(small, w, np.abs(g))[:5])
r = lerner_pointwise_check(small, w, 2.0, np.abs(g))
print("pointwise bound holds:", r.ok, "min relative slack:", round(r.min_relative_slack, 4))

# %%
family = [np.random.default_rng(i).random(small.n) for i in range(8)]
print("sup ||Mf|| / ||f|| in L^2(w):", norm_ratio(small, w, 2.0, family).sup_ratio)
