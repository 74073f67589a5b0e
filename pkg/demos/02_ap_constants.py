# %% [markdown]
# # A_p constants
#
# `[w]_{A_p}` is the largest value of `avg(w) * avg(w^(1/(1-p)))^(p-1)` over
# all balls. Prefix sums along each center's distance order give every ball
# in one pass.

# %%
import numpy as np

from muckenhoupt import FiniteMetricMeasureSpace, ap_constant, dual_weight, generate, power_weight
from muckenhoupt.weights import conjugate

# %%
two = FiniteMetricMeasureSpace([[0, 1], [1, 0]], [1, 1])
rep = ap_constant(two, [1.0, 4.0], 2)
print(rep.constant, sorted(rep.witness.members))  # 25/16 on the whole space

# %% [markdown]
# Duality: the dual weight sits in `A_{p'}` with constant `[w]^(1/(p-1))`.

# %%
w = np.exp(np.random.default_rng(0).normal(size=64))
space = generate("grid1d", n=64)
for p in (1.5, 2.0, 3.0):
    a = ap_constant(space, w, p).constant ** (1 / (p - 1))
    b = ap_constant(space, dual_weight(w, p), conjugate(p)).constant
    print(p, a, b)

# %% [markdown]
# Power weights `|x|^alpha` on cell-centred grids over [-1, 1]. For p = 2 the
# constant settles when `alpha < 1` and keeps growing when `alpha > 1`.

# %%
for alpha in (0.5, 1.5):
    row = []
    for n in (64, 256, 1024):
        g = generate("grid1d", n=n, a=-1, b=1, cell_centered=True)
        row.append(ap_constant(g, power_weight(g, alpha), 2).constant)
    print(alpha, np.round(row, 4))
