# %% [markdown]
# # Finite spaces, balls and the doubling constant
#
# A space is a distance matrix plus positive point masses. Open balls only
# change at the distances from their center, so everything below is exact.

# %%
import numpy as np

from muckenhoupt import critical_radii, doubling_constant, enumerate_distinct_balls, generate
from muckenhoupt.oracle import doubling_oracle

# %%
line = generate("grid1d", n=8)
print("critical radii at 0:", critical_radii(line, 0))
print("distinct balls:", len(enumerate_distinct_balls(line)))

# %% [markdown]
# On a uniform line `B(x, 1) = {x}` and `B(x, 2)` adds both neighbours, so
# the doubling constant is 3 at every resolution.

# %%
for n in (8, 64, 512):
    print(n, doubling_constant(generate("grid1d", n=n)))

# %% [markdown]
# A dense radius sweep only ever sees a lower bound. Adding the breakpoints
# recovers the exact value.

# %%
cloud = generate("random_euclidean", n=64, dim=2, seed=3, measure="random")
print("breakpoint scan:", doubling_constant(cloud))
print("20 radii/center:", doubling_oracle(cloud, 20))
print("with breakpoints:", doubling_oracle(cloud, 20, include_breakpoints=True))

# %%
tree = generate("ultrametric", branching=3, depth=3)
print("ultrametric tree, 27 leaves:", doubling_constant(tree))
