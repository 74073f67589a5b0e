# %% [markdown]
# # Whitney covers and the truncation f_t
#
# `E_t = {Mf > t}` gets a cover by balls of radius `dist(x, X \ E_t) / 8`.
# Replacing `f` on `E_t` by the largest cover-ball average gives `f_t`, which
# is bounded by a multiple of `t`.

# %%
import numpy as np

from muckenhoupt import check_truncation_bounds, generate, maximal, truncate

# %%
space = generate("grid1d", n=64)
rng = np.random.default_rng(0)
f = rng.random(64) * (rng.random(64) < 0.3)
Mf = maximal(space, f)
t = float(np.quantile(Mf, 0.7))
res = truncate(space, f, t, Mf)
print("points in E_t:", res.level_set.sum(), "cover balls:", len(res.cover.balls))
print("overlap:", res.cover.overlap_max)

# %%
chk = check_truncation_bounds(space, f, t, res)
print("f_t <= t off E_t:", chk.off_level)
print("f_t <= c^4 t on E_t:", chk.on_level, "worst ratio", round(chk.worst_on_level_ratio, 4))
print("Mf <= K Mf_t off E_t:", chk.domination, "K =", chk.domination_constant)
