# %% [markdown]
# # Auditing the analytic bounds
#
# Three claims are checked numerically: an upper bound on `D12` at the band
# edge, an upper bound on the ground-state energy, and absence of an
# eigenvalue beyond a momentum threshold.

# %%
import numpy as np

from pfiber import (
    ModelParams,
    d12_edge,
    lemma_dd1_bound,
    no_root_threshold,
    secular_f_edge,
    solve_ground,
    theorem1_bound,
)

params = ModelParams.with_default_gamma0(1.0, 1.0, 0.0)

# %%
print(" |p|   D12(edge)  bound    ratio")
for p_abs in np.linspace(0.05, 3.0, 12):
    d = d12_edge(p_abs, params).value.real
    b = lemma_dd1_bound(p_abs, params)
    print(f"{p_abs:4.2f}  {d:8.5f}  {b:8.5f}  {d / b:5.3f}")

# %% [markdown]
# The energy bound is loose by a wide margin:

# %%
energies = [solve_ground(p, params) for p in np.linspace(0, 3, 31)]
print(max(e for e in energies if e is not None), theorem1_bound(params))

# %% [markdown]
# Beyond the threshold `F` is positive on the edge, so no eigenvalue exists.
# In practice the eigenvalue disappears well before it.

# %%
p_far = no_root_threshold(params)
print(p_far, secular_f_edge(p_far, params), solve_ground(p_far, params))
grid = np.linspace(2.0, 6.0, 81)
last = max(p for p in grid if solve_ground(p, params) is not None)
print("last |p| with an eigenvalue on this grid:", last)
