# %% [markdown]
# # Band edge and ground-state dispersion
#
# For each total momentum the continuous band starts at `z0(|p|)`. Below it
# the operator has at most one eigenvalue, the zero of the secular function
# `F(p, .)`. This script sweeps `|p|` and prints both curves.

# %%
import numpy as np

from pfiber import ModelParams, dispersion_curve, secular_f, solve_ground, z0

params = ModelParams.with_default_gamma0(e=1.0, R=1.0, sigma=0.0)
params

# %% [markdown]
# At zero momentum the eigenvalue sits exactly at the band edge `gamma0`.

# %%
print(solve_ground(0.0, params), params.gamma0)

# %% [markdown]
# `F` is positive at the bottom of the search bracket and decreasing up to the
# edge, so the sign at the edge decides whether an eigenvalue exists.

# %%
p_abs = 0.5
zs = np.linspace(params.gamma0 - p_abs**2 / 2, z0(p_abs, params), 6)
for z in zs:
    print(f"z = {z:.6f}   F = {secular_f(p_abs, z, params):+.6f}")

# %% [markdown]
# A sweep returns one report per point: edge, eigenvalue (or None), the edge
# value of `F`, and the bound audits.

# %%
reports = dispersion_curve(np.linspace(0.0, 3.0, 13), (0, 0, 1), params)
print(" |p|      z0          z*          F(z0)     regime")
for r in reports:
    zs = "   --     " if r.eigenvalue is None else f"{r.eigenvalue:.8f}"
    print(f"{r.p_abs:4.2f}  {r.ess_edge:.8f}  {zs}  {r.f_at_edge:+9.5f}  {r.regime}")

# %% [markdown]
# The distance below the band shrinks as `|p|` grows. Weak coupling pushes the
# eigenvalue out of the gap much earlier:

# %%
weak = ModelParams.with_default_gamma0(e=0.1, R=1.0)
for r in dispersion_curve([0.5, 1.0, 1.5, 2.0], (1, 0, 0), weak):
    print(r.p_abs, r.eigenvalue is not None, r.ess_edge - (r.eigenvalue or r.ess_edge))
