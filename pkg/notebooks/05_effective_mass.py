# %% [markdown]
# # Effective mass
#
# The inverse mass is the curvature of the dispersion at the origin. It has a
# closed expression through `D12(0, gamma0)`, which we compare with a finite
# difference of the computed eigenvalues and, for small `sigma`, with the
# `sigma = 0` closed form.

# %%
import numpy as np

from pfiber import (
    ModelParams,
    effective_mass,
    effective_mass_fd,
    effective_mass_fd_extrapolated,
    effective_mass_sigma0,
    effective_mass_sigma_limit,
)

# %%
for e, R, sigma in [(0.1, 1.0, 0.0), (0.5, 2.0, 0.1), (1.0, 1.0, 0.0)]:
    params = ModelParams.with_default_gamma0(e, R, sigma)
    f = effective_mass(params)
    d = effective_mass_fd_extrapolated(params)
    print(f"e={e} R={R} sigma={sigma}: formula {f.inv_mass:.8f}  difference {d.inv_mass:.8f}  "
          f"mass {f.mass}")

# %% [markdown]
# The raw difference quotient converges like `h^2`:

# %%
params = ModelParams.with_default_gamma0(0.5, 1.0, 0.0)
ref = effective_mass(params).inv_mass
for h in (8e-2, 4e-2, 2e-2, 1e-2):
    print(h, effective_mass_fd(params, h=h).inv_mass - ref)

# %% [markdown]
# Letting `sigma -> 0` recovers the closed form.

# %%
lim = effective_mass_sigma_limit(0.3, 2.0, (1e-2, 1e-3, 1e-4))
print(np.array(lim.details["values"]) - lim.details["target"])
print("extrapolated error", lim.inv_mass - effective_mass_sigma0(0.3, 2.0))
