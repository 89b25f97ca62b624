# %% [markdown]
# # The scalar kernels and the 3x3 matrix C
#
# `D1`, `D2` and `D12` are double integrals with a denominator that vanishes
# on the band edge. The angular integral is done in closed form; the radial
# one adaptively. Here we check them against closed forms at `p = 0` and
# against a plain tensor-product rule elsewhere.

# %%
import math

import numpy as np

from pfiber import ModelParams, c_matrix, c_matrix_bruteforce, kernel_triplet, z0
from pfiber.kernels import kernels_tensor_reference

params = ModelParams.with_default_gamma0(1.0, 2.0, 0.0)

# %%
kt = kernel_triplet(0.0, params.gamma0, params)
log_term = math.log(params.R / 2 + 1)
print("D1 ", kt.d1.value.real, 4 * math.pi * log_term)
print("D2 ", kt.d2.value.real, 4 * math.pi * log_term / 3)
print("D12", kt.d12.value.real, 8 / 3 * log_term)

# %% [markdown]
# Off the origin, compare against the raw two-dimensional rule.

# %%
for p_abs, z in [(0.5, 2.0), (1.5, 3.0 + 0.5j), (2.0, -1.0)]:
    kt = kernel_triplet(p_abs, z, params)
    ref = kernels_tensor_reference(p_abs, z, params, n_rho=300, n_t=96)
    print(p_abs, z, abs(kt.d1.value - ref[0]), abs(kt.d12.value - ref[2]))

# %% [markdown]
# Approaching the edge, `D12` stays finite. The dedicated edge evaluation
# agrees with the limit from below.

# %%
p_abs = 1.0
edge = kernel_triplet(p_abs, None, params, edge=True).d12.value.real
for dz in (1e-2, 1e-4, 1e-6, 1e-8):
    print(dz, kernel_triplet(p_abs, z0(p_abs, params) - dz, params).d12.value.real - edge)

# %% [markdown]
# The matrix `C` follows from `D1` and `D2` alone. The brute-force version
# integrates the full three-dimensional integrand on a grid that is not
# aligned with `p`.

# %%
p = np.array([0.3, -0.7, 0.4])
z = 2.5 + 0.3j
C = c_matrix(p, z, params)
B = c_matrix_bruteforce(p, z, params)
print(np.round(C, 6))
print("max difference", np.max(np.abs(C - B)))
print("trace C vs D1", np.trace(C), kernel_triplet(np.linalg.norm(p), z, params).d1.value)
