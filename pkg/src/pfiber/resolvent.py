"""Explicit resolvent ``(H(p) - z)^{-1}`` through the reduced 3x3 system.

Solving ``(H(p) - z) f = u`` reduces to a vector equation ``U Q = S`` with
``U = a I + b p p^T``::

    f0          = (u0 + p . Q) / T
    f1(k, lam)  = (T u1 - b_lam u0 - N(k, lam) . Q) / (T L)

The scalars ``a`` and ``b`` come from the kernels D1 and D2. Two sources are
offered:

* ``kernels="grid"`` (default): D1 and D2 are the same quadrature sums that
  define the discretized operator on ``u``'s grid, so the output is the exact
  inverse of :func:`pfiber.oracle.build_discrete_h` on that grid. This needs
  the grid axis parallel to ``p``; otherwise the 3x3 matrix is assembled in
  full from the grid and solved directly.
* ``kernels="exact"``: D1 and D2 from :mod:`pfiber.kernels`, i.e. the
  continuum operator sampled on the grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from pfiber.errors import AccuracyWarning, DomainError, PoleError, SingularError
from pfiber.grid import QuadratureGrid, StateVector
from pfiber.kernels import DEFAULT_QUAD, QuadratureSpec, kernel_triplet
from pfiber.model import ModelParams, as_vector, coupling_vectors, tilde_l, tilde_t, z0

_SINGULAR_RTOL = 1e-14


@dataclass(frozen=True)
class ReducedSystem:
    """Intermediate quantities of one resolvent application.

    ``a`` and ``b`` are NaN when the grid is not aligned with ``p`` and the
    3x3 system was solved without the ``a I + b p p^T`` structure.
    """

    T: complex
    a: complex
    b: complex
    S: np.ndarray
    Q: np.ndarray
    p: np.ndarray

    @property
    def U(self):
        return self.a * np.eye(3) + self.b * np.outer(self.p, self.p)


def b_lambda(p, k, lam, params: ModelParams):
    """``-(e / sqrt 2) p . G(k, lam)``; ``k`` may be an ``(n, 3)`` batch."""
    pv = as_vector(p)
    G = coupling_vectors(k, params)[..., lam - 1, :]
    out = -(params.e / math.sqrt(2.0)) * (G @ pv)
    return float(out) if np.ndim(out) == 0 else out


def n_vector(p, k, lam, T, params: ModelParams):
    """``b_lam(p, k) p + (T e / sqrt 2) G(k, lam)``."""
    pv = as_vector(p)
    G = coupling_vectors(k, params)[..., lam - 1, :]
    b = -(params.e / math.sqrt(2.0)) * (G @ pv)
    return np.asarray(b)[..., None] * pv + (T * params.e / math.sqrt(2.0)) * G


def _t_value(p, z, params):
    T = tilde_t(p, params) - z
    if T == 0:
        raise PoleError(f"T = 0: z = {z} coincides with T~(p)")
    return T


def _check_z(p, z, grid, params, margin):
    z = complex(z)
    if z.imag != 0.0:
        return z
    pv = as_vector(p)
    floor = z0(float(np.linalg.norm(pv)), params)
    if grid is not None:
        floor = min(floor, float(np.min(tilde_l(pv, grid.nodes, params))))
    if z.real >= floor - margin:
        raise DomainError(
            f"real z = {z.real} is not below the continuous spectrum "
            f"(edge {floor}, margin {margin})")
    return z


def s_vector(p, z, u: StateVector, params: ModelParams):
    """``(e/sqrt 2) sum_lam int G(k, lam) [u1/L - b_lam u0 / (T L)] dk`` on ``u``'s grid."""
    pv = as_vector(p)
    grid = u.grid
    T = _t_value(pv, z, params)
    L = tilde_l(pv, grid.nodes, params) - z
    G = coupling_vectors(grid.nodes, params)                   # (M, 2, 3)
    b = -(params.e / math.sqrt(2.0)) * (G @ pv)               # (M, 2)
    bracket = u.f1.T / L[:, None] - b * u.f0 / (T * L[:, None])  # (M, 2)
    integrand = np.einsum("ml,mlc->mc", bracket, G)
    return (params.e / math.sqrt(2.0)) * grid.integrate(integrand)


def _ab_from(d1, d2, p2, T):
    a = 0.5 * (2.0 + d1 + d2)
    if p2 == 0.0:
        return a, 0.0 * a
    b = (d1 - 3.0 * d2) / (2.0 * p2) - (d1 - d2) / T
    return a, b


def u_coeffs(p, z, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """``(a, b)`` with ``a = (2 + D1 + D2)/2``, ``b = (D1 - 3 D2)/(2 p^2) - (D1 - D2)/T``.

    At ``p = 0`` the ``p p^T`` term is absent and ``b = 0`` is returned.
    """
    pv = as_vector(p)
    p_abs = float(np.linalg.norm(pv))
    kt = kernel_triplet(p_abs, z, params, quad)
    T = _t_value(pv, z, params)
    return _ab_from(kt.d1.value, kt.d2.value, p_abs * p_abs, T)


def grid_kernels(p, z, grid: QuadratureGrid, params: ModelParams):
    """Quadrature analogues of D1 and D2 on ``grid``.

    ``D1 = (e^2/2) sum_m w_m g^2 / L`` and ``D2`` adds the weight
    ``(khat . phat)^2``.
    """
    pv = as_vector(p)
    k = grid.nodes
    r = np.linalg.norm(k, axis=-1)
    g2 = r ** (2.0 * params.sigma - 1.0)
    L = tilde_l(pv, k, params) - z
    base = 0.5 * params.e**2 * grid.weights * g2 / L
    p_abs = float(np.linalg.norm(pv))
    cos2 = ((k @ pv) / (r * p_abs)) ** 2 if p_abs > 0 else np.full_like(r, 1.0 / 3.0)
    return complex(np.sum(base)), complex(np.sum(base * cos2))


def grid_coeffs(p, z, grid: QuadratureGrid, params: ModelParams):
    """``(a, b)`` built from :func:`grid_kernels`."""
    pv = as_vector(p)
    d1, d2 = grid_kernels(pv, z, grid, params)
    T = _t_value(pv, z, params)
    return _ab_from(d1, d2, float(pv @ pv), T)


def solve_q(a, b, p, S):
    """Solve ``Q U = S`` with ``U = a I + b p p^T`` (U is symmetric).

    ``U^{-1} = (I - b p p^T / (a + b p^2)) / a``.
    """
    pv = as_vector(p)
    S = np.asarray(S, dtype=complex)
    p2 = float(pv @ pv)
    lead = a + b * p2
    if abs(a) == 0 or abs(lead) <= _SINGULAR_RTOL * (abs(a) + abs(b) * p2):
        raise SingularError(f"det U = a^2 (a + b p^2) vanishes (a={a}, a+bp^2={lead})")
    return (S - (b / lead) * (S @ pv) * pv) / a


def _grid_aligned(p, grid):
    pv = as_vector(p)
    n = float(np.linalg.norm(pv))
    if n == 0.0:
        return True
    return float(np.linalg.norm(np.cross(pv / n, grid.axis))) <= 1e-13


def _q_general(p, z, grid, params, T, S):
    pv = as_vector(p)
    G = coupling_vectors(grid.nodes, params)
    L = tilde_l(pv, grid.nodes, params) - z
    M = 0.5 * params.e**2 * np.einsum("m,mlc,mld->cd", grid.weights / L, G, G)
    A = np.eye(3) + M - np.outer(M @ pv, pv) / T
    try:
        return np.linalg.solve(A, S)
    except np.linalg.LinAlgError as exc:
        raise SingularError(str(exc)) from exc


def reduced_system(p, z, u: StateVector, params: ModelParams, kernels="grid",
                   quad: QuadratureSpec = DEFAULT_QUAD, margin=0.0) -> ReducedSystem:
    pv = as_vector(p)
    z = _check_z(pv, z, u.grid, params, margin)
    T = _t_value(pv, z, params)
    S = s_vector(pv, z, u, params)
    if kernels == "grid":
        if _grid_aligned(pv, u.grid):
            a, b = grid_coeffs(pv, z, u.grid, params)
            Q = solve_q(a, b, pv, S)
        else:
            a = b = math.nan
            Q = _q_general(pv, z, u.grid, params, T, S)
    elif kernels == "exact":
        p_abs = float(np.linalg.norm(pv))
        kt = kernel_triplet(p_abs, z, params, quad)
        a, b = _ab_from(kt.d1.value, kt.d2.value, p_abs * p_abs, T)
        dist = abs(z.imag) if z.imag != 0 else z0(p_abs, params) - z.real
        if kt.d1.est_error / max(dist, 1e-300) > 1e-8:
            warnings.warn("kernel error over distance to the spectrum exceeds 1e-8",
                          AccuracyWarning, stacklevel=3)
        Q = solve_q(a, b, pv, S)
    else:
        raise DomainError(f"kernels must be 'grid' or 'exact', got {kernels!r}")
    return ReducedSystem(T, a, b, S, Q, pv)


def apply_resolvent(p, z, u: StateVector, params: ModelParams, kernels="grid",
                    quad: QuadratureSpec = DEFAULT_QUAD, margin=0.0) -> StateVector:
    """Return ``f = (H(p) - z)^{-1} u`` on ``u``'s grid.

    Real ``z`` is accepted below the continuous spectrum (less ``margin``);
    hitting the eigenvalue raises :class:`SingularError`.
    """
    pv = as_vector(p)
    rs = reduced_system(pv, z, u, params, kernels, quad, margin)
    grid = u.grid
    T, Q = rs.T, rs.Q
    z = complex(z)
    L = tilde_l(pv, grid.nodes, params) - z
    G = coupling_vectors(grid.nodes, params)
    b = -(params.e / math.sqrt(2.0)) * (G @ pv)                # (M, 2)
    NQ = b * (pv @ Q) + (T * params.e / math.sqrt(2.0)) * (G @ Q)
    f0 = (u.f0 + pv @ Q) / T
    f1 = (T * u.f1.T - b * u.f0 - NQ) / (T * L[:, None])
    return StateVector(f0, f1.T, grid)


__all__ = [
    "ReducedSystem",
    "apply_resolvent",
    "b_lambda",
    "grid_coeffs",
    "grid_kernels",
    "n_vector",
    "reduced_system",
    "s_vector",
    "solve_q",
    "u_coeffs",
]
