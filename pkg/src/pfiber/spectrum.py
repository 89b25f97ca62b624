"""Secular function, ground-state dispersion, eigenvector and effective mass."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from pfiber.errors import DomainError, PoleError, SolverError
from pfiber.grid import StateVector
from pfiber.kernels import (
    DEFAULT_QUAD,
    QuadratureSpec,
    _shifted_energy,
    edge_shift,
    kernel_triplet,
)
from pfiber.model import (
    ModelParams,
    Momentum,
    as_vector,
    coupling_vectors,
    default_gamma0,
    tilde_l,
    tilde_t,
    z0,
)

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class SpectrumReport:
    p_abs: float
    ess_edge: float
    eigenvalue: Optional[float]
    f_at_edge: float
    d12_edge: float
    bounds_ok: tuple  # (upper bound, D12 edge bound, positivity)
    regime: str
    error: Optional[str] = None

    @property
    def ok(self):
        return self.error is None and all(self.bounds_ok)


@dataclass(frozen=True)
class EffectiveMassResult:
    inv_mass: float
    method: str
    details: dict = field(default_factory=dict)

    @property
    def mass(self):
        return 1.0 / self.inv_mass if self.inv_mass > 0 else None


@dataclass(frozen=True)
class Eigenfunction:
    """Ground-state vector at momentum ``p``, vacuum amplitude fixed to 1.

    ``one_photon(k, lam)`` accepts a single 3-vector or an ``(n, 3)`` array
    and ``lam`` in {1, 2}. Call :meth:`normalized` for unit L2 norm on a
    grid.
    """

    p: Momentum
    z_star: float
    zero_photon: float
    one_photon: Callable
    params: ModelParams

    def sample(self, grid):
        """Discretize on a :class:`~pfiber.grid.QuadratureGrid`."""
        f1 = np.stack([self.one_photon(grid.nodes, 1), self.one_photon(grid.nodes, 2)])
        return StateVector(complex(self.zero_photon), f1.astype(complex), grid)

    def normalized(self, grid):
        state = self.sample(grid)
        return state.scale(1.0 / state.norm())


def _p_abs(p):
    if np.ndim(p) == 0 and not isinstance(p, Momentum):
        value = float(p)
        if value < 0:
            raise DomainError(f"|p| must be non-negative, got {value}")
        return value
    return float(np.linalg.norm(as_vector(p)))


def _f_from(p_abs, c0, d12_value, params):
    # p^2/2 + z - gamma0 == p^2 - c0
    return c0 - math.pi * params.e**2 * (p_abs * p_abs - c0) * d12_value


def secular_f(p_abs, z, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """``F(p, z) = p^2/2 - z + gamma0 - pi e^2 (p^2/2 + z - gamma0) D12(p, z)``.

    Defined for real ``z <= z0(|p|)``; ``z`` equal to the edge (up to
    rounding) is evaluated with the exact edge shift.
    """
    p_abs = _p_abs(p_abs)
    z = float(z)
    c0, on_edge = _shifted_energy(p_abs, z, params)
    c0 = float(np.real(c0))
    kt = kernel_triplet(p_abs, z, params, quad, edge=on_edge)
    return _f_from(p_abs, c0, kt.d12.value.real, params)


def secular_f_edge(p_abs, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """``F(p, z0(|p|))``; the sign decides whether an eigenvalue exists."""
    p_abs = _p_abs(p_abs)
    kt = kernel_triplet(p_abs, None, params, quad, edge=True)
    return _f_from(p_abs, edge_shift(p_abs), kt.d12.value.real, params)


def k_det(p_abs, z, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """``K(p, z) = det U = a^2 (a + b p^2)`` with ``T = T~(p) - z``.

    Equals ``(D1 + D2 + 2)^2 / (4 T) * F(p, z)`` whenever gamma0 is the
    default diagonal shift.
    """
    p_abs = _p_abs(p_abs)
    z = float(z)
    c0, on_edge = _shifted_energy(p_abs, z, params)
    kt = kernel_triplet(p_abs, z, params, quad, edge=on_edge)
    dd1, dd2 = kt.d1.value.real, kt.d2.value.real
    a = 0.5 * (2.0 + dd1 + dd2)
    if p_abs == 0.0:
        return a**3
    T = tilde_t(Momentum.along(p_abs), params) - z
    if T == 0.0:
        raise PoleError(f"T = 0 at z = {z}")
    p2 = p_abs * p_abs
    b = (dd1 - 3.0 * dd2) / (2.0 * p2) - (dd1 - dd2) / T
    return a * a * (a + b * p2)


def lemma_dd1_bound(p_abs, params: ModelParams):
    """Upper bound on ``D12(p, z0(|p|))``."""
    s2 = 1.0 + 2.0 * params.sigma
    r = params.R**s2
    if p_abs < 0.5:
        return 4.0 * r / (3.0 * s2 * (1.0 - p_abs))
    return 4.0 * r / (s2 * p_abs)


def theorem1_bound(params: ModelParams):
    """Upper bound on the ground-state energy, ``7/2 + 4 pi e^2 R^(1+2s)/(1+2s) + gamma0``."""
    s2 = 1.0 + 2.0 * params.sigma
    return 3.5 + 4.0 * math.pi * params.e**2 * params.R**s2 / s2 + params.gamma0


def no_root_threshold(params: ModelParams):
    """``|p|`` beyond which ``F(p, z0) > 0`` is guaranteed: ``4 + 4 pi e^2 R^(1+2s)/(1+2s)``."""
    s2 = 1.0 + 2.0 * params.sigma
    return 4.0 + 4.0 * math.pi * params.e**2 * params.R**s2 / s2


def _regime(p_abs, params):
    if p_abs <= 1.0:
        return "unique-root"
    if p_abs >= no_root_threshold(params):
        return "no-root"
    return "undetermined"


def solve_ground(p, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD,
                 tol=DEFAULT_TOL, *, maxiter=200):
    """Isolated eigenvalue of ``H(p)`` below the band, or ``None``.

    ``F(p, .)`` equals ``p^2 > 0`` at ``gamma0 - p^2/2`` and is strictly
    decreasing from there up to the edge, so a root exists iff
    ``F(p, z0) <= 0`` and it is bracketed by ``[gamma0 - p^2/2, z0]``.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    p_abs = _p_abs(p)
    edge = z0(p_abs, params)
    f_edge = secular_f_edge(p_abs, params, quad)
    if f_edge > 0.0:
        return None
    if f_edge == 0.0:
        return edge
    lo = params.gamma0 - 0.5 * p_abs * p_abs
    if edge - lo <= 16 * np.finfo(float).eps * max(1.0, abs(edge)):
        # bracket narrower than the float spacing: the root is the edge to working precision
        return edge
    f_lo = secular_f(p_abs, lo, params, quad)
    if not f_lo > 0.0:
        raise SolverError("F is not positive at the lower bracket",
                          {"p_abs": p_abs, "z_lo": lo, "F_lo": f_lo, "F_edge": f_edge})

    def f(z):
        if z >= edge:
            return f_edge
        return secular_f(p_abs, z, params, quad)

    try:
        root, info = brentq(f, lo, edge, xtol=tol, rtol=4 * np.finfo(float).eps,
                            maxiter=maxiter, full_output=True)
    except RuntimeError as exc:
        raise SolverError(str(exc), {"p_abs": p_abs, "bracket": (lo, edge),
                                     "F": (f_lo, f_edge)}) from exc
    if not info.converged:
        raise SolverError("root search did not converge",
                          {"p_abs": p_abs, "iterations": info.iterations, "flag": info.flag})
    return float(root)


def spectrum_report(p_abs, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD,
                    tol=DEFAULT_TOL) -> SpectrumReport:
    """Band edge, ground state and bound audits at one ``|p|``.

    Audits are reported, never raised: a failed bound shows up as ``False``
    in ``bounds_ok``.
    """
    p_abs = _p_abs(p_abs)
    edge = z0(p_abs, params)
    kt = kernel_triplet(p_abs, None, params, quad, edge=True)
    d12e = kt.d12.value.real
    f_edge = _f_from(p_abs, edge_shift(p_abs), d12e, params)
    err = None
    try:
        zs = solve_ground(p_abs, params, quad, tol)
    except SolverError as exc:
        zs, err = None, f"{exc} {exc.diagnostics}"
    upper_ok = zs is None or zs <= theorem1_bound(params)
    dd1_ok = d12e <= lemma_dd1_bound(p_abs, params)
    pos_ok = zs is None or zs > 0.0
    return SpectrumReport(p_abs, edge, zs, f_edge, d12e, (upper_ok, dd1_ok, pos_ok),
                          _regime(p_abs, params), err)


def dispersion_curve(p_grid, direction, params: ModelParams,
                     quad: QuadratureSpec = DEFAULT_QUAD, tol=DEFAULT_TOL, workers=1):
    """Sweep :func:`spectrum_report` over ``|p|`` values along ``direction``.

    Output follows input order. Only ``|p|`` enters the spectrum, so the
    direction is validated and otherwise unused.
    """
    d = np.asarray(direction, dtype=float).reshape(3)
    if abs(np.linalg.norm(d) - 1.0) > 1e-12:
        raise DomainError("direction must be a unit vector")
    grid = [float(v) for v in p_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise DomainError("p_grid must be sorted ascending")
    run = lambda v: spectrum_report(v, params, quad, tol)  # noqa: E731
    if workers <= 1:
        return [run(v) for v in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, grid))


def eigenfunction(p, z_star, params: ModelParams) -> Eigenfunction:
    """Eigenvector of ``H(p)`` at a root ``z_star`` of the secular function.

    With the vacuum amplitude set to 1 the one-photon part is::

        f1(k, lam) = (e / sqrt 2) (p . G(k, lam)) (1 - T / p^2) / L(k)

    where ``T = T~(p) - z*`` and ``L = L~(p, k) - z*``. At ``p = 0`` the
    vector is the bare vacuum.
    """
    pm = p if isinstance(p, Momentum) else Momentum(as_vector(p))
    pv = pm.p
    p2 = float(pv @ pv)
    z_star = float(z_star)
    if z_star > z0(math.sqrt(p2), params) * (1 + 8 * np.finfo(float).eps):
        raise DomainError("z_star lies inside the essential spectrum")
    T = tilde_t(pv, params) - z_star
    factor = 0.0 if p2 == 0.0 else (1.0 - T / p2)
    coef = params.e / math.sqrt(2.0) * factor

    def one_photon(k, lam):
        k = np.asarray(k, dtype=float)
        if lam not in (1, 2):
            raise DomainError("polarization index must be 1 or 2")
        if coef == 0.0:
            out = np.zeros(k.shape[:-1])
        else:
            G = coupling_vectors(k, params)[..., lam - 1, :]
            L = tilde_l(pv, k, params) - z_star
            out = coef * (G @ pv) / L
        return float(out) if np.ndim(out) == 0 else out

    return Eigenfunction(pm, z_star, 1.0, one_photon, params)


def effective_mass(params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """Inverse mass ``(1 - pi e^2 D12(0, gamma0)) / (1 + pi e^2 D12(0, gamma0))``."""
    d = kernel_triplet(0.0, None, params, quad, edge=True).d12.value.real
    c = math.pi * params.e**2 * d
    return EffectiveMassResult((1.0 - c) / (1.0 + c), "formula", {"d12": d})


def effective_mass_fd(params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD, h=1e-2,
                      tol=1e-15):
    """Curvature ``2 (E(h) - E(0)) / h^2`` of the dispersion at the origin.

    E is even in ``|p|``, so this is the central second difference.
    """
    if not 0 < 2 * h < 1:
        raise DomainError("need 0 < 2h < 1")
    e0 = solve_ground(0.0, params, quad, tol)
    eh = solve_ground(h, params, quad, tol)
    if eh is None or e0 is None:
        raise SolverError("no ground state near p = 0", {"h": h})
    return EffectiveMassResult(2.0 * (eh - e0) / (h * h), "finite_difference",
                               {"h": h, "E0": e0, "Eh": eh})


def effective_mass_fd_extrapolated(params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD,
                                   hs=(1e-2, 5e-3), tol=1e-15):
    """Richardson extrapolation of :func:`effective_mass_fd` in ``h^2``."""
    h1, h2 = hs
    q1 = effective_mass_fd(params, quad, h1, tol).inv_mass
    q2 = effective_mass_fd(params, quad, h2, tol).inv_mass
    r = (h1 / h2) ** 2
    value = (r * q2 - q1) / (r - 1.0)
    return EffectiveMassResult(value, "finite_difference",
                               {"h": list(hs), "raw": [q1, q2]})


def effective_mass_sigma0(e, R):
    """Closed-form inverse mass in the limit sigma -> 0."""
    if R <= 0:
        raise DomainError("R must be positive")
    c = (8.0 / 3.0) * math.pi * e * e * math.log(R / 2.0 + 1.0)
    return (1.0 - c) / (1.0 + c)


def effective_mass_sigma_limit(e, R, sigmas=(1e-2, 1e-3, 1e-4),
                               quad: QuadratureSpec = DEFAULT_QUAD):
    """Formula inverse mass along a sigma sequence, extrapolated to sigma = 0.

    The extrapolation is the interpolating polynomial through all points,
    evaluated at zero.
    """
    sig = np.asarray(sigmas, dtype=float)
    vals = np.array([
        effective_mass(ModelParams(e, R, s, default_gamma0(e, R, s)), quad).inv_mass
        for s in sig])
    coeffs = np.polyfit(sig, vals, len(sig) - 1)
    limit = float(np.polyval(coeffs, 0.0))
    return EffectiveMassResult(limit, "sigma_limit",
                               {"sigmas": sig.tolist(), "values": vals.tolist(),
                                "target": effective_mass_sigma0(e, R)})
