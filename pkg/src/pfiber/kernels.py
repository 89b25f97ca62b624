"""Scalar kernels D1, D2, D12 and the 3x3 matrix C.

All three kernels are double integrals over ``rho in [0, R]`` and
``t = cos(theta) in [-1, 1]`` of ``w(t) rho^(1+2 sigma) / (A(rho) - B(rho) t)``
with

    A(rho) = p^2/2 + gamma0 - z + rho + rho^2/2,     B(rho) = |p| rho,

and weight ``w = 1`` (D1), ``t^2`` (D2) or ``1 - t^2`` (D12). D1 and D2 carry
the prefactor ``pi e^2``; D12 does not.

For fixed ``rho`` the t-integral is elementary. Writing ``x = B / A``::

    int dt / (A - B t)          = (2 / A) atanh(x) / x
    int t^2 dt / (A - B t)      = (2 / A) (atanh(x)/x - 1) / x^2

which leaves a one-dimensional radial integral handled by
:func:`pfiber._quadrature.integrate_radial`. ``atanh(x)`` is evaluated as
``(log(A + B) - log(A - B)) / 2`` with ``A - B`` rewritten as a sum of
non-negative terms, so it stays accurate where ``x`` rounds to 1 near the
band edge. For complex ``z`` the logarithms are principal-branch and their
cuts are never crossed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from pfiber._quadrature import integrate_radial
from pfiber.errors import AccuracyWarning, DomainError
from pfiber.model import ModelParams, as_vector, z0

_SERIES_CUTOFF = 0.1
_SERIES_TERMS = 14
_EDGE_ULPS = 8


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy controls.

    ``n_rho`` caps the number of adaptive radial panels, ``max_refine`` the
    bisection depth, ``abs_tol`` the absolute error target of the radial
    integral. ``n_t`` is only used by the tensor-product reference rule.
    """

    n_rho: int = 256
    n_t: int = 64
    abs_tol: float = 1e-10
    max_refine: int = 60

    def __post_init__(self):
        if self.n_rho < 2 or self.n_t < 2:
            raise DomainError("node counts must be at least 2")
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class KernelValue:
    value: complex
    est_error: float
    converged: bool = True

    @property
    def real(self):
        return self.value.real


@dataclass(frozen=True)
class KernelTriplet:
    """D1, D2 (with ``pi e^2``) and D12 (without) from one radial pass."""

    d1: KernelValue
    d2: KernelValue
    d12: KernelValue


def denom(p_abs, rho, t, z, params: ModelParams):
    return 0.5 * p_abs * p_abs - p_abs * rho * t + 0.5 * rho * rho + rho + params.gamma0 - z


def _phi_terms(x, a_plus, a_minus):
    """``(atanh(x)/x, (atanh(x)/x - 1)/x^2)`` with a series near ``x = 0``.

    ``a_plus = A + B`` and ``a_minus = A - B`` are passed separately so that
    ``atanh(x) = log(a_plus / a_minus) / 2`` stays accurate when ``x -> 1``.
    Both lie in the same closed half-plane, so the difference of principal
    logarithms never wraps.
    """
    x = np.asarray(x)
    small = np.abs(x) < _SERIES_CUTOFF
    x2 = x * x
    phi0 = np.empty_like(x)
    psi2 = np.empty_like(x)
    if np.any(small):
        xs2 = x2[small]
        s0 = np.zeros_like(xs2)
        s2 = np.zeros_like(xs2)
        for n in range(_SERIES_TERMS - 1, -1, -1):
            s0 = s0 * xs2 + 1.0 / (2 * n + 1)
            s2 = s2 * xs2 + 1.0 / (2 * n + 3)
        phi0[small] = s0
        psi2[small] = s2
    big = ~small
    if np.any(big):
        xb = x[big]
        f = 0.5 * (np.log(a_plus[big]) - np.log(a_minus[big])) / xb
        phi0[big] = f
        psi2[big] = (f - 1.0) / (xb * xb)
    return phi0, psi2


def _shifted_energy(p_abs, z, params, allow_edge=True):
    """``c0 = p^2/2 + gamma0 - z``, snapped to its exact band-edge value.

    Real ``z`` above the band edge raises; real ``z`` within a few ulps of it
    is treated as lying exactly on the edge.
    """
    z = complex(z)
    edge = z0(p_abs, params)
    if z.imag == 0.0:
        zr = z.real
        scale = max(1.0, abs(edge))
        if abs(zr - edge) <= _EDGE_ULPS * np.finfo(float).eps * scale:
            if not allow_edge:
                raise DomainError(f"z = {zr} lies on the essential spectrum [{edge}, inf)")
            return edge_shift(p_abs), True
        if zr > edge:
            raise DomainError(
                f"z = {zr} lies on the essential spectrum [{edge}, inf); "
                "boundary values are not supported")
        return 0.5 * p_abs * p_abs + params.gamma0 - zr, False
    return 0.5 * p_abs * p_abs + params.gamma0 - z, False


def edge_shift(p_abs):
    """Exact ``c0`` at ``z = z0(|p|)``: 0 inside the unit ball, ``(|p|-1)^2/2`` outside."""
    return 0.0 if p_abs <= 1.0 else 0.5 * (p_abs - 1.0) ** 2


def _breakpoints(p_abs, c0, R):
    pts = []
    if p_abs > 1.0:
        pts.append(p_abs - 1.0)
    c = complex(c0).real
    # real roots of Re(A -/+ B) = 0, where the logarithms come closest to their branch points
    for slope in (1.0 - p_abs, 1.0 + p_abs):
        disc = slope * slope - 2.0 * c
        if disc >= 0:
            sq = math.sqrt(disc)
            pts.extend([-slope - sq, -slope + sq])
    return [r for r in pts if 0.0 < r < R]


def radial_integrand(p_abs, c0):
    """Return ``h(rho)`` stacking ``rho * int w(t) dt / (A - B t)`` for w = 1, t^2, 1-t^2."""
    complex_case = isinstance(c0, complex) and c0.imag != 0.0
    c0 = c0 if complex_case else float(complex(c0).real)

    # A - B = [c0 - (|p|-1)^2/2] + (rho - (|p|-1))^2 / 2, free of cancellation at the edge
    vertex = p_abs - 1.0
    c_min = c0 - 0.5 * vertex * vertex

    def h(rho):
        A = c0 + rho * (1.0 + 0.5 * rho)
        B = p_abs * rho
        d = rho - vertex
        phi0, psi2 = _phi_terms(B / A, A + B, c_min + 0.5 * d * d)
        pref = 2.0 * rho / A
        return np.stack([pref * phi0, pref * psi2, pref * (phi0 - psi2)], axis=-1)

    return h


def kernel_triplet(p_abs, z, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD, *,
                   edge=False) -> KernelTriplet:
    """Evaluate D1, D2 and D12 at ``(|p|, z)`` in one adaptive pass.

    With ``edge=True`` the value of ``z`` is ignored and the kernels are
    evaluated exactly on the band edge ``z = z0(|p|)``.
    """
    p_abs = float(p_abs)
    if p_abs < 0:
        raise DomainError(f"|p| must be non-negative, got {p_abs}")
    if edge:
        c0 = edge_shift(p_abs)
    else:
        c0, _ = _shifted_energy(p_abs, z, params)
    h = radial_integrand(p_abs, c0)
    value, err, ok = integrate_radial(
        h, params.R, params.sigma, breakpoints=_breakpoints(p_abs, c0, params.R),
        abs_tol=quad.abs_tol, max_panels=quad.n_rho, max_depth=quad.max_refine)
    if not ok:
        warnings.warn(
            f"radial quadrature did not reach abs_tol={quad.abs_tol:g} at |p|={p_abs}, "
            f"z={z!r} (estimate {err:.3g})", AccuracyWarning, stacklevel=2)
    pref = math.pi * params.e**2
    v1, v2, v12 = (complex(v) for v in np.atleast_1d(value))
    return KernelTriplet(
        d1=KernelValue(pref * v1, pref * err, ok),
        d2=KernelValue(pref * v2, pref * err, ok),
        d12=KernelValue(v12, err, ok),
    )


def d1(p_abs, z, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD) -> KernelValue:
    """``pi e^2 int int rho^(1+2s) / denom dt drho``; ``z`` must avoid ``(z0, inf)``."""
    return kernel_triplet(p_abs, z, params, quad).d1


def d2(p_abs, z, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD) -> KernelValue:
    """Same as :func:`d1` with the extra weight ``t^2``."""
    return kernel_triplet(p_abs, z, params, quad).d2


def d12(p_abs, z, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD) -> KernelValue:
    """``int int (1-t^2) rho^(1+2s) / denom``, computed from its own integrand.

    Equals ``(D1 - D2) / (pi e^2)`` when ``e > 0`` but is never formed that
    way, so it stays well defined at ``e = 0``.
    """
    return kernel_triplet(p_abs, z, params, quad).d12


def d12_edge(p_abs, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD) -> KernelValue:
    """D12 on the band edge ``z = z0(|p|)``, where it is still finite."""
    return kernel_triplet(p_abs, None, params, quad, edge=True).d12


def c_from_kernels(p, d1_value, d2_value):
    """Closed-form C matrix from D1 and D2.

    ``C = (D1 - D2)/2 I + (3 D2 - D1)/2 phat phat^T``; at ``p = 0`` the limit
    ``(D1/3) I`` is returned.
    """
    p = as_vector(p)
    p2 = float(p @ p)
    if p2 == 0.0:
        return (d1_value / 3.0) * np.eye(3, dtype=complex)
    c = np.empty((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            if i == j:
                c[i, i] = (d1_value * (p2 - p[i] ** 2) + d2_value * (3 * p[i] ** 2 - p2)) / (2 * p2)
            else:
                c[i, j] = -p[i] * p[j] * (d1_value - 3 * d2_value) / (2 * p2)
    return c


def c_matrix(p, z, params: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """Matrix ``(e^2/2) int g^2 k_i k_j / (L |k|^2) dk`` via D1 and D2."""
    p = as_vector(p)
    kt = kernel_triplet(float(np.linalg.norm(p)), z, params, quad)
    return c_from_kernels(p, kt.d1.value, kt.d2.value)


def kernels_tensor_reference(p_abs, z, params: ModelParams, n_rho=200, n_t=64):
    """Raw tensor-product Gauss-Legendre evaluation of (D1, D2, D12).

    Used only as a cross-check of the semi-analytic path. The radial variable
    is substituted as ``rho = R s^2`` to soften the endpoint behaviour; no
    closed-form t-integration is used.
    """
    c0, _ = _shifted_energy(p_abs, z, params)
    s, ws = leggauss(n_rho)
    s = 0.5 * (s + 1.0)
    ws = 0.5 * ws
    t, wt = leggauss(n_t)
    R, sig = params.R, params.sigma
    rho = R * s * s
    jac = 2.0 * R * s * rho ** (1.0 + 2.0 * sig)
    den = c0 + rho[:, None] * (1.0 + 0.5 * rho[:, None]) - p_abs * rho[:, None] * t[None, :]
    base = (ws * jac)[:, None] * wt[None, :] / den
    i0 = np.sum(base)
    i2 = np.sum(base * t[None, :] ** 2)
    i12 = np.sum(base * (1.0 - t[None, :] ** 2))
    pref = math.pi * params.e**2
    return complex(pref * i0), complex(pref * i2), complex(i12)
