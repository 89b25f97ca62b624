"""Product quadrature grid on the ball |k| <= R and discretized states on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from pfiber.errors import ContractError, DomainError


def axis_frame(axis):
    """Right-handed orthonormal frame ``(u, v, a)`` with ``a`` along ``axis``."""
    a = np.asarray(axis, dtype=float).reshape(3)
    n = np.linalg.norm(a)
    if n == 0:
        raise DomainError("grid axis must be non-zero")
    a = a / n
    helper = np.array([1.0, 0.0, 0.0]) if abs(a[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    if np.allclose(a, [0.0, 0.0, 1.0]):
        return np.eye(3)[0], np.eye(3)[1], np.array([0.0, 0.0, 1.0])
    u = np.cross(helper, a)
    u /= np.linalg.norm(u)
    v = np.cross(a, u)
    return u, v, a


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Gauss-Legendre in ``rho`` and ``t = cos(theta)``, uniform in ``phi``.

    Angles are measured from ``axis``. Nodes are ordered with ``phi``
    fastest, then ``t``, then ``rho``, so ``nodes.reshape(n_rho, n_t, n_phi, 3)``
    recovers the tensor structure.
    """

    nodes: np.ndarray
    weights: np.ndarray
    counts: tuple
    axis: np.ndarray
    R: float

    @property
    def size(self):
        return len(self.weights)

    def same_as(self, other):
        return other is self or (
            self.counts == other.counts
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights))

    def integrate(self, values):
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


def build_grid(n_rho, n_t, n_phi, params, axis=(0.0, 0.0, 1.0)):
    """Tensor-product grid over ``|k| <= params.R``; weights include ``rho^2``.

    No node sits at ``k = 0`` or on the axis, so ``g`` and the polarization
    frame are defined everywhere on the grid.
    """
    if min(n_rho, n_t, n_phi) < 2:
        raise DomainError("grid counts must be at least 2")
    R = params.R
    x, wx = leggauss(n_rho)
    rho = 0.5 * R * (x + 1.0)
    w_rho = 0.5 * R * wx * rho**2
    t, w_t = leggauss(n_t)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    w_phi = 2.0 * math.pi / n_phi
    u, v, a = axis_frame(axis)
    r3, t3, p3 = np.meshgrid(rho, t, phi, indexing="ij")
    s3 = np.sqrt(1.0 - t3 * t3)
    dirs = (s3 * np.cos(p3))[..., None] * u + (s3 * np.sin(p3))[..., None] * v + t3[..., None] * a
    nodes = (r3[..., None] * dirs).reshape(-1, 3)
    weights = (w_rho[:, None, None] * w_t[None, :, None] * w_phi
               * np.ones((1, 1, n_phi))).reshape(-1)
    return QuadratureGrid(nodes, weights, (n_rho, n_t, n_phi), a, float(R))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Element of ``C + L^2 + L^2`` sampled on a grid.

    ``f1`` has shape ``(2, M)``: row ``lam - 1`` holds the function values
    of polarization ``lam`` at the grid nodes (not weighted).
    """

    f0: complex
    f1: np.ndarray
    grid: QuadratureGrid

    def __post_init__(self):
        f1 = np.asarray(self.f1, dtype=complex)
        if f1.shape != (2, self.grid.size):
            raise ContractError(f"f1 must have shape (2, {self.grid.size}), got {f1.shape}")
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "f0", complex(self.f0))

    @classmethod
    def zeros(cls, grid):
        return cls(0.0, np.zeros((2, grid.size), dtype=complex), grid)

    @classmethod
    def random(cls, grid, rng, complex_values=True):
        f0 = rng.normal() + (1j * rng.normal() if complex_values else 0.0)
        f1 = rng.normal(size=(2, grid.size))
        if complex_values:
            f1 = f1 + 1j * rng.normal(size=(2, grid.size))
        return cls(f0, f1, grid)

    def check_grid(self, grid):
        if not self.grid.same_as(grid):
            raise ContractError("state vectors live on different grids")

    def norm(self):
        return math.sqrt(abs(self.f0) ** 2 + float(np.sum(self.grid.weights * np.abs(self.f1) ** 2)))

    def inner(self, other):
        """``<self, other>``, antilinear in ``self``."""
        self.check_grid(other.grid)
        return (np.conj(self.f0) * other.f0
                + np.sum(self.grid.weights * np.conj(self.f1) * other.f1))

    def scale(self, c):
        return StateVector(c * self.f0, c * self.f1, self.grid)

    def __add__(self, other):
        self.check_grid(other.grid)
        return StateVector(self.f0 + other.f0, self.f1 + other.f1, self.grid)

    def __sub__(self, other):
        self.check_grid(other.grid)
        return StateVector(self.f0 - other.f0, self.f1 - other.f1, self.grid)

    def __rmul__(self, c):
        return self.scale(c)

    def conj(self):
        return StateVector(np.conj(self.f0), np.conj(self.f1), self.grid)

    def to_amplitudes(self):
        """Euclidean coordinates ``[f0, sqrt(w_m) f1(k_m, lam) ...]`` interleaved in lam."""
        sw = np.sqrt(self.grid.weights)
        return np.concatenate([[self.f0], (self.f1 * sw).T.reshape(-1)])

    @classmethod
    def from_amplitudes(cls, x, grid):
        x = np.asarray(x, dtype=complex)
        sw = np.sqrt(grid.weights)
        f1 = x[1:].reshape(grid.size, 2).T / sw
        return cls(x[0], f1, grid)
