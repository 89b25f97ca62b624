"""Brute-force discretisation of H(p) on a quadrature grid.

This module never touches the scalar kernels or the reduced 3x3 system: it
assembles the operator from its matrix form on a grid and diagonalises it,
so it can serve as independent ground truth for :mod:`pfiber.spectrum` and
:mod:`pfiber.resolvent`.

Amplitudes carry ``sqrt(w_m)`` so the discrete inner product is Euclidean
and the matrix is exactly symmetric. Photon amplitudes are interleaved in
polarization: index ``1 + 2 m + (lam - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh

from pfiber.errors import ContractError, DomainError
from pfiber.grid import QuadratureGrid, StateVector, axis_frame, build_grid
from pfiber.model import (
    ModelParams,
    Momentum,
    as_vector,
    coupling_vectors,
    tilde_l,
    tilde_t,
)

DENSE_LIMIT = 6000

__all__ = [
    "DiscretizedHamiltonian",
    "QuadratureGrid",
    "StateVector",
    "apply_h_minus_z",
    "build_discrete_h",
    "build_grid",
    "c_matrix_bruteforce",
    "eigenvalues",
    "ground_eigenvalue",
    "residual",
]


@dataclass(frozen=True, eq=False)
class DiscretizedHamiltonian:
    """``H(p)`` on a grid, stored as its diagonal plus low-rank factors.

    The photon block is ``diag(L~) + (e^2/2) V V^T`` with
    ``V[(m, lam), :] = G(k_m, lam) sqrt(w_m)``; the vacuum row is
    ``-(e/sqrt 2) V p``. :attr:`matrix` assembles the dense array on demand.
    """

    p: Momentum
    params: ModelParams
    grid: QuadratureGrid
    t_diag: float
    l_diag: np.ndarray
    V: np.ndarray
    coupling: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return 1 + 2 * self.grid.size

    @cached_property
    def matrix(self):
        n = self.dim
        H = np.empty((n, n))
        H[0, 0] = self.t_diag
        H[0, 1:] = self.coupling
        H[1:, 0] = self.coupling
        H[1:, 1:] = 0.5 * self.params.e**2 * (self.V @ self.V.T)
        idx = np.arange(1, n)
        H[idx, idx] += np.repeat(self.l_diag, 2)
        return H

    @cached_property
    def w_block(self):
        """Dense ``W = H - H0`` (off-diagonal coupling plus the G-G term)."""
        W = self.matrix.copy()
        W[0, 0] -= self.t_diag
        idx = np.arange(1, self.dim)
        W[idx, idx] -= np.repeat(self.l_diag, 2)
        return W

    def matvec(self, x):
        x = np.asarray(x)
        xp = x[1:]
        out = np.empty_like(x, dtype=np.result_type(x, float))
        out[0] = self.t_diag * x[0] + self.coupling @ xp
        out[1:] = (np.repeat(self.l_diag, 2) * xp + self.coupling * x[0]
                   + 0.5 * self.params.e**2 * (self.V @ (self.V.T @ xp)))
        return out


def build_discrete_h(p, grid: QuadratureGrid, params: ModelParams) -> DiscretizedHamiltonian:
    """Assemble ``H(p)`` on ``grid`` in the package polarization gauge."""
    pm = p if isinstance(p, Momentum) else Momentum(as_vector(p))
    return _assemble(pm, grid, params, ref=(0.0, 0.0, 1.0))


def _assemble(pm, grid, params, ref):
    pv = pm.p
    G = coupling_vectors(grid.nodes, params, ref)              # (M, 2, 3)
    sw = np.sqrt(grid.weights)
    V = (G * sw[:, None, None]).reshape(-1, 3)                  # (2M, 3)
    coupling = -(params.e / math.sqrt(2.0)) * (V @ pv)
    return DiscretizedHamiltonian(
        p=pm, params=params, grid=grid, t_diag=tilde_t(pv, params),
        l_diag=np.asarray(tilde_l(pv, grid.nodes, params)), V=V, coupling=coupling)


def _symmetric_about_axis(hd):
    pv = hd.p.p
    a = hd.grid.axis
    return float(np.linalg.norm(np.cross(pv, a))) <= 1e-13 * max(1.0, float(np.linalg.norm(pv)))


def sector_blocks(hd: DiscretizedHamiltonian):
    """Split ``H`` into azimuthal Fourier sectors.

    Requires ``p`` parallel to the grid axis. The factors are rebuilt in the
    gauge whose reference direction is the grid axis: this changes the
    matrix only by a node-wise 2x2 rotation of the polarization pair (a
    unitary similarity), and makes rotation about the axis by ``2 pi / n_phi``
    a plain cyclic shift of the azimuthal index. In the discrete Fourier
    basis of that shift the operator is block diagonal; each block is
    returned as ``(diag, factors, vacuum_coupling)`` with the vacuum present
    only in sector 0.
    """
    if not _symmetric_about_axis(hd):
        raise ContractError("sector reduction needs p parallel to the grid axis")
    grid, params = hd.grid, hd.params
    n_rho, n_t, n_phi = grid.counts
    cov = _assemble(hd.p, grid, params, ref=grid.axis)
    u, v, a = axis_frame(grid.axis)
    Vu, Vv, Va = cov.V @ u, cov.V @ v, cov.V @ a
    sph = np.stack([(Vu - 1j * Vv) / math.sqrt(2.0), (Vu + 1j * Vv) / math.sqrt(2.0),
                    Va.astype(complex)], axis=-1)              # (2M, 3)
    nrt = n_rho * n_t
    sph = sph.reshape(nrt, n_phi, 2, 3)
    sph_k = np.fft.fft(sph, axis=1) / math.sqrt(n_phi)
    vac = cov.coupling.reshape(nrt, n_phi, 2)
    vac_k = np.fft.fft(vac, axis=1) / math.sqrt(n_phi)
    l_rt = cov.l_diag.reshape(nrt, n_phi)
    if not np.allclose(l_rt, l_rt[:, :1], rtol=1e-13, atol=0.0):
        raise ContractError("diagonal not invariant under rotation about the axis")
    scale = max(1.0, float(np.max(np.abs(vac)))) if vac.size else 1.0
    leak = np.max(np.abs(vac_k[:, 1:, :])) if n_phi > 1 else 0.0
    if leak > 1e-12 * scale:
        raise ContractError("vacuum coupling is not rotation invariant")
    diag = np.repeat(l_rt[:, 0], 2)
    blocks = []
    for s in range(n_phi):
        factors = sph_k[:, s, :, :].reshape(2 * nrt, 3)
        vac_s = vac_k[:, 0, :].reshape(-1) if s == 0 else None
        blocks.append((diag, factors, vac_s))
    return blocks


def _block_matrix(hd, diag, factors, vac):
    e2 = 0.5 * hd.params.e**2
    body = e2 * (factors @ factors.conj().T)
    body[np.diag_indices_from(body)] += diag
    if vac is None:
        return body
    n = body.shape[0] + 1
    H = np.empty((n, n), dtype=complex)
    H[0, 0] = hd.t_diag
    H[0, 1:] = vac.conj()
    H[1:, 0] = vac
    H[1:, 1:] = body
    return H


def ground_eigenvalue(hd: DiscretizedHamiltonian, method="auto"):
    """Smallest eigenvalue of the discretized operator.

    ``method="dense"`` diagonalises the full matrix; ``"sectors"`` uses the
    azimuthal block decomposition (each block still solved densely);
    ``"auto"`` picks dense up to :data:`DENSE_LIMIT` and sectors beyond.
    """
    if method == "auto":
        method = "dense" if hd.dim <= DENSE_LIMIT else "sectors"
    if method == "dense":
        return float(eigh(hd.matrix, eigvals_only=True, subset_by_index=[0, 0])[0])
    if method != "sectors":
        raise DomainError(f"unknown method {method!r}")
    blocks = sector_blocks(hd)
    diag_min = float(np.min(blocks[0][0]))
    best = float(eigh(_block_matrix(hd, *blocks[0]), eigvals_only=True,
                      subset_by_index=[0, 0])[0])
    if best <= diag_min:
        # other sectors are diag + (positive semidefinite), bounded below by diag_min
        return best
    for blk in blocks[1:]:
        best = min(best, float(eigh(_block_matrix(hd, *blk), eigvals_only=True,
                                    subset_by_index=[0, 0])[0]))
    return best


def eigenvalues(hd: DiscretizedHamiltonian, method="auto"):
    """All eigenvalues, ascending."""
    if method == "auto":
        method = "dense" if hd.dim <= DENSE_LIMIT else "sectors"
    if method == "dense":
        return eigh(hd.matrix, eigvals_only=True)
    vals = [eigh(_block_matrix(hd, *blk), eigvals_only=True) for blk in sector_blocks(hd)]
    return np.sort(np.concatenate(vals))


def ground_state(hd: DiscretizedHamiltonian):
    """Lowest eigenpair of the dense matrix as ``(value, StateVector)``."""
    w, v = eigh(hd.matrix, subset_by_index=[0, 0])
    return float(w[0]), StateVector.from_amplitudes(v[:, 0], hd.grid)


def apply_h_minus_z(hd: DiscretizedHamiltonian, z, f: StateVector, dense=False) -> StateVector:
    """``(H - z) f`` on the grid."""
    f.check_grid(hd.grid)
    x = f.to_amplitudes()
    y = hd.matrix @ x if dense else hd.matvec(x)
    return StateVector.from_amplitudes(y - z * x, hd.grid)


def residual(hd: DiscretizedHamiltonian, z, f: StateVector, u: StateVector, dense=False):
    """``||(H - z) f - u|| / ||u||``; zero when both ``f`` and ``u`` vanish."""
    u.check_grid(hd.grid)
    r = apply_h_minus_z(hd, z, f, dense) - u
    nu = u.norm()
    nr = r.norm()
    if nu == 0.0:
        return 0.0 if nr == 0.0 else math.inf
    return nr / nu


def c_matrix_bruteforce(p, z, params: ModelParams, n_s=96, n_t=96, n_phi=64):
    """``(e^2/2) int g^2 k_i k_j / (L |k|^2) dk`` by a plain 3-D product rule.

    The grid is oriented along z, not along ``p``, and the radial variable
    is ``rho = R s^2``; nothing about the structure of the integrand is used.
    """
    pv = as_vector(p)
    R, sig = params.R, params.sigma
    s, ws = leggauss(n_s)
    s = 0.5 * (s + 1.0)
    ws = 0.5 * ws
    rho = R * s * s
    w_rho = ws * 2.0 * R * s * rho**2
    t, wt = leggauss(n_t)
    phi = 2.0 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
    r3, t3, p3 = np.meshgrid(rho, t, phi, indexing="ij")
    st = np.sqrt(1.0 - t3 * t3)
    k = np.stack([r3 * st * np.cos(p3), r3 * st * np.sin(p3), r3 * t3], axis=-1)
    w = (w_rho[:, None, None] * wt[None, :, None] * (2.0 * math.pi / n_phi))
    L = 0.5 * np.sum((pv - k) ** 2, axis=-1) + r3 + params.gamma0 - z
    g2 = r3 ** (2.0 * sig - 1.0)
    khat = k / r3[..., None]
    f = (w * g2 / L)[..., None, None] * khat[..., :, None] * khat[..., None, :]
    return 0.5 * params.e**2 * f.sum(axis=(0, 1, 2))


def write_matrix_triplets(hd: DiscretizedHamiltonian, path, tol=0.0):
    """Dump the dense matrix as ``row,col,value`` lines (upper triangle)."""
    H = hd.matrix
    rows, cols = np.triu_indices(hd.dim)
    vals = H[rows, cols]
    keep = np.abs(vals) > tol
    with open(path, "w", newline="\n") as fh:
        fh.write("row,col,value\n")
        for r, c, v in zip(rows[keep], cols[keep], vals[keep]):
            fh.write(f"{r},{c},{v:.17g}\n")
