"""Physical parameters, coupling function, polarization frame and band edge.

Natural units ``m = c = 1``. Momenta are plain 3-vectors; :class:`Momentum`
and :class:`PhotonMode` are thin immutable wrappers for call sites that want
to carry ``|p|`` or the polarization index around.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from pfiber.errors import DomainError

_AXIS_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """One instance of the model.

    ``gamma0`` is the constant energy shift that enters the band edge and the
    scalar kernels. Use :meth:`with_default_gamma0` to pick the conventional
    value ``pi e^2 R^(2+2 sigma) / (1 + sigma)``.
    """

    e: float
    R: float
    sigma: float = 0.0
    gamma0: float = 0.0

    def __post_init__(self):
        for name in ("e", "R", "sigma", "gamma0"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.R <= 0:
            raise DomainError(f"R must be positive, got {self.R}")
        if not 0.0 <= self.sigma < 0.5:
            raise DomainError(f"sigma must lie in [0, 1/2), got {self.sigma}")
        if self.gamma0 < 0:
            raise DomainError(f"gamma0 must be non-negative, got {self.gamma0}")
        if self.e < 0:
            raise DomainError(f"e must be non-negative, got {self.e}")

    @classmethod
    def with_default_gamma0(cls, e, R, sigma=0.0):
        return cls(e=e, R=R, sigma=sigma, gamma0=default_gamma0(e, R, sigma))

    def replace(self, **changes):
        """Copy with some fields changed.

        Passing ``gamma0="default"`` recomputes the default shift for the
        updated ``(e, R, sigma)``.
        """
        values = {"e": self.e, "R": self.R, "sigma": self.sigma, "gamma0": self.gamma0}
        values.update(changes)
        if values["gamma0"] == "default":
            values["gamma0"] = default_gamma0(values["e"], values["R"], values["sigma"])
        return ModelParams(**values)

    def as_dict(self):
        return {"e": self.e, "R": self.R, "sigma": self.sigma, "gamma0": self.gamma0}


@dataclass(frozen=True)
class Momentum:
    """Total momentum of the fiber."""

    p: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        vec = np.asarray(self.p, dtype=float).reshape(3).copy()
        if not np.all(np.isfinite(vec)):
            raise DomainError(f"momentum components must be finite, got {vec}")
        vec.setflags(write=False)
        object.__setattr__(self, "p", vec)

    @classmethod
    def along(cls, p_abs, direction=(0.0, 0.0, 1.0)):
        d = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(d)
        if norm == 0:
            raise DomainError("direction must be non-zero")
        return cls(p_abs * d / norm)

    @property
    def abs(self):
        return float(np.linalg.norm(self.p))


@dataclass(frozen=True)
class PhotonMode:
    k: np.ndarray
    lam: int

    def __post_init__(self):
        if self.lam not in (1, 2):
            raise DomainError(f"polarization index must be 1 or 2, got {self.lam}")
        vec = np.asarray(self.k, dtype=float).reshape(3).copy()
        vec.setflags(write=False)
        object.__setattr__(self, "k", vec)

    @property
    def omega(self):
        return float(np.linalg.norm(self.k))


def as_vector(p):
    """Return the 3-vector behind a :class:`Momentum` or array-like."""
    if isinstance(p, Momentum):
        return p.p
    if isinstance(p, PhotonMode):
        return p.k
    return np.asarray(p, dtype=float).reshape(3)


def coupling_g(k, params: ModelParams):
    """Form factor ``g(k) = chi(|k| <= R) |k|^(sigma - 1/2)``.

    Accepts a single 3-vector or an array of shape ``(..., 3)``. ``k = 0`` is
    a singular point and raises :class:`DomainError`; the singularity is only
    ever met under an integral whose measure removes it.
    """
    k = np.asarray(k, dtype=float)
    r = np.linalg.norm(k, axis=-1)
    if np.any(r == 0):
        raise DomainError("g(k) is singular at k = 0")
    out = np.where(r <= params.R, r ** (params.sigma - 0.5), 0.0)
    return float(out) if out.ndim == 0 else out


def polarization(k, ref=(0.0, 0.0, 1.0)):
    """Transverse orthonormal frame ``(e(k,1), e(k,2))``.

    ``e1 = khat x ref / |khat x ref|`` and ``e2 = khat x e1`` with ``ref = z``
    by default; the x axis is used instead when ``k`` is (anti)parallel to
    ``ref``. Works on a single vector or on an array of shape ``(..., 3)``.
    Only the default reference defines the package gauge; other references
    give a gauge rotated node by node.
    """
    k = np.asarray(k, dtype=float)
    r = np.linalg.norm(k, axis=-1, keepdims=True)
    if np.any(r == 0):
        raise DomainError("polarization vectors are undefined at k = 0")
    khat = k / r
    ref = np.broadcast_to(np.asarray(ref, dtype=float), khat.shape)
    e1 = np.cross(khat, ref)
    n1 = np.linalg.norm(e1, axis=-1, keepdims=True)
    polar = n1[..., 0] < _AXIS_TOL
    if np.any(polar):
        alt = np.cross(khat, np.broadcast_to(np.array([1.0, 0.0, 0.0]), khat.shape))
        e1 = np.where(polar[..., None], alt, e1)
        n1 = np.linalg.norm(e1, axis=-1, keepdims=True)
    e1 = e1 / n1
    e2 = np.cross(khat, e1)
    return e1, e2


def coupling_vectors(k, params: ModelParams, ref=(0.0, 0.0, 1.0)):
    """``G(k, lambda) = e(k, lambda) g(k)`` stacked as shape ``(..., 2, 3)``."""
    e1, e2 = polarization(k, ref)
    g = np.asarray(coupling_g(k, params))
    return np.stack([e1, e2], axis=-2) * g[..., None, None]


def norm_g_sq(params: ModelParams):
    """``sum_lambda int |G(k, lambda)|^2 dk = 4 pi R^(2+2 sigma) / (1 + sigma)``."""
    s = params.sigma
    return 4.0 * math.pi * params.R ** (2 + 2 * s) / (1 + s)


def default_gamma0(e, R, sigma=0.0):
    if R <= 0 or not 0.0 <= sigma < 0.5:
        raise DomainError(f"need R > 0 and 0 <= sigma < 1/2, got R={R}, sigma={sigma}")
    return math.pi * e * e * R ** (2 + 2 * sigma) / (1 + sigma)


def diagonal_shift(params: ModelParams):
    """Vacuum expectation of the ``A^2`` term, ``(e^2 / 4) ||G||^2``."""
    return 0.25 * params.e**2 * norm_g_sq(params)


def z0(p_abs, params: ModelParams):
    """Bottom of the essential spectrum, ``min_k (p-k)^2/2 + |k| + gamma0``."""
    p_abs = float(p_abs)
    if p_abs < 0:
        raise DomainError(f"|p| must be non-negative, got {p_abs}")
    if p_abs <= 1.0:
        return 0.5 * p_abs * p_abs + params.gamma0
    return p_abs - 0.5 + params.gamma0


def tilde_t(p, params: ModelParams):
    p = as_vector(p)
    return 0.5 * float(p @ p) + diagonal_shift(params)


def tilde_l(p, k, params: ModelParams):
    """Free one-photon energy ``(p-k)^2/2 + |k| + shift``; ``k`` may be batched."""
    p = as_vector(p)
    k = np.asarray(k, dtype=float)
    d = p - k
    out = 0.5 * np.sum(d * d, axis=-1) + np.linalg.norm(k, axis=-1) + diagonal_shift(params)
    return float(out) if np.ndim(out) == 0 else out
