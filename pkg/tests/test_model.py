import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfiber import (
    DomainError,
    ModelParams,
    Momentum,
    PhotonMode,
    build_grid,
    coupling_g,
    coupling_vectors,
    default_gamma0,
    diagonal_shift,
    norm_g_sq,
    polarization,
    tilde_l,
    tilde_t,
    z0,
)

finite = st.floats(-5, 5, allow_nan=False)
vectors = st.tuples(finite, finite, finite).filter(lambda v: np.linalg.norm(v) > 1e-6)
sigmas = st.floats(0.0, 0.49)


class TestParams:
    @pytest.mark.parametrize("kw", [
        dict(e=1, R=0), dict(e=1, R=-1), dict(e=1, R=1, sigma=0.5), dict(e=1, R=1, sigma=-0.1),
        dict(e=1, R=1, gamma0=-1), dict(e=-1, R=1), dict(e=math.nan, R=1)])
    def test_rejects_invalid(self, kw):
        with pytest.raises(DomainError):
            ModelParams(**kw)

    def test_replace_default(self):
        p = ModelParams(1.0, 1.0, 0.0, 0.0).replace(R=2.0, gamma0="default")
        assert p.gamma0 == default_gamma0(1.0, 2.0, 0.0)
        assert p.as_dict() == {"e": 1.0, "R": 2.0, "sigma": 0.0, "gamma0": p.gamma0}

    def test_momentum_and_mode(self):
        m = Momentum.along(2.0, (0, 3, 4))
        assert np.allclose(m.p, [0, 1.2, 1.6]) and m.abs == pytest.approx(2.0)
        with pytest.raises(DomainError):
            Momentum((np.inf, 0, 0))
        with pytest.raises(DomainError):
            PhotonMode((1, 0, 0), 3)
        assert PhotonMode((3, 4, 0), 1).omega == 5.0


class TestCoupling:
    def test_examples(self):
        p = ModelParams(1.0, 2.0, 0.0)
        assert coupling_g((0, 0, 2.0), p) == pytest.approx(2.0 ** -0.5, rel=1e-15)
        assert coupling_g((0, 0, 3.0), p) == 0.0
        for s in (0.0, 0.2, 0.45):
            assert coupling_g((1.0, 0, 0), p.replace(sigma=s)) == 1.0

    def test_origin_is_domain_error(self):
        with pytest.raises(DomainError):
            coupling_g((0, 0, 0), ModelParams(1.0, 1.0))
        with pytest.raises(DomainError):
            polarization((0.0, 0.0, 0.0))

    def test_pole_axis_frame(self):
        e1, e2 = polarization((0.0, 0.0, 1.0))
        assert abs(e1[2]) < 1e-15 and abs(e2[2]) < 1e-15
        assert abs(e1 @ e2) < 1e-15


@given(vectors)
def test_polarization_orthonormal_and_complete(k):
    k = np.asarray(k)
    e1, e2 = polarization(k)
    kh = k / np.linalg.norm(k)
    for a, b, want in [(e1, e1, 1), (e2, e2, 1), (e1, e2, 0), (kh, e1, 0), (kh, e2, 0)]:
        assert abs(a @ b - want) < 1e-14
    completeness = np.outer(e1, e1) + np.outer(e2, e2) + np.outer(kh, kh)
    assert np.max(np.abs(completeness - np.eye(3))) < 1e-14


def test_polarization_is_batched_and_deterministic(rng):
    k = rng.normal(size=(50, 3))
    e1, e2 = polarization(k)
    for i in (0, 17, 49):
        a, b = polarization(k[i])
        assert np.array_equal(a, e1[i]) and np.array_equal(b, e2[i])


@pytest.mark.parametrize("R,sigma", [(1.0, 0.0), (2.0, 0.0), (1.5, 0.25)])
def test_norm_g_sq_against_grid(R, sigma):
    params = ModelParams(1.0, R, sigma)
    grid = build_grid(48, 4, 4, params)
    G = coupling_vectors(grid.nodes, params)
    brute = grid.integrate(np.sum(G * G, axis=(-2, -1)))
    assert brute == pytest.approx(norm_g_sq(params), rel=1e-6)
    if (R, sigma) == (1.0, 0.0):
        assert norm_g_sq(params) == pytest.approx(4 * math.pi, rel=1e-15)


def test_norm_g_sq_small_r_limit():
    assert norm_g_sq(ModelParams(1.0, 1e-9)) < 1e-16


@given(st.floats(0, 3), st.floats(0.01, 4), sigmas)
def test_default_gamma0_identity(e, R, sigma):
    g = default_gamma0(e, R, sigma)
    assert g == pytest.approx(0.25 * e * e * norm_g_sq(ModelParams(e, R, sigma)), rel=1e-14, abs=0)
    assert diagonal_shift(ModelParams.with_default_gamma0(e, R, sigma)) == pytest.approx(g, rel=1e-14)


def test_default_gamma0_examples():
    assert default_gamma0(1, 1, 0) == pytest.approx(math.pi, rel=1e-15)
    assert default_gamma0(0, 3, 0.2) == 0.0


class TestBandEdge:
    def test_examples(self, unit_params):
        g = unit_params.gamma0
        assert z0(0.5, unit_params) == 0.125 + g
        assert z0(1.0, unit_params) == 0.5 + g
        assert 1.0 - 0.5 + g == 0.5 + g
        assert z0(2.0, unit_params) == 1.5 + g
        with pytest.raises(DomainError):
            z0(-0.1, unit_params)

    @given(st.floats(0, 6), st.floats(0, 6))
    def test_monotone_and_above_gamma0(self, a, b):
        params = ModelParams(1.0, 1.0, 0.0, 0.7)
        lo, hi = sorted((a, b))
        assert z0(lo, params) <= z0(hi, params)
        assert z0(lo, params) - params.gamma0 >= 0

    @pytest.mark.parametrize("p_abs", [0.0, 0.3, 1.0, 1.7, 4.0])
    def test_is_minimum_of_one_photon_energy(self, p_abs):
        # minimise (p-k)^2/2 + |k| over a fine grid of k (the minimiser is along p)
        params = ModelParams(0.0, 10.0, 0.0, 0.0)
        s = np.linspace(-1, 6, 70001)
        k = np.stack([np.zeros_like(s), np.zeros_like(s), s], axis=-1)
        vals = 0.5 * (p_abs - s) ** 2 + np.abs(s)
        assert np.min(vals) == pytest.approx(z0(p_abs, params), abs=1e-8)
        assert np.min(tilde_l((0, 0, p_abs), k[np.abs(s) > 0], params)) >= z0(p_abs, params) - 1e-12


def test_diagonal_symbols(unit_params):
    assert tilde_t((0, 0, 0), unit_params) == pytest.approx(unit_params.gamma0, rel=1e-15)
    p = (0.3, -0.4, 1.2)
    assert tilde_l(p, (0.0, 0.0, 0.0), unit_params) == tilde_t(p, unit_params)
    free = ModelParams(0.0, 1.0)
    assert tilde_l((1, 0, 0), (0, 1, 0), free) == 2.0
    ks = np.array([[0, 1, 0], [0.5, 0, 0]])
    assert np.allclose(tilde_l((1, 0, 0), ks, free), [2.0, 0.625])
