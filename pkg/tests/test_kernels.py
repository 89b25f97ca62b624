import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from pfiber import (
    DomainError,
    ModelParams,
    QuadratureSpec,
    c_from_kernels,
    c_matrix,
    c_matrix_bruteforce,
    d1,
    d12,
    d12_edge,
    d2,
    denom,
    kernel_triplet,
    z0,
)
from pfiber.kernels import kernels_tensor_reference

P1 = ModelParams.with_default_gamma0(1.0, 1.0, 0.0)


def test_denom_examples():
    g = P1.gamma0
    for t in (-1.0, 0.0, 0.3, 1.0):
        assert denom(0.0, 1.0, t, g, P1) == pytest.approx(1.5, rel=1e-15)
    for rho in (1e-3, 1e-5):
        val = denom(1.0, rho, 1.0, z0(1.0, P1), P1)
        assert 0 < val < 2 * rho * rho


@pytest.mark.parametrize("p_abs", [0.0, 0.4, 1.0, 1.6, 3.0])
def test_denom_positive_below_edge(p_abs):
    rho = np.linspace(0, P1.R, 801)[:, None]
    t = np.linspace(-1, 1, 801)[None, :]
    z = z0(p_abs, P1) - 1e-9
    vals = denom(p_abs, rho, t, z, P1)
    assert np.min(vals) > 0


@pytest.mark.parametrize("R", [1.0, 2.0, 5.0])
def test_closed_forms_at_origin(R):
    params = ModelParams.with_default_gamma0(1.0, R, 0.0)
    L = math.log(R / 2 + 1)
    v1 = d1(0.0, params.gamma0, params)
    v2 = d2(0.0, params.gamma0, params)
    v12 = d12(0.0, params.gamma0, params)
    assert abs(v1.value - 4 * math.pi * L) < 1e-9
    assert abs(v2.value - v1.value / 3) < 1e-9
    assert abs(v12.value - 8 / 3 * L) < 1e-9
    if R == 2.0:
        assert v12.value.real == pytest.approx(1.84839, abs=1e-5)


def test_raw_two_dimensional_rule_at_origin():
    params = ModelParams.with_default_gamma0(1.0, 2.0, 0.0)
    _, _, i12 = kernels_tensor_reference(0.0, params.gamma0, params, n_rho=400)
    assert i12.real == pytest.approx(8 / 3 * math.log(2), abs=1e-6)


def test_zero_coupling():
    params = ModelParams(0.0, 1.0, 0.0, 0.0)
    kt = kernel_triplet(0.5, -1.0, params)
    assert kt.d1.value == 0 and kt.d2.value == 0
    assert kt.d12.value.real > 0


@pytest.mark.parametrize("z", [1.0, 2.5 + 0.5j, 3.0 - 2j])
def test_d2_is_third_of_d1_at_zero_momentum(z):
    kt = kernel_triplet(0.0, z, P1)
    assert abs(kt.d2.value - kt.d1.value / 3) < 1e-12


points = st.tuples(st.floats(0.0, 3.0), st.floats(0.01, 3.0), st.floats(0.0, 0.45))


@given(points)
def test_real_kernels_ordered_and_consistent(pt):
    p_abs, dz, sigma = pt
    params = ModelParams.with_default_gamma0(0.7, 1.3, sigma)
    z = z0(p_abs, params) - dz
    kt = kernel_triplet(p_abs, z, params)
    for kv in (kt.d1, kt.d2, kt.d12):
        assert abs(kv.value.imag) <= max(kv.est_error, 1e-15)
        assert kv.value.real > 0 and kv.est_error >= 0
    assert kt.d2.value.real <= kt.d1.value.real
    pe2 = math.pi * params.e**2
    assert abs(kt.d12.value - (kt.d1.value - kt.d2.value) / pe2) < 1e-9


@given(st.floats(0.0, 3.0), st.floats(0.01, 2.0), st.floats(0.01, 2.0))
def test_kernels_increase_in_z(p_abs, a, b):
    if abs(a - b) < 1e-6:
        return
    edge = z0(p_abs, P1)
    z_lo, z_hi = edge - max(a, b), edge - min(a, b)
    lo, hi = kernel_triplet(p_abs, z_lo, P1), kernel_triplet(p_abs, z_hi, P1)
    assert hi.d1.value.real > lo.d1.value.real
    assert hi.d2.value.real > lo.d2.value.real
    assert hi.d12.value.real > lo.d12.value.real


@given(st.floats(0.0, 3.0), st.floats(-3, 3), st.floats(0.05, 3))
def test_schwarz_reflection(p_abs, x, y):
    z = complex(P1.gamma0 + x, y)
    a, b = kernel_triplet(p_abs, z, P1), kernel_triplet(p_abs, z.conjugate(), P1)
    for u, v in ((a.d1, b.d1), (a.d2, b.d2), (a.d12, b.d12)):
        assert abs(u.value - v.value.conjugate()) <= 1e-12 * max(1.0, abs(u.value))


@pytest.mark.parametrize("p_abs,z", [(0.5, 2.0), (1.2, 3.0 + 0.2j), (2.5, -1.0), (0.9, 4.0 - 1j)])
def test_semi_analytic_against_tensor_rule(p_abs, z):
    kt = kernel_triplet(p_abs, z, P1)
    ref = kernels_tensor_reference(p_abs, z, P1, n_rho=300, n_t=96)
    for got, want in zip((kt.d1.value, kt.d2.value, kt.d12.value), ref):
        assert abs(got - want) < 1e-8


def test_above_edge_is_domain_error():
    with pytest.raises(DomainError):
        d1(0.5, z0(0.5, P1) + 1e-6, P1)
    with pytest.raises(DomainError):
        d1(-0.5, 1.0, P1)


def test_edge_value_is_snapped_and_finite():
    for p_abs in (0.0, 0.5, 1.0, 1.5, 3.0):
        edge = kernel_triplet(p_abs, None, P1, edge=True).d12.value.real
        via_z = d12(p_abs, z0(p_abs, P1), P1).value.real
        assert math.isfinite(edge) and edge == via_z


@pytest.mark.parametrize("p_abs", [0.3, 1.0, 2.0])
def test_edge_converges_under_refinement(p_abs):
    vals = [d12_edge(p_abs, P1, QuadratureSpec(abs_tol=tol)).value.real
            for tol in (1e-6, 1e-9, 1e-12)]
    assert abs(vals[1] - vals[2]) < 1e-8
    assert abs(vals[0] - vals[2]) < 1e-5
    approach = d12(p_abs, z0(p_abs, P1) - 1e-10, P1).value.real
    assert abs(approach - vals[2]) < 1e-4


class TestCMatrix:
    def test_axis_aligned_is_diagonal(self):
        p = (0.0, 0.0, 0.7)
        C = c_matrix(p, 2.0, P1)
        kt = kernel_triplet(0.7, 2.0, P1)
        assert np.all(C[~np.eye(3, dtype=bool)] == 0)
        assert C[0, 0] == pytest.approx((kt.d1.value - kt.d2.value) / 2, rel=1e-14)
        assert C[2, 2] == pytest.approx(kt.d2.value, rel=1e-14)

    @given(st.tuples(*[st.floats(-2, 2)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-3),
           st.complex_numbers(max_magnitude=5).filter(lambda z: abs(z.imag) > 1e-3))
    def test_trace_and_symmetry(self, p, z):
        d1v, d2v = 1.3 + 0.2j, 0.4 - 0.1j
        C = c_from_kernels(p, d1v, d2v)
        assert np.array_equal(C, C.T)
        assert abs(np.trace(C) - d1v) < 1e-13

    def test_zero_momentum_limit(self):
        C = c_matrix((0, 0, 0), 1.0, P1)
        kt = kernel_triplet(0.0, 1.0, P1)
        assert np.allclose(C, kt.d1.value / 3 * np.eye(3), rtol=1e-15, atol=0)

    def test_rotation_covariance(self):
        rot = Rotation.from_rotvec([0.3, -1.1, 0.5]).as_matrix()
        p = np.array([0.2, 0.5, -0.9])
        z = 3.0 + 0.4j
        assert np.allclose(rot @ c_matrix(p, z, P1) @ rot.T, c_matrix(rot @ p, z, P1),
                           rtol=0, atol=1e-13)

    @pytest.mark.parametrize("p,z", [((0.3, -0.2, 0.6), 2.5), ((1.1, 0.4, 0.2), 3.5 + 0.7j),
                                     ((0.0, 0.0, 0.0), 1.0 - 2j)])
    def test_matches_bruteforce(self, p, z):
        C = c_matrix(p, z, P1)
        B = c_matrix_bruteforce(p, z, P1)
        assert np.max(np.abs(C - B)) < 1e-6
