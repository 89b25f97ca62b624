"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v -s`` to see the lines inline; they
are also collected into the terminal summary by ``conftest.py``. Reference
values come from closed forms or from the brute-force oracle, never from the
code under test.
"""

import math

import numpy as np
import pytest

from pfiber import (
    ModelParams,
    StateVector,
    apply_resolvent,
    build_discrete_h,
    build_grid,
    c_matrix,
    c_matrix_bruteforce,
    d1,
    d12_edge,
    d2,
    effective_mass,
    effective_mass_fd_extrapolated,
    effective_mass_sigma_limit,
    ground_eigenvalue,
    lemma_dd1_bound,
    no_root_threshold,
    residual,
    secular_f,
    solve_ground,
    theorem1_bound,
    z0,
)

RESULTS = []


def report(number, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def test_criterion_01_zero_momentum_eigenvalue():
    worst = 0.0
    for e in (0.1, 1.0):
        for R in (1.0, 2.0):
            for sigma in (0.0, 0.25):
                params = ModelParams.with_default_gamma0(e, R, sigma)
                worst = max(worst, abs(solve_ground(0.0, params) - params.gamma0))
    assert report(1, worst <= 1e-10, f"max |z*(0) - gamma0| = {worst:.2e} (tol 1e-10)")


def test_criterion_02_sigma_limit_of_inverse_mass():
    worst = 0.0
    for e in (0.1, 0.5):
        for R in (1.0, 2.0):
            c = 8 / 3 * math.pi * e * e * math.log(R / 2 + 1)
            target = (1 - c) / (1 + c)
            lim = effective_mass_sigma_limit(e, R, (1e-2, 1e-3, 1e-4))
            worst = max(worst, abs(lim.inv_mass - target))
    assert report(2, worst <= 1e-6, f"max extrapolation error = {worst:.2e} (tol 1e-6)")


def test_criterion_03_kernel_closed_forms():
    worst = 0.0
    for e in (1.0, 0.5):
        for R in (1.0, 2.0, 5.0):
            params = ModelParams.with_default_gamma0(e, R, 0.0)
            want = 4 * math.pi * e * e * math.log(R / 2 + 1)
            v1 = d1(0.0, params.gamma0, params).value
            v2 = d2(0.0, params.gamma0, params).value
            worst = max(worst, abs(v1 - want), abs(v2 - want / 3))
    assert report(3, worst <= 1e-9, f"max |D - closed form| = {worst:.2e} (tol 1e-9)")


def test_criterion_04_c_matrix_against_bruteforce():
    rng = np.random.default_rng(4)
    worst = 0.0
    for i in range(20):
        params = ModelParams.with_default_gamma0(rng.uniform(0.3, 1.5), rng.uniform(0.5, 2.0),
                                                 rng.choice([0.0, 0.2]))
        p = rng.normal(size=3)
        p *= rng.uniform(0.05, 2.5) / np.linalg.norm(p)
        edge = z0(np.linalg.norm(p), params)
        if i < 10:
            z = edge - rng.uniform(0.05, 2.0)
        else:
            z = complex(edge + rng.uniform(-2, 2), rng.choice([-1, 1]) * rng.uniform(0.3, 2.0))
        err = np.max(np.abs(c_matrix(p, z, params) - c_matrix_bruteforce(p, z, params)))
        worst = max(worst, err)
    assert report(4, worst <= 1e-6, f"max entrywise |C - C_brute| over 20 points = {worst:.2e} (tol 1e-6)")


def test_criterion_05_oracle_ground_eigenvalue():
    params = ModelParams.with_default_gamma0(1.0, 1.0, 0.0)
    p = np.array([0.0, 0.0, 0.5])
    zs = solve_ground(p, params)
    gaps = []
    for n_rho in (16, 32, 64):
        hd = build_discrete_h(p, build_grid(n_rho, 16, 8, params, axis=p), params)
        gaps.append(abs(ground_eigenvalue(hd) - zs))
    # gaps reach round-off already at n_rho = 16; allow that much jitter
    floor = 1e-12
    monotone = all(b <= a + floor for a, b in zip(gaps, gaps[1:]))
    ok = monotone and gaps[-1] <= 1e-3
    gap_text = ", ".join(f"{g:.2e}" for g in gaps)
    assert report(5, ok, f"gaps [{gap_text}] monotone={monotone} (final tol 1e-3, noise floor {floor:g})")


def test_criterion_06_resolvent_residual():
    params = ModelParams.with_default_gamma0(1.0, 1.0, 0.0)
    rng = np.random.default_rng(6)
    p = np.array([0.3, -0.2, 0.4])
    p_abs = float(np.linalg.norm(p))
    grid = build_grid(12, 8, 8, params, axis=p)
    hd = build_discrete_h(p, grid, params)
    zs = solve_ground(p_abs, params)
    worst = 0.0
    for z in (z0(p_abs, params) + 1 + 1j, zs - 0.5):
        for _ in range(10):
            u = StateVector.random(grid, rng)
            worst = max(worst, residual(hd, z, apply_resolvent(p, z, u, params), u))
    assert report(6, worst <= 1e-8, f"max relative residual over 20 solves = {worst:.2e} (tol 1e-8)")


def test_criterion_07_first_resolvent_identity():
    params = ModelParams.with_default_gamma0(1.0, 1.0, 0.0)
    rng = np.random.default_rng(7)
    p = np.array([0.1, 0.5, 0.2])
    grid = build_grid(10, 8, 8, params, axis=p)
    z1, z2 = 3.0 + 0.8j, 4.5 - 1.5j
    worst = 0.0
    for _ in range(5):
        u = StateVector.random(grid, rng)
        lhs = apply_resolvent(p, z1, u, params) - apply_resolvent(p, z2, u, params)
        rhs = (z1 - z2) * apply_resolvent(p, z1, apply_resolvent(p, z2, u, params), params)
        worst = max(worst, (lhs - rhs).norm() / u.norm())
    assert report(7, worst <= 1e-7, f"max ||R1 - R2 - (z1-z2) R1 R2|| / ||u|| = {worst:.2e} (tol 1e-7)")


@pytest.mark.parametrize("e,R,sigma", [(1.0, 1.0, 0.0), (0.5, 2.0, 0.2), (0.1, 1.0, 0.0)])
def test_criterion_08_bounds_audit(e, R, sigma):
    params = ModelParams.with_default_gamma0(e, R, sigma)
    bound = theorem1_bound(params)
    dd1_bad, z_bad = [], []
    for p_abs in np.linspace(0.05, 3.0, 50):
        if d12_edge(p_abs, params).value.real > lemma_dd1_bound(p_abs, params):
            dd1_bad.append(p_abs)
        zs = solve_ground(p_abs, params)
        if zs is not None and not 0 < zs <= bound:
            z_bad.append(p_abs)
    far = solve_ground(no_root_threshold(params) + 1.0, params)
    ok = not dd1_bad and not z_bad and far is None
    assert report(8, ok, f"(e,R,sigma)=({e},{R},{sigma}): D12 violations {len(dd1_bad)}, "
                         f"z* bound violations {len(z_bad)}, root beyond threshold: {far is not None}")


def test_criterion_09_effective_mass_cross_check():
    worst = 0.0
    for e in (0.1, 1.0):
        for R in (1.0, 2.0):
            for sigma in (0.0, 0.1):
                params = ModelParams.with_default_gamma0(e, R, sigma)
                diff = abs(effective_mass(params).inv_mass
                           - effective_mass_fd_extrapolated(params, hs=(1e-2, 5e-3)).inv_mass)
                worst = max(worst, diff)
    assert report(9, worst <= 1e-4, f"max |formula - extrapolated difference| = {worst:.2e} (tol 1e-4)")


def test_criterion_10_sign_and_monotonicity_suite():
    rng = np.random.default_rng(10)
    n = 1000
    bad_mono = bad_edge = bad_low = 0
    for _ in range(n):
        params = ModelParams.with_default_gamma0(rng.uniform(0.05, 2.0), rng.uniform(0.2, 3.0),
                                                 rng.uniform(0.0, 0.45))
        g = params.gamma0
        # strictly decreasing on [gamma0 - p^2/2, z0]
        p_abs = rng.uniform(0.01, 4.0)
        lo, hi = g - p_abs**2 / 2, z0(p_abs, params)
        za, zb = np.sort(rng.uniform(lo, hi, size=2))
        if zb - za < 1e-4 * (hi - lo):
            zb = min(hi, za + 1e-4 * (hi - lo))
        if not secular_f(p_abs, zb, params) < secular_f(p_abs, za, params):
            bad_mono += 1
        # negative on the band edge inside the unit ball
        q = rng.uniform(1e-3, 1.0)
        if not secular_f(q, z0(q, params), params) < 0:
            bad_edge += 1
        # positive below gamma0 - p^2/2
        r = rng.uniform(0.0, 4.0)
        z = g - r * r / 2 - rng.uniform(1e-6, 5.0)
        if not secular_f(r, z, params) > 0:
            bad_low += 1
    total = bad_mono + bad_edge + bad_low
    assert report(10, total == 0, f"{n} samples each: monotonicity {bad_mono}, edge sign {bad_edge}, "
                                  f"low-z sign {bad_low} violations")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
