"""Adaptive Gauss-Legendre integration on [0, R] with an algebraic weight at 0.

The radial integrals here all have the shape ``int_0^R rho^(2 sigma) h(rho)``
with ``h`` smooth away from a handful of known near-singular points. Panels
touching the origin use Gauss-Jacobi nodes that absorb ``rho^(2 sigma)``
exactly; every other panel uses plain Gauss-Legendre. Panels are bisected
greedily (largest error first) until the summed error estimate drops below
``abs_tol``.
"""

from __future__ import annotations

import heapq
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

DEFAULT_ORDER = 20


@lru_cache(maxsize=None)
def _legendre(order):
    return leggauss(order)


@lru_cache(maxsize=64)
def _jacobi(order, beta):
    if beta == 0.0:
        return _legendre(order)
    x, w = roots_jacobi(order, 0.0, beta)
    return x, w


def _panel(h, a, b, sigma, order):
    two_sigma = 2.0 * sigma
    half = 0.5 * (b - a)
    if a == 0.0:
        x, w = _jacobi(order, two_sigma)
        rho = half * (1.0 + x)
        vals = np.asarray(h(rho))
        scale = half ** (1.0 + two_sigma)
        return scale * np.tensordot(w, vals, axes=(0, 0))
    x, w = _legendre(order)
    rho = a + half * (1.0 + x)
    vals = np.asarray(h(rho))
    weight = w * rho**two_sigma if two_sigma else w
    return half * np.tensordot(weight, vals, axes=(0, 0))


def _split(h, a, b, sigma, order):
    m = 0.5 * (a + b)
    left = _panel(h, a, m, sigma, order)
    right = _panel(h, m, b, sigma, order)
    return left, right


def integrate_radial(h, R, sigma=0.0, breakpoints=(), abs_tol=1e-10, max_panels=256,
                     max_depth=60, order=DEFAULT_ORDER):
    """Integrate ``rho^(2 sigma) h(rho)`` over ``[0, R]``.

    ``h`` maps a 1-D node array to values of shape ``(n,)`` or ``(n, m)``
    (several integrands sharing the nodes); real or complex. Returns
    ``(value, err, converged)`` where ``err`` is the summed bisection
    estimate (largest component) and ``converged`` says whether it reached
    ``abs_tol`` within the panel and depth caps.
    """
    cuts = sorted({0.0, float(R), *(float(c) for c in breakpoints if 0.0 < c < R)})
    heap = []
    counter = 0
    done_value = 0.0
    done_err = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        coarse = _panel(h, a, b, sigma, order)
        left, right = _split(h, a, b, sigma, order)
        fine = left + right
        err = float(np.max(np.abs(fine - coarse)))
        heapq.heappush(heap, (-err, counter, a, b, fine, left, right, 0))
        counter += 1

    total_err = sum(-item[0] for item in heap)
    n_panels = len(heap)
    converged = True
    while total_err > abs_tol:
        if not heap:
            break
        neg_err, _, a, b, fine, left, right, depth = heapq.heappop(heap)
        if depth >= max_depth or n_panels >= max_panels:
            # cannot refine further; keep as final
            done_value = done_value + fine
            done_err += -neg_err
            converged = False
            continue
        total_err += neg_err
        m = 0.5 * (a + b)
        for lo, hi, coarse in ((a, m, left), (m, b, right)):
            cl, cr = _split(h, lo, hi, sigma, order)
            child_fine = cl + cr
            child_err = float(np.max(np.abs(child_fine - coarse)))
            heapq.heappush(heap, (-child_err, counter, lo, hi, child_fine, cl, cr, depth + 1))
            counter += 1
            total_err += child_err
        n_panels += 1

    value = done_value
    err = done_err
    for neg_err, *_rest in heap:
        value = value + _rest[3]
        err += -neg_err
    if err > abs_tol:
        converged = False
    return value, err, converged
