"""Independent numerical oracles used only by the tests.

The Newton collocation solver attacks the steady boundary-value problem
globally on the same grid as the library's Picard construction, so agreement
between the two is a genuine dual-route check: same discrete equations,
entirely different solution algorithm.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded


def newton_collocation(y, b, c, potential, xi, max_iter=60, tol=1e-13):
    """Damped Newton on -D2 U - b D1 U - c U + F'(U) = 0 with U(+-L) = xi."""
    y = np.asarray(y, float)
    h = y[1] - y[0]
    n = len(y)
    U = np.full(n, float(xi))
    for _ in range(max_iter):
        lap = np.zeros(n)
        lap[1:-1] = (U[2:] - 2 * U[1:-1] + U[:-2]) / h**2
        d1 = np.zeros(n)
        d1[1:-1] = (U[2:] - U[:-2]) / (2 * h)
        R = -lap - b * d1 - c * U + potential.df(U)
        R[0] = U[0] - xi
        R[-1] = U[-1] - xi
        ab = np.zeros((3, n))
        ab[0, 1:] = -1 / h**2 - b[:-1] / (2 * h)
        ab[1, :] = 2 / h**2 - c + potential.d2f(U)
        ab[2, :-1] = -1 / h**2 + b[1:] / (2 * h)
        ab[0, 1] = 0.0
        ab[1, 0] = 1.0
        ab[1, -1] = 1.0
        ab[2, -2] = 0.0
        dU = solve_banded((1, 1), ab, -R)
        step = 1.0
        if np.max(np.abs(dU)) > 1.0:
            step = 1.0 / np.max(np.abs(dU))
        U = U + step * dU
        if np.max(np.abs(dU)) < tol:
            break
    return U


def refined_trapz(f, a, b, n=400001):
    """High-resolution trapezoid quadrature of a callable on [a, b]."""
    x = np.linspace(a, b, n)
    return float(np.trapezoid(f(x), dx=x[1] - x[0]))


def random_c2_field(rng, y, odd=False, knot_spacing=4.0, extent=40.0,
                    window_scale=12.0):
    """Seeded C^2 test function: cubic spline through random knot values,
    windowed hard enough that boundary terms sit far below quadrature noise."""
    from scipy.interpolate import CubicSpline
    knots = np.arange(-extent, extent + 1e-9, knot_spacing)
    vals = rng.standard_normal(len(knots))
    cs = CubicSpline(knots, vals, bc_type="natural")
    f = cs(np.clip(y, knots[0], knots[-1])) * np.exp(-((y / window_scale) ** 2))
    if odd:
        f = 0.5 * (f - f[::-1])
    return f
