"""Leapfrog evolution of u_tt = u_yy + b u_y + c u - F'(u) on a truncated line.

The stencil is the plain second-order leapfrog with central space differences;
it is parity-exact and time-reversible. The sponge enters as a -gamma(y) u_t
damping term discretized centrally, which stays pointwise-linear in the new
level. Dirichlet u = xi at both ends; the sponge absorbs what reaches the
edges before any reflection matters.

The time step is gated by the full stability bound dt <= cfl * 2/sqrt(4/dy^2
+ M) where M bounds the zeroth-order stiffness max(F'' - c + b^2/4 + |b'|/2).
For mild coefficients this reduces to the wave-CFL dt = cfl*dy, but families
with |c| ~ 1e5 are dominated by M and the wave-only rule would be unstable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeffs import CoefficientField, fit_decay
from .potentials import Potential


class CFLError(ValueError):
    pass


class BlowUpError(RuntimeError):
    def __init__(self, t, detail=""):
        super().__init__(f"solution blew up at t={t:.6g} {detail}")
        self.t = t


@dataclass(frozen=True)
class Grid:
    L: float
    N: int                     # number of cells; even so y=0 is a node

    def __post_init__(self):
        if self.N % 2 != 0:
            raise ValueError("Grid.N must be even so that y = 0 is a node")

    @property
    def dy(self) -> float:
        return 2 * self.L / self.N

    @property
    def y(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.N + 1)

    @classmethod
    def from_spacing(cls, L: float, dy: float) -> "Grid":
        n = int(round(2 * L / dy))
        if n % 2 == 1:
            n += 1
        return cls(L=float(L), N=n)


@dataclass
class SpongeProfile:
    gamma: np.ndarray
    width_fraction: float
    gamma_max: float

    @classmethod
    def build(cls, grid: Grid, width_fraction: float = 0.2,
              gamma_max: float = 1.0) -> "SpongeProfile":
        if not 0 < width_fraction <= 0.4:
            raise ValueError("sponge width fraction must lie in (0, 0.4]")
        y = grid.y
        y0 = grid.L * (1 - width_fraction)
        s = np.clip((np.abs(y) - y0) / (grid.L - y0), 0.0, 1.0)
        gamma = gamma_max * s * s * (3 - 2 * s)      # C^1 smoothstep ramp
        return cls(gamma=gamma, width_fraction=width_fraction, gamma_max=gamma_max)

    @classmethod
    def off(cls, grid: Grid) -> "SpongeProfile":
        return cls(gamma=np.zeros(grid.N + 1), width_fraction=0.2, gamma_max=0.0)


@dataclass
class FieldState:
    t: float
    u: np.ndarray
    ut: np.ndarray

    def perturbation(self, reference_u) -> tuple[np.ndarray, np.ndarray]:
        """(v1, v2) = (u - U, du/dt) against the reference profile."""
        return self.u - reference_u, self.ut


def stability_limit(grid: Grid, coeffs: CoefficientField, potential: Potential,
                    xi: float) -> float:
    """Leapfrog bound 2/sqrt(max eigenvalue) of the frozen linearized operator."""
    us = np.linspace(xi - 2 * np.pi, xi + 2 * np.pi, 257)
    f2 = float(np.max(np.abs(potential.d2f(us))))
    M = float(np.max(f2 - coeffs.c + coeffs.b**2 / 4 + np.abs(coeffs.bp) / 2))
    M = max(M, 0.0)
    return 2.0 / np.sqrt(4.0 / grid.dy**2 + M)


class Stepper:
    """Two-level leapfrog integrator with a Taylor back-step start."""

    def __init__(self, grid: Grid, coeffs: CoefficientField, potential: Potential,
                 xi: float, u0: np.ndarray, u1: np.ndarray, dt: float,
                 sponge: SpongeProfile | None = None):
        limit = stability_limit(grid, coeffs, potential, xi)
        if dt > limit * (1 + 1e-12):
            raise CFLError(f"dt={dt:.3e} exceeds the stability limit {limit:.3e}")
        self.grid = grid
        self.potential = potential
        self.xi = float(xi)
        self.dt = float(dt)
        h = grid.dy
        dt2 = dt * dt
        b, c = coeffs.b, coeffs.c
        self._cA = dt2 * (1.0 / h**2 + b[1:-1] / (2 * h))
        self._cB = dt2 * (-2.0 / h**2 + c[1:-1])
        self._cC = dt2 * (1.0 / h**2 - b[1:-1] / (2 * h))
        gamma = (sponge.gamma if sponge is not None else np.zeros(grid.N + 1))
        self._dplus = 1.0 + gamma[1:-1] * dt / 2
        self._dminus = 1.0 - gamma[1:-1] * dt / 2
        self._dt2 = dt2

        self.n = 0
        self.u = np.array(u0, dtype=float, copy=True)
        self.u[0] = xi
        self.u[-1] = xi
        acc = self._acceleration(self.u)
        self.u_prev = self.u - dt * np.asarray(u1, float) + 0.5 * dt2 * acc
        self.u_prev[0] = xi
        self.u_prev[-1] = xi

    def _acceleration(self, u):
        h = self.grid.dy
        acc = np.zeros_like(u)
        acc[1:-1] = ((self._cA * u[2:] + self._cB * u[1:-1] + self._cC * u[:-2])
                     / self._dt2 - self.potential.df(u[1:-1]))
        return acc

    def advance(self) -> FieldState:
        """Compute u^{n+1}, return the observable state at t_n with centered u_t."""
        u, up = self.u, self.u_prev
        unew = np.empty_like(u)
        unew[1:-1] = (2 * u[1:-1] - self._dminus * up[1:-1]
                      + self._cA * u[2:] + self._cB * u[1:-1] + self._cC * u[:-2]
                      - self._dt2 * self.potential.df(u[1:-1])) / self._dplus
        unew[0] = self.xi
        unew[-1] = self.xi
        probe = unew[:: max(1, len(unew) // 128)]
        if not np.all(np.isfinite(probe)) or np.max(np.abs(probe - self.xi)) > 1e6:
            raise BlowUpError(self.n * self.dt)
        state = FieldState(t=self.n * self.dt, u=u.copy(),
                           ut=(unew - up) / (2 * self.dt))
        self.u_prev = u
        self.u = unew
        self.n += 1
        return state


def _d1_fourth(f: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(f)
    d[2:-2] = (8 * (f[3:-1] - f[1:-3]) - (f[4:] - f[:-4])) / (12 * h)
    d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    d[1] = (f[2] - f[0]) / (2 * h)
    d[-2] = (f[-1] - f[-3]) / (2 * h)
    d[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    return d


def energy(state: FieldState, coeffs: CoefficientField, potential: Potential,
           xi: float) -> float:
    """Conserved energy with weight omega = exp(int_{-L}^y b); F normalized to F(xi)=0."""
    h = float(coeffs.dy)
    omega = weight_omega(coeffs)
    uy = _d1_fourth(state.u, h)
    Fu = potential.f(state.u) - potential.f(xi)
    integrand = 0.5 * state.ut**2 + 0.5 * uy**2 - 0.5 * coeffs.c * state.u**2 + Fu
    return float(np.trapezoid(integrand * omega, dx=h))


def weight_omega(coeffs: CoefficientField) -> np.ndarray:
    b = coeffs.b
    h = coeffs.dy
    return np.exp(np.concatenate([[0.0], np.cumsum((b[1:] + b[:-1]) / 2 * h)]))


def weight_tail_estimate(coeffs: CoefficientField) -> float:
    """Approximation of the missing int_{-inf}^{-L} b, from the decay fit of b."""
    fit = fit_decay(coeffs.b, coeffs.y)
    if fit.is_sentinel or not np.isfinite(fit.k) or fit.k <= 0:
        return 0.0
    return float(coeffs.b[0] / fit.k)


def steady_background_energy(coeffs: CoefficientField, potential: Potential,
                             xi: float) -> float:
    """Energy of the constant state u = xi: just the -c xi^2 / 2 term."""
    omega = weight_omega(coeffs)
    return float(np.trapezoid(-0.5 * coeffs.c * xi**2 * omega, dx=coeffs.dy))


def h1_l2_norm(u0: np.ndarray, u1: np.ndarray, h: float) -> float:
    d = _d1_fourth(u0, h)
    return float(np.sqrt(np.trapezoid(d * d + u0 * u0, dx=h)
                         + np.trapezoid(u1 * u1, dx=h)))


def initial_data(grid: Grid, spec: dict, rng: np.random.Generator
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Perturbation pair (v1, v2) scaled to the target discrete H1 x L2 norm.

    Families: "sech-bump" (even bump), "odd-pair" (odd displacement plus an
    independent odd velocity), "random-spline" (seeded C^2 spline, windowed).
    The "component" field routes the shape into displacement, velocity, or both.
    """
    from scipy.interpolate import CubicSpline

    y = grid.y
    eps = float(spec.get("epsilon", 0.01))
    family = spec.get("family", "sech-bump")
    width = float(spec.get("width", 1.0))
    center = float(spec.get("center", 0.0))
    parity = spec.get("parity", "none")
    component = spec.get("component", "both")

    if family == "sech-bump":
        shape = 1.0 / np.cosh((y - center) / width)
        other = 0.5 / np.cosh((y - center) / width)
    elif family == "odd-pair":
        shape = y * np.exp(-0.25 * (y / width) ** 2)
        other = y * np.exp(-0.2 * (y / width) ** 2) * np.cos(y)
    elif family == "random-spline":
        def draw():
            knots = np.arange(-40.0, 40.0 + 1e-9, 4.0)
            vals = rng.standard_normal(len(knots))
            cs = CubicSpline(knots, vals, bc_type="natural")
            return cs(np.clip(y, knots[0], knots[-1])) * np.exp(-((y / 15.0) ** 2))
        shape, other = draw(), draw()
    else:
        raise ValueError(f"unknown initial-data family: {family!r}")

    def project(f):
        if parity == "odd":
            return 0.5 * (f - f[::-1])
        if parity == "even":
            return 0.5 * (f + f[::-1])
        return f

    shape, other = project(shape), project(other)
    if component == "velocity":
        v1, v2 = np.zeros_like(y), shape
    elif component == "displacement":
        v1, v2 = shape, np.zeros_like(y)
    else:
        v1, v2 = shape, other
    nrm = h1_l2_norm(v1, v2, grid.dy)
    if nrm == 0.0:
        return v1, v2
    return v1 * (eps / nrm), v2 * (eps / nrm)
