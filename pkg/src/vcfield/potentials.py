"""Scalar-field potentials F(u) with derivatives up to third order.

Supported families are sine-Gordon, polynomials of degree >= 2, and shifted
views F(u) - F(xi) used to normalize the vacuum energy to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class PotentialError(ValueError):
    pass


@dataclass(frozen=True)
class Potential:
    family: str
    coeffs: tuple = ()           # polynomial coefficients, ascending order
    offset: float = 0.0          # subtracted constant: F(u) - offset

    def f(self, u):
        if self.family == "sine-gordon":
            return 1.0 - np.cos(u) - self.offset
        return np.polynomial.polynomial.polyval(u, self._c(0)) - self.offset

    def df(self, u):
        if self.family == "sine-gordon":
            return np.sin(u)
        return np.polynomial.polynomial.polyval(u, self._c(1))

    def d2f(self, u):
        if self.family == "sine-gordon":
            return np.cos(u)
        return np.polynomial.polynomial.polyval(u, self._c(2))

    def d3f(self, u):
        if self.family == "sine-gordon":
            return -np.sin(u)
        return np.polynomial.polynomial.polyval(u, self._c(3))

    def _c(self, order: int):
        c = np.asarray(self.coeffs, dtype=float)
        for _ in range(order):
            c = np.polynomial.polynomial.polyder(c)
        return c if c.size else np.zeros(1)

    def shifted(self, xi: float) -> "Potential":
        """View with F - F(xi), so the vacuum at xi has zero potential energy."""
        return Potential(self.family, self.coeffs, self.offset + float(self.f(xi)))


def make_potential(spec) -> Potential:
    """Build a potential from a config mapping or a family name."""
    if isinstance(spec, str):
        spec = {"family": spec}
    family = spec.get("family")
    if family == "sine-gordon":
        return Potential("sine-gordon")
    if family == "polynomial":
        coeffs = tuple(float(c) for c in spec.get("coeffs", ()))
        if len(coeffs) < 3:
            raise PotentialError("polynomial potential needs degree >= 2")
        return Potential("polynomial", coeffs)
    raise PotentialError(f"unknown potential family: {family!r}")


@dataclass(frozen=True)
class VacuumInfo:
    xi: float
    m: float                      # m = sqrt(F''(xi))
    shift_valid: bool = True
    potential: Potential = field(default=None, repr=False)

    @property
    def m2(self) -> float:
        return self.m * self.m


def vacuum_info(potential: Potential, xi_guess: float) -> VacuumInfo:
    """Newton-refine a root of F' near xi_guess and validate F''(xi) > 0.

    Falls back to bisection when Newton leaves the trust window; rejects
    degenerate vacua and guesses with no nearby root.
    """
    xi = float(xi_guess)
    window = 0.5
    for _ in range(60):
        g = float(potential.df(xi))
        if abs(g) < 1e-13:
            break
        gp = float(potential.d2f(xi))
        step = g / gp if gp != 0.0 else np.sign(g) * 0.1
        nxt = xi - step
        if abs(nxt - xi_guess) > window:
            nxt = _bisect_root(potential, xi_guess, window)
            if nxt is None:
                raise PotentialError(
                    f"no root of F' within {window} of guess {xi_guess}")
            xi = nxt
            break
        xi = nxt
    if abs(float(potential.df(xi))) > 1e-12 or abs(xi - xi_guess) > window:
        nxt = _bisect_root(potential, xi_guess, window)
        if nxt is None:
            raise PotentialError(f"no root of F' within {window} of guess {xi_guess}")
        xi = nxt
    d2 = float(potential.d2f(xi))
    if d2 <= 1e-8:
        raise PotentialError(f"degenerate vacuum at xi={xi}: F''={d2}")
    shifted = potential.shifted(xi)
    ok = abs(float(shifted.f(xi))) < 1e-12 and abs(float(shifted.df(xi))) < 1e-10
    return VacuumInfo(xi=xi, m=float(np.sqrt(d2)), shift_valid=ok, potential=shifted)


def _bisect_root(potential: Potential, guess: float, window: float):
    xs = np.linspace(guess - window, guess + window, 2001)
    vals = potential.df(xs)
    sign = np.sign(vals)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if idx.size == 0:
        return None
    # root closest to the guess
    i = idx[np.argmin(np.abs(xs[idx] - guess))]
    a, bb = xs[i], xs[i + 1]
    fa = float(potential.df(a))
    for _ in range(200):
        mid = 0.5 * (a + bb)
        fm = float(potential.df(mid))
        if abs(fm) < 1e-14 or (bb - a) < 1e-15:
            return mid
        if fa * fm < 0:
            bb = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + bb)


def nonlinear_remainder(potential: Potential, xi: float, eta):
    """Remainder -F'(xi + eta) + F''(xi) eta of the steady-state linearization.

    Quadratically small: |result| <= max|F'''| * eta^2 on the relevant range.
    """
    return -potential.df(xi + eta) + potential.d2f(xi) * eta


def evolution_nonlinearity(potential: Potential, U, v1):
    """Pointwise F'(U) - F'(U + v1), the nonlinear forcing of the perturbation."""
    return potential.df(U) - potential.df(U + v1)
