"""Coefficient fields b(y), c(y): representation, x->y transform, hypotheses checks.

Parametric families carry analytic derivatives; tabulated data falls back to
second-order central differences. All admissibility conditions are evaluated
pointwise on the grid, with the three smallest margins reported so a user can
judge whether grid refinement is warranted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator


class CoefficientError(ValueError):
    pass


def make_grid(L: float = 80.0, dy: float = 0.01) -> np.ndarray:
    """Uniform grid on [-L, L] with an even number of cells, so y = 0 is a node."""
    n = int(round(2 * L / dy))
    if n % 2 == 1:
        n += 1
    return np.linspace(-L, L, n + 1)


def _numeric_derivative(f: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    d[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    return d


@dataclass
class CoefficientField:
    y: np.ndarray
    b: np.ndarray
    c: np.ndarray
    bp: np.ndarray
    cp: np.ndarray
    kind: str = "tabulated"            # "parametric-family" | "tabulated"
    family: str | None = None
    params: dict = field(default_factory=dict)
    decay: tuple | None = None         # (K, k) with |c| <= K exp(-k|y|)
    kink_points: tuple = ()            # locations where b' is one-sided only

    def __post_init__(self):
        for name in ("y", "b", "c", "bp", "cp"):
            arr = np.asarray(getattr(self, name), dtype=float)
            setattr(self, name, arr)
            if not np.all(np.isfinite(arr)):
                raise CoefficientError(f"non-finite samples in {name}")
            if arr.shape != self.y.shape:
                raise CoefficientError("coefficient arrays must share the grid")
        if self.decay is not None:
            K, k = self.decay
            if not (K >= 0 and k > 0):
                raise CoefficientError("decay metadata needs K >= 0, k > 0")
            bound = K * np.exp(-k * np.abs(self.y))
            if np.any(np.abs(self.c) > bound * (1 + 1e-12) + 1e-300):
                raise CoefficientError("decay metadata violated on the grid")

    @property
    def dy(self) -> float:
        return float(self.y[1] - self.y[0])

    @classmethod
    def from_samples(cls, y, b, c, **kw) -> "CoefficientField":
        y = np.asarray(y, float)
        b = np.asarray(b, float)
        c = np.asarray(c, float)
        h = y[1] - y[0]
        return cls(y=y, b=b, c=c,
                   bp=_numeric_derivative(b, h), cp=_numeric_derivative(c, h),
                   kind="tabulated", **kw)

    @classmethod
    def from_callables(cls, y, fb, fc, fbp, fcp, **kw) -> "CoefficientField":
        y = np.asarray(y, float)
        return cls(y=y, b=fb(y), c=fc(y), bp=fbp(y), cp=fcp(y),
                   kind="parametric-family", **kw)


def zero_field(y) -> CoefficientField:
    z = np.zeros_like(np.asarray(y, float))
    return CoefficientField(y=y, b=z, c=z.copy(), bp=z.copy(), cp=z.copy(),
                            kind="parametric-family", family="zero")


def paper_example_field(y, lam: float, tail_rate: float = 40.0) -> CoefficientField:
    """Explicit family for the vacuum coercivity conditions, lam > 12.

    c(y) = -8 lam^4 sech(2y/lam); b is linear 16y inside |y| < 1/lam with an
    exponential tail sgn(y)(16/lam) e^{-(tail_rate/lam)(|y|-1/lam)} outside.
    b is Lipschitz but not C^1 at |y| = 1/lam; b' there is one-sided and the
    kinks are flagged in every admissibility report.

    tail_rate must exceed ~64 e / cosh-corrections, else the first inequality
    fails around |y| ~ lam/10 where 4 lam tanh(y/lam) b(y) peaks at
    64 max_t(t e^{-tail_rate t}) = 64/(tail_rate e) times cosh^2 corrections.
    The default 40 satisfies both inequalities strictly; tail_rate=10 keeps
    the literal originally published variant, which does not.
    """
    lam = float(lam)
    y = np.asarray(y, float)
    c = -8 * lam**4 / np.cosh(2 * y / lam)
    cp = 16 * lam**3 * np.tanh(2 * y / lam) / np.cosh(2 * y / lam)
    inner = np.abs(y) < 1 / lam
    tail = (16 / lam) * np.exp(-(tail_rate / lam) * (np.abs(y) - 1 / lam))
    b = np.where(inner, 16 * y, np.sign(y) * tail)
    bp = np.where(inner, 16.0, -(16 * tail_rate / lam**2)
                  * np.exp(-(tail_rate / lam) * (np.abs(y) - 1 / lam)))
    return CoefficientField(y=y, b=b, c=c, bp=bp, cp=cp,
                            kind="parametric-family", family="paper-example",
                            params={"lam": lam, "tail_rate": tail_rate},
                            decay=(16 * lam**4, 2 / lam),
                            kink_points=(-1 / lam, 1 / lam))


def sech_well_field(y, amplitude: float) -> CoefficientField:
    y = np.asarray(y, float)
    a = float(amplitude)
    z = np.zeros_like(y)
    c = a / np.cosh(y)
    cp = -a * np.tanh(y) / np.cosh(y)
    return CoefficientField(y=y, b=z, c=c, bp=z.copy(), cp=cp,
                            kind="parametric-family", family="sech-well",
                            params={"amplitude": a}, decay=(2 * abs(a), 1.0))


def sech2_well_field(y, amplitude: float) -> CoefficientField:
    y = np.asarray(y, float)
    a = float(amplitude)
    z = np.zeros_like(y)
    c = a / np.cosh(y) ** 2
    cp = -2 * a * np.tanh(y) / np.cosh(y) ** 2
    return CoefficientField(y=y, b=z, c=c, bp=z.copy(), cp=cp,
                            kind="parametric-family", family="sech2-well",
                            params={"amplitude": a}, decay=(4 * abs(a), 2.0))


def tanh_sech_drift_field(y, b_amplitude: float, c_amplitude: float = 0.0) -> CoefficientField:
    """Odd b = b_amp tanh(y) sech(y) with an even sech well in c."""
    y = np.asarray(y, float)
    ba, ca = float(b_amplitude), float(c_amplitude)
    sech, tanh = 1 / np.cosh(y), np.tanh(y)
    b = ba * tanh * sech
    bp = ba * sech * (1 - 2 * tanh**2)
    c = ca * sech
    cp = -ca * tanh * sech
    decay = (2 * abs(ca), 1.0) if ca != 0.0 else (0.0, 1.0)
    return CoefficientField(y=y, b=b, c=c, bp=bp, cp=cp,
                            kind="parametric-family", family="tanh-sech-drift",
                            params={"b_amplitude": ba, "c_amplitude": ca}, decay=decay)


_FAMILIES = {
    "zero": lambda y, p: zero_field(y),
    "paper-example": lambda y, p: paper_example_field(y, p.get("lam", 13.0),
                                                      p.get("tail_rate", 40.0)),
    "sech-well": lambda y, p: sech_well_field(y, p.get("amplitude", -0.05)),
    "sech2-well": lambda y, p: sech2_well_field(y, p.get("amplitude", 2.0)),
    "tanh-sech-drift": lambda y, p: tanh_sech_drift_field(
        y, p.get("b_amplitude", -0.1), p.get("c_amplitude", 0.0)),
}


def make_coefficients(spec: dict, y) -> CoefficientField:
    """Coefficient field from a config mapping: named family or two-column CSVs."""
    if "b_csv" in spec or "c_csv" in spec:
        return _from_csv(spec, y)
    family = spec.get("family", "zero")
    if family not in _FAMILIES:
        raise CoefficientError(f"unknown coefficient family: {family!r}")
    return _FAMILIES[family](y, spec)


def _read_two_column(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",")
    if data.ndim != 2 or data.shape[1] != 2:
        raise CoefficientError(f"{path}: expected two-column CSV (y, value)")
    return data[:, 0], data[:, 1]


def _from_csv(spec: dict, y) -> CoefficientField:
    y = np.asarray(y, float)
    b = np.zeros_like(y)
    c = np.zeros_like(y)
    if spec.get("b_csv"):
        yb, vb = _read_two_column(spec["b_csv"])
        b = PchipInterpolator(yb, vb, extrapolate=False)(np.clip(y, yb[0], yb[-1]))
    if spec.get("c_csv"):
        yc, vc = _read_two_column(spec["c_csv"])
        c = PchipInterpolator(yc, vc, extrapolate=False)(np.clip(y, yc[0], yc[-1]))
    return CoefficientField.from_samples(y, b, c, family="csv")


def transform_to_y(x, a, b, c) -> CoefficientField:
    """Change variables y = int_0^x a^{-1/2} and absorb a into the drift term.

    The transformed drift is b(x(y)) - a'(x(y)) / (2 sqrt(a(x(y)))), which is
    the closed form of b - a^{-1/2} d/dy a^{1/2}(x(y)). Samples are resampled
    onto a uniform y grid by monotone cubic interpolation.
    """
    x = np.asarray(x, float)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    c = np.asarray(c, float)
    if np.any(a <= 0):
        raise CoefficientError("a(x) must be strictly positive")
    dx = x[1] - x[0]
    if not np.allclose(np.diff(x), dx, rtol=1e-10, atol=1e-12):
        raise CoefficientError("x grid must be uniform")
    if x[0] > 0 or x[-1] < 0:
        raise CoefficientError("x grid must contain x = 0 to anchor y(0) = 0")

    integrand = 1.0 / np.sqrt(a)
    y_img = np.concatenate([[0.0], np.cumsum((integrand[1:] + integrand[:-1]) / 2 * dx)])
    # anchor so that y(x=0) = 0
    y_img -= np.interp(0.0, x, y_img)
    span = y_img[-1] - y_img[0]
    if span < max(1e-12, 1e-6 * (x[-1] - x[0])):
        raise CoefficientError(
            f"y-range collapsed to {span:.3e}: a(x) is too large everywhere")

    ap = _numeric_derivative(a, dx)
    b_tilde_x = b - ap / (2 * np.sqrt(a))

    y_new = np.linspace(y_img[0], y_img[-1], len(x))
    x_of_y = PchipInterpolator(y_img, x)
    xs = x_of_y(y_new)
    b_new = PchipInterpolator(x, b_tilde_x)(xs)
    c_new = PchipInterpolator(x, c)(xs)
    return CoefficientField.from_samples(y_new, b_new, c_new, family="transformed")


@dataclass
class AdmissibilityReport:
    condition_id: str
    passed: bool
    worst_margin: float
    worst_location: float
    params: dict = field(default_factory=dict)
    smallest_margins: list = field(default_factory=list)   # [(y, margin)] x 3
    flagged_kinks: list = field(default_factory=list)
    margins: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.passed != (self.worst_margin >= 0):
            raise ValueError("pass flag inconsistent with worst margin sign")

    def to_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "passed": self.passed,
            "worst_margin": float(self.worst_margin),
            "worst_location": float(self.worst_location),
            "params": self.params,
            "smallest_margins": [[float(a), float(m)] for a, m in self.smallest_margins],
            "flagged_kinks": [float(v) for v in self.flagged_kinks],
        }


def _finish_report(condition_id, y, margins, params, kinks=()) -> AdmissibilityReport:
    i = int(np.argmin(margins))
    order = np.argsort(margins)[:3]
    return AdmissibilityReport(
        condition_id=condition_id,
        passed=bool(margins[i] >= 0),
        worst_margin=float(margins[i]),
        worst_location=float(y[i]),
        params=params,
        smallest_margins=[(float(y[j]), float(margins[j])) for j in order],
        flagged_kinks=list(kinks),
        margins=margins,
    )


def vacuum_margins(coeffs: CoefficientField, lam: float) -> np.ndarray:
    """Per-node margin of the two vacuum coercivity inequalities (positive = holds)."""
    y = coeffs.y
    s = y / lam
    sech2 = 1 / np.cosh(s) ** 2
    tanh = np.tanh(s)
    m1 = sech2 - 4 * lam * tanh * coeffs.b
    sech2_prime = -(2 / lam) * sech2 * tanh
    m2 = 2 * lam * tanh * coeffs.cp + sech2 * coeffs.bp + sech2_prime * coeffs.b - 8 * sech2
    return np.minimum(m1, m2)


def check_vacuum_admissible(coeffs: CoefficientField, lam: float) -> AdmissibilityReport:
    """Theorem-level conditions for vacuum stability, checked at every node."""
    if not lam > 2:
        raise CoefficientError(f"vacuum check requires lam > 2, got {lam}")
    margins = vacuum_margins(coeffs, lam)
    return _finish_report("vacuum-coercive", coeffs.y, margins,
                          {"lam": float(lam)}, coeffs.kink_points)


def sign_margins(coeffs: CoefficientField) -> np.ndarray:
    """Margins of sgn(y)b <= 0, sgn(y)b' >= 0, sgn(y)c' >= 0; +inf at y = 0."""
    s = np.sign(coeffs.y)
    m = np.minimum(np.minimum(-s * coeffs.b, s * coeffs.bp), s * coeffs.cp)
    m[s == 0] = np.inf
    return m


def check_sign_conditions(coeffs: CoefficientField) -> AdmissibilityReport:
    margins = sign_margins(coeffs)
    return _finish_report("sign-conditions", coeffs.y, margins, {},
                          coeffs.kink_points)


def check_orbital(coeffs: CoefficientField, potential, xi: float) -> AdmissibilityReport:
    """Energy coercivity gap mu = F''(xi) - max c; positive mu gives orbital stability."""
    d2 = float(potential.d2f(xi))
    i = int(np.argmax(coeffs.c))
    mu = d2 - float(coeffs.c[i])
    margins = d2 - coeffs.c
    rep = _finish_report("orbital", coeffs.y, margins, {"mu": mu, "xi": float(xi)})
    # strict positivity required: the boundary case mu = 0 fails
    if mu <= 0:
        rep.passed = False
        if rep.worst_margin == 0.0:
            rep.worst_margin = -0.0
    return rep


@dataclass
class DecayFit:
    K: float
    k: float
    K_envelope: float
    holds: bool
    window: tuple
    n_points: int

    @property
    def is_sentinel(self) -> bool:
        return self.n_points == 0

    def to_dict(self) -> dict:
        return {"K": self.K, "k": self.k, "K_envelope": self.K_envelope,
                "holds": self.holds, "window": list(self.window),
                "n_points": self.n_points}


def fit_decay(coeffs_or_c, y=None) -> DecayFit:
    """Least-squares exponential envelope |c| <= K exp(-k|y|) from the tail window.

    Fits log|c| against |y| over |y| in [L/4, L/2], skipping nodes below 1e-14.
    Returns the sentinel (K=0, k=inf) when c vanishes on the window.
    """
    if isinstance(coeffs_or_c, CoefficientField):
        c, y = coeffs_or_c.c, coeffs_or_c.y
    else:
        c = np.asarray(coeffs_or_c, float)
        y = np.asarray(y, float)
    L = float(np.max(np.abs(y)))
    window = (L / 4, L / 2)
    sel = (np.abs(y) >= window[0]) & (np.abs(y) <= window[1]) & (np.abs(c) >= 1e-14)
    n = int(np.count_nonzero(sel))
    if n < 2:
        return DecayFit(K=0.0, k=np.inf, K_envelope=0.0, holds=True,
                        window=window, n_points=0)
    A = np.column_stack([np.abs(y[sel]), np.ones(n)])
    slope, intercept = np.linalg.lstsq(A, np.log(np.abs(c[sel])), rcond=None)[0]
    k = -float(slope)
    K = float(np.exp(intercept))
    K_infl = 1.01 * K
    if k <= 0:
        return DecayFit(K=K, k=k, K_envelope=np.inf, holds=False,
                        window=window, n_points=n)
    envelope = K_infl * np.exp(-k * np.abs(y))
    holds = bool(np.all(np.abs(c) <= envelope + 1e-300))
    K_env = K_infl if holds else float(np.max(np.abs(c) * np.exp(k * np.abs(y))))
    return DecayFit(K=K, k=k, K_envelope=K_env, holds=holds,
                    window=window, n_points=n)
