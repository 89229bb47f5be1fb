"""Vacuum two-point kernels pulled back to worldlines, detector spectra,
detailed-balance fits and the flat-space Hadamard coefficients.

Conventions: W(x, y) = (2 pi)^-3 integral exp(-i lambda dt + i xi.dx) / (2 lambda) d^3 xi,
regularised by exp(-eps lambda), i.e. dt -> dt - i eps.  For a massless
field on an inertial curve this is -1 / (4 pi^2 (dtau - i eps)^2).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy.optimize import brentq
from scipy.special import kv

from .coefficients import Coefficient
from .errors import FitError, NumericalError, QuadratureError, WorldlineKindError
from .quadrature import graded_edges, integrate_adaptive, panel_rule, richardson, uniform_panels
from .worldline import Inertial, Rindler, Worldline

log = logging.getLogger(__name__)

BACKENDS = ("closed-massless-inertial", "closed-massless-rindler", "mode-integral")
FOUR_PI2 = 4 * math.pi ** 2
ROTATION = math.pi / 3


def eps_schedule(start: float = 1e-2, stop: float = 1e-4) -> np.ndarray:
    """Geometric halving from ``start`` down to (at most one step past) ``stop``."""
    count = int(math.ceil(math.log2(start / stop))) + 1
    return start * 0.5 ** np.arange(count)


@dataclass
class PulledBackKernel:
    worldline: Worldline
    backend: str = "mode-integral"
    mass: float = 0.0
    eps: np.ndarray = field(default_factory=eps_schedule)

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown kernel backend {self.backend!r}")
        if self.mass < 0:
            raise ValueError("mass must be nonnegative")
        w = self.worldline
        if self.backend == "closed-massless-inertial" and not isinstance(w, Inertial):
            raise WorldlineKindError("closed inertial kernel needs an inertial worldline")
        if self.backend == "closed-massless-rindler" and not isinstance(w, Rindler):
            raise WorldlineKindError("closed Rindler kernel needs a Rindler worldline")
        if self.backend.startswith("closed") and self.mass != 0:
            raise ValueError("closed-form kernels are massless")
        if not w.is_proper_time:
            raise ValueError("kernels are pulled back in proper time")

    @property
    def stationary(self) -> bool:
        return isinstance(self.worldline, (Inertial, Rindler))

    def stationary_value(self, u, eps: float) -> np.ndarray:
        """W as a function of u = tau - tau' for stationary curves."""
        u = np.asarray(u, dtype=float)
        if self.backend == "closed-massless-inertial":
            return -1.0 / (FOUR_PI2 * (u - 1j * eps) ** 2)
        if self.backend == "closed-massless-rindler":
            a = self.worldline.a
            return -a * a / (4 * FOUR_PI2 * np.sinh(0.5 * a * (u - 1j * eps)) ** 2)
        w = self.worldline
        x = w.event(np.zeros_like(u))
        y = w.event(-u)
        return mode_integral(x - y, self.mass, eps)


def kernel_value(K: PulledBackKernel, tau, tau_prime, eps: float) -> np.ndarray:
    """W(gamma(tau), gamma(tau')) at regulator ``eps``."""
    tau, tau_prime = np.broadcast_arrays(np.asarray(tau, float), np.asarray(tau_prime, float))
    if eps <= 0:
        if np.any(tau == tau_prime):
            raise ValueError("kernel is singular at coincidence without a regulator")
        if K.backend == "mode-integral":
            raise ValueError("the mode-integral backend needs eps > 0")
    if K.backend.startswith("closed"):
        return K.stationary_value(tau - tau_prime, eps)
    w = K.worldline
    return mode_integral(w.event(tau) - w.event(tau_prime), K.mass, eps)


# ---------------------------------------------------------------------------
# Mode integral


def _radial_integrand(r, lam, dt, big_r, eps):
    decay = -lam * (eps + 1j * dt)
    if big_r == 0.0:
        return r * r / lam * np.exp(decay)
    # sin(r R) exp(decay) with exponents merged; on the rotated contour sin alone overflows
    wave = np.exp(decay + 1j * r * big_r) - np.exp(decay - 1j * r * big_r)
    return r * wave / (2j * lam * big_r)


def _mode_single(dt: float, big_r: float, mass: float, eps: float) -> complex:
    if dt < 0:
        return np.conj(_mode_single(-dt, big_r, mass, eps))
    if dt > big_r * (1 + 1e-3) + 1e-12:
        # rotate r -> s exp(-i phi): exp(-i lambda dt) decays faster than sin(r R) grows
        phase = np.exp(-1j * ROTATION)
        rate = math.sin(ROTATION) * (dt - big_r) + math.cos(ROTATION) * eps
        upper = 45.0 / rate
        freq = dt + big_r + mass

        def f(s):
            r = s * phase
            lam = np.sqrt(r * r + mass * mass)
            return _radial_integrand(r, lam, dt, big_r, eps) * phase

        panels = max(16, int(math.ceil(upper * freq / (2 * math.pi))))
        val = integrate_adaptive(f, 0.0, upper, rtol=1e-13, start_panels=panels)
        return complex(val) / FOUR_PI2
    # spacelike or near-null separation: exact closed form of the same integral
    z = big_r ** 2 - (dt - 1j * eps) ** 2
    if mass == 0:
        return 1.0 / (FOUR_PI2 * z)
    root = np.sqrt(z)
    return complex(mass * kv(1, mass * root) / (FOUR_PI2 * root))


def mode_integral(delta, mass: float, eps: float) -> np.ndarray:
    """Vacuum W for separations ``delta`` = x - y of shape (..., 4)."""
    delta = np.asarray(delta, dtype=float)
    flat = delta.reshape(-1, 4)
    out = np.empty(flat.shape[0], dtype=complex)
    for i, d in enumerate(flat):
        out[i] = _mode_single(float(d[0]), float(np.linalg.norm(d[1:])), mass, eps)
    return out.reshape(delta.shape[:-1])


def massive_closed_form(dtau, mass: float, eps: float) -> np.ndarray:
    """m K_1(m sqrt z) / (4 pi^2 sqrt z), z = -(dtau - i eps)^2, for a rest-frame separation."""
    z = -(np.asarray(dtau, dtype=float) - 1j * eps) ** 2
    if mass == 0:
        return 1.0 / (FOUR_PI2 * z)
    root = np.sqrt(z)
    return mass * kv(1, mass * root) / (FOUR_PI2 * root)


# ---------------------------------------------------------------------------
# Detector response


def autocorrelation(window: Coefficient, u) -> np.ndarray:
    """A(u) = integral f(tau) conj(f(tau - u)) d tau."""
    u = np.asarray(u, dtype=float)
    lo, hi = window.support
    panels = max(16, int(math.ceil(2 * (hi - lo) / window.smoothness_scale)))
    t, w = uniform_panels(lo, hi, panels)
    ft = w * window(t)
    out = np.empty(u.size, dtype=complex)
    flat = u.ravel()
    for s in range(0, flat.size, 512):
        uu = flat[s:s + 512]
        out[s:s + 512] = np.conj(window(t[None, :] - uu[:, None])) @ ft
    return out.reshape(u.shape)


def _u_rule(window: Coefficient, kernel_scale: float, eps: float):
    lo, hi = window.support
    span = min(hi - lo, kernel_scale)
    width = min(window.smoothness_scale, 0.25) / 2
    edges = graded_edges(-span, span, 0.0, eps / 8, width)
    return panel_rule(edges)


def _stationary_response(K: PulledBackKernel, window: Coefficient, omegas, eps: float):
    lo, hi = window.support
    scale = hi - lo
    if K.backend == "closed-massless-rindler":
        scale = min(scale, 45.0 / K.worldline.a)
    u, wts = _u_rule(window, scale, eps)
    acf = autocorrelation(window, u)
    kern = K.stationary_value(u, eps)
    omegas = np.asarray(omegas, dtype=float)
    return np.exp(-1j * np.outer(omegas, u)) @ (wts * kern * acf)


def _spectral_inertial(window: Coefficient, omegas, mass: float, eps: float = 0.0):
    """(1/4 pi^2) integral_m^inf sqrt(l^2-m^2) exp(-eps l) |f-hat(-(omega+l))|^2 dl."""
    omegas = np.asarray(omegas, dtype=float)
    out = np.empty(omegas.shape)
    smooth = window.smoothness_scale
    band = 40.0 / smooth
    for idx, om in np.ndenumerate(omegas):
        # the window transform confines omega + lambda to a few bandwidths around 0
        top = max(mass, -om) + band
        # lambda = m + s^2 keeps the threshold sqrt(lambda^2 - m^2) smooth
        panels = max(64, int(math.ceil(8 * (top - mass) * smooth)))
        s, ws = uniform_panels(0.0, math.sqrt(top - mass), panels)
        lam = mass + s * s
        amp = np.abs(window.fourier(-(om + lam))) ** 2
        vals = np.sqrt(np.maximum(lam * lam - mass * mass, 0.0)) * np.exp(-eps * lam) * amp * 2 * s
        out[idx] = np.sum(ws * vals) / FOUR_PI2
    return out


def default_backend(worldline: Worldline, mass: float = 0.0) -> str:
    """Closed form for the massless Rindler kernel, mode integral otherwise."""
    return "closed-massless-rindler" if isinstance(worldline, Rindler) and mass == 0 else "mode-integral"


def detector_response(worldline: Worldline, window: Coefficient, omegas, backend: str | None = None,
                      mass: float = 0.0, eps=None, grid=None) -> np.ndarray:
    """F(omega) = integral integral f(t) conj f(t') exp(-i omega (t - t')) W(t, t') dt dt'.

    Closed-form kernels are integrated in u = t - t' at each regulator of the
    schedule and extrapolated to eps -> 0.  The mode backend is evaluated
    spectrally on inertial curves and through the one-particle map otherwise.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if backend is None:
        backend = default_backend(worldline, mass)
    K = PulledBackKernel(worldline, backend, mass,
                         eps_schedule() if eps is None else np.atleast_1d(eps))
    if backend == "mode-integral":
        if isinstance(worldline, Inertial):
            return _spectral_inertial(window, omegas, mass)
        return _response_via_k(worldline, window, omegas, mass, grid)
    values = np.array([_stationary_response(K, window, omegas, e) for e in K.eps])
    if len(K.eps) == 1:
        result = values[0]
    else:
        result = richardson(values, K.eps)
    if not np.all(np.isfinite(result)):
        raise QuadratureError("non-finite detector response")
    return result.real


def _response_via_k(worldline, window, omegas, mass, grid):
    from .jetdistro import JetDistribution
    from .oneparticle import ModeGrid, default_r_max, detector_norm

    out = []
    for om in omegas:
        coeff = _modulated(window, om)
        T = JetDistribution(worldline, {(0, 0, 0): coeff})
        g = grid or ModeGrid(mass, default_r_max(T, mass), 24, 16)
        out.append(0.5 * detector_norm(T, g))
    return np.array(out)


class _Modulated(Coefficient):
    """f(t) exp(-i omega t)."""

    family = "modulated"

    def __init__(self, base: Coefficient, omega: float):
        self.base, self.omega = base, float(omega)
        self.support = base.support

    def _value(self, t):
        return self.base(t) * np.exp(-1j * self.omega * t)

    def _derivative(self, t):
        return (self.base.derivative(t) - 1j * self.omega * self.base(t)) * np.exp(-1j * self.omega * t)

    @property
    def smoothness_scale(self):
        return min(self.base.smoothness_scale, 1.0 / max(abs(self.omega), 1e-300))

    def fourier(self, rho):
        return self.base.fourier(np.asarray(rho, dtype=float) - self.omega)


def _modulated(window: Coefficient, omega: float) -> Coefficient:
    return _Modulated(window, omega)


def modulated_window(window: Coefficient, omega: float) -> Coefficient:
    """The coefficient f(t) exp(-i omega t) whose detector norm is 2 F(omega)."""
    return _Modulated(window, omega)


# ---------------------------------------------------------------------------
# Detailed balance


@dataclass
class KMSFit:
    beta: float
    stderr: float
    residual: float
    points_used: int
    omegas: np.ndarray
    log_ratios: np.ndarray

    def to_json(self) -> dict:
        return {"beta": self.beta, "stderr": self.stderr, "residual": self.residual,
                "points_used": self.points_used}


def kms_fit_from_spectrum(omegas, f_plus, f_minus, floor: float = 1e-12) -> KMSFit:
    """beta = -(through-origin slope of ln(F(omega)/F(-omega)) against omega)."""
    omegas = np.asarray(omegas, dtype=float)
    f_plus = np.asarray(f_plus, dtype=float)
    f_minus = np.asarray(f_minus, dtype=float)
    top = max(float(np.max(np.abs(f_plus))), float(np.max(np.abs(f_minus))))
    keep = (f_plus > floor * top) & (f_minus > floor * top)
    for om in omegas[~keep]:
        log.warning("dropping omega=%g: spectrum below the noise floor", om)
    if np.count_nonzero(keep) < 2:
        raise FitError("detailed-balance fit rejected: ratios below the noise floor")
    x = omegas[keep]
    y = np.log(f_plus[keep] / f_minus[keep])
    slope = float(x @ y / (x @ x))
    resid = y - slope * x
    dof = max(1, x.size - 1)
    stderr = float(math.sqrt(resid @ resid / dof / (x @ x)))
    return KMSFit(-slope, stderr, float(math.sqrt(np.mean(resid ** 2))), int(x.size), x, y)


def kms_fit(worldline: Worldline, window: Coefficient, omegas, backend: str | None = None,
            mass: float = 0.0, min_points: int = 4) -> KMSFit:
    """Fit the detailed-balance line on a symmetric omega grid."""
    omegas = np.asarray(omegas, dtype=float)
    positive = np.unique(np.abs(omegas[omegas != 0]))
    if positive.size < min_points:
        raise ValueError(f"need at least {min_points} positive frequencies")
    both = np.concatenate([positive, -positive])
    spec = detector_response(worldline, window, both, backend, mass)
    return kms_fit_from_spectrum(positive, spec[:positive.size], spec[positive.size:])


# ---------------------------------------------------------------------------
# Hadamard recursion


@dataclass
class HadamardCoefficients:
    mass: float
    values: list          # V_0 .. V_n as exact sympy numbers
    normalization: float  # c with (-1)^j V_j / j! = c * (Bessel Taylor coefficient)

    @property
    def floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])


def hadamard_recursion(mass, n: int) -> HadamardCoefficients:
    """V_0..V_n for the Klein-Gordon operator in Minkowski space.

    With the van Vleck determinant V_{-1} = Delta = 1 and straight geodesics
    x_s = y + s (x - y), each step is
        V_j = -(1/4) integral_0^1 s^j ((box - m^2) V_{j-1})(x_s) ds,
    evaluated symbolically.  Constants have vanishing box, which leaves
    V_j = (m^2/4) V_{j-1} / (j + 1).
    """
    if not 0 <= n <= 12:
        raise ValueError("order must be between 0 and 12")
    m = sp.nsimplify(mass)
    t, x, y, z, s = sp.symbols("t x y z s", real=True)

    def box(expr):
        return -sp.diff(expr, t, 2) + sp.diff(expr, x, 2) + sp.diff(expr, y, 2) + sp.diff(expr, z, 2)

    prev = sp.Integer(1)
    values = []
    for j in range(n + 1):
        source = box(prev) - m ** 2 * prev
        # V_{j-1} is constant along the geodesic, so the pull-back to x_s is trivial
        vj = sp.simplify(-sp.Rational(1, 4) * sp.integrate(s ** j * source, (s, 0, 1)))
        values.append(vj)
        prev = vj
    c = float(m) / 2.0
    return HadamardCoefficients(float(mass), values, c)


def bessel_taylor(mass: float, n: int) -> list:
    """Taylor coefficients in sigma of J_1(m sqrt(sigma)) / sqrt(sigma), exact."""
    m = sp.nsimplify(mass)
    return [(-1) ** k * (m / 2) ** (2 * k + 1) / (sp.factorial(k) * sp.factorial(k + 1))
            for k in range(n + 1)]


def bessel_comparison(coeffs: HadamardCoefficients) -> np.ndarray:
    """Relative deviations of (-1)^j V_j / j! from c times the Bessel series."""
    n = len(coeffs.values) - 1
    ref = bessel_taylor(coeffs.mass, n)
    if coeffs.mass == 0:
        return np.array([abs(float(v)) for v in coeffs.values])
    c = sp.nsimplify(coeffs.mass) / 2
    out = []
    for j, (v, b) in enumerate(zip(coeffs.values, ref)):
        lhs = (-1) ** j * v / sp.factorial(j)
        out.append(abs(float((lhs - c * b) / (c * b))))
    return np.array(out)


# ---------------------------------------------------------------------------
# Short-distance structure


@dataclass
class ShortDistanceReport:
    mass: float
    dtau: np.ndarray
    scaled: np.ndarray          # W * dtau^2 after eps -> 0
    scaled_by_eps: np.ndarray   # W * (dtau - i eps)^2 per eps (rows)
    eps: np.ndarray
    log_coefficient: float | None = None
    expected_log_coefficient: float | None = None
    condition: float | None = None

    def to_json(self) -> dict:
        return {"mass": self.mass, "dtau": self.dtau.tolist(),
                "modulus": np.abs(self.scaled).tolist(),
                "phase": np.angle(self.scaled).tolist(),
                "log_coefficient": self.log_coefficient,
                "expected_log_coefficient": self.expected_log_coefficient,
                "condition": self.condition}


def short_distance_check(mass: float, dtau, eps=None, worldline: Worldline | None = None,
                         max_condition: float = 1e8) -> ShortDistanceReport:
    """Leading Hadamard behaviour of the mode-integral kernel on an inertial geodesic."""
    dtau = np.asarray(dtau, dtype=float)
    if np.any(dtau <= 0) or np.any(dtau > 0.5):
        raise ValueError("separations must lie in (0, 0.5]")
    eps = eps_schedule(1e-2, 1e-4) if eps is None else np.asarray(eps, dtype=float)
    if np.max(eps) > 0.5 * np.min(dtau):
        raise ValueError("eps must be much smaller than the separations")
    w = worldline or Inertial()
    if not isinstance(w, Inertial):
        raise WorldlineKindError("short-distance check runs on an inertial geodesic")
    K = PulledBackKernel(w, "mode-integral", mass)
    rows = np.array([kernel_value(K, dtau, 0.0, e) for e in eps])
    by_eps = rows * (dtau[None, :] - 1j * eps[:, None]) ** 2
    limit = richardson(rows, eps)
    scaled = limit * dtau ** 2
    report = ShortDistanceReport(mass, dtau, scaled, by_eps, eps)
    if mass > 0:
        sigma = dtau ** 2
        y = (limit + 1.0 / (FOUR_PI2 * sigma)).real
        design = np.stack([np.ones_like(sigma), np.log(sigma)], axis=1)
        cond = float(np.linalg.cond(design))
        if cond > max_condition:
            raise FitError("separation grid too narrow to resolve the logarithm")
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        v0 = float(hadamard_recursion(mass, 0).values[0])
        report.log_coefficient = float(coef[1])
        report.expected_log_coefficient = v0 / FOUR_PI2
        report.condition = cond
    return report


# ---------------------------------------------------------------------------
# Commutator oracle


def pauli_jordan_smeared(a: Coefficient, w1: Worldline, b: Coefficient, w2: Worldline,
                         rtol: float = 1e-10) -> float:
    """Massless commutator function smeared along two curves, from its light-cone support.

    G(x, y) = -(1/2 pi) sgn(dt) delta(dt^2 - |dx|^2) with (dt, dx) = x - y, so
    for each t the inner integral collapses onto the roots s of
    F(s) = dt^2 - |dx|^2 with weight b(s) / |F'(s)|.
    """
    blo, bhi = b.support
    grid = np.linspace(blo, bhi, 513)
    ev2 = w2.event(grid)

    def inner(t):
        x = w1.event(np.array(t))
        d = x[None, :] - ev2
        F = d[:, 0] ** 2 - np.sum(d[:, 1:] ** 2, axis=1)

        def Fs(s):
            dd = x - w2.event(np.array(s))
            return dd[0] ** 2 - dd[1:] @ dd[1:]
        total = 0.0
        for i in np.nonzero(np.sign(F[:-1]) * np.sign(F[1:]) <= 0)[0]:
            if F[i] == 0 and i > 0:
                continue
            root = brentq(Fs, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15)
            dd = x - w2.event(np.array(root))
            u = w2.velocity(np.array(root))
            slope = -2 * dd[0] * u[0] + 2 * dd[1:] @ u[1:]
            total += np.sign(dd[0]) * b(np.array(root)).real / abs(slope)
        return total

    def outer(ts):
        return np.array([a(np.array(t)).real * inner(t) for t in ts])

    alo, ahi = a.support
    try:
        val = integrate_adaptive(outer, alo, ahi, rtol=rtol, start_panels=16, max_panels=1024)
    except QuadratureError as exc:
        raise NumericalError(str(exc)) from None
    return float(-val / (2 * math.pi))


__all__ = [
    "BACKENDS", "HadamardCoefficients", "KMSFit", "PulledBackKernel", "ShortDistanceReport",
    "autocorrelation", "bessel_comparison", "bessel_taylor", "default_backend",
    "detector_response", "eps_schedule", "hadamard_recursion", "kernel_value", "kms_fit",
    "kms_fit_from_spectrum", "massive_closed_form", "modulated_window", "mode_integral",
    "pauli_jordan_smeared", "short_distance_check",
]
