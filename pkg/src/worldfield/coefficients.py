"""Coefficient functions a_alpha(t) of jet distributions.

All coefficients are compactly supported (the Gaussian family is cut at
eight widths, where it is below 1.3e-14 of its peak).  Each exposes its
values, its first derivative and its transform

    fourier(rho) = integral of exp(i rho t) a(t) dt,

in closed form where one exists and by lambda-adaptive Gauss-Legendre
panels otherwise.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline

from .quadrature import NODES_PER_PANEL, oscillatory_panel_count, uniform_panels

GAUSS_CUT = 8.0


class Coefficient:
    family = "abstract"
    support: tuple[float, float]

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        lo, hi = self.support
        inside = (t >= lo) & (t <= hi)
        out = np.zeros(t.shape, dtype=complex)
        if np.any(inside):
            out[inside] = self._value(t[inside])
        return out

    def derivative(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        lo, hi = self.support
        inside = (t >= lo) & (t <= hi)
        out = np.zeros(t.shape, dtype=complex)
        if np.any(inside):
            out[inside] = self._derivative(t[inside])
        return out

    def _value(self, t):
        raise NotImplementedError

    def _derivative(self, t):
        raise NotImplementedError(f"{type(self).__name__} has no derivative")

    @property
    def is_real(self) -> bool:
        return False

    @property
    def smoothness_scale(self) -> float:
        """Length over which the coefficient varies appreciably."""
        lo, hi = self.support
        return (hi - lo) / 8.0

    def fourier(self, rho) -> np.ndarray:
        return numeric_fourier(self, rho)

    def conj(self) -> "Coefficient":
        return Conjugate(self)

    def shifted(self, shift: float, scale: complex = 1.0) -> "Coefficient":
        return ScaledShift(self, shift, scale)

    def to_json(self) -> dict:
        return tabulate(self).to_json()


def numeric_fourier(coeff: Coefficient, rho, nodes: int = NODES_PER_PANEL) -> np.ndarray:
    """Panel quadrature of exp(i rho t) a(t) with panel width <= pi/(4|rho|)."""
    rho = np.asarray(rho, dtype=float)
    flat = rho.ravel()
    lo, hi = coeff.support
    out = np.empty(flat.shape, dtype=complex)
    base = max(8, int(np.ceil((hi - lo) / coeff.smoothness_scale)))
    order = np.argsort(np.abs(flat))
    for c0 in range(0, flat.size, 64):
        idx = order[c0:c0 + 64]
        panels = max(base, oscillatory_panel_count(hi - lo, abs(flat[idx[-1]])))
        t, w = uniform_panels(lo, hi, panels, nodes)
        out[idx] = np.exp(1j * np.outer(flat[idx], t)) @ (w * coeff(t))
    return out.reshape(rho.shape)


class GaussianBump(Coefficient):
    """amplitude * exp(-(t-c)^2 / (2 width^2)) * exp(-i omega t)."""

    family = "gaussian-bump"

    def __init__(self, center: float = 0.0, width: float = 1.0, amplitude: complex = 1.0,
                 omega: float = 0.0):
        if not width > 0:
            raise ValueError("width must be positive")
        self.center, self.width = float(center), float(width)
        self.amplitude, self.omega = complex(amplitude), float(omega)
        self.support = (self.center - GAUSS_CUT * self.width, self.center + GAUSS_CUT * self.width)

    def _value(self, t):
        x = (t - self.center) / self.width
        return self.amplitude * np.exp(-0.5 * x * x - 1j * self.omega * t)

    def _derivative(self, t):
        return self._value(t) * (-(t - self.center) / self.width ** 2 - 1j * self.omega)

    @property
    def is_real(self):
        return self.omega == 0.0 and self.amplitude.imag == 0.0

    @property
    def smoothness_scale(self):
        return min(self.width, 1.0 / max(abs(self.omega), 1e-300))

    def fourier(self, rho):
        k = np.asarray(rho, dtype=float) - self.omega
        return (self.amplitude * math.sqrt(2 * math.pi) * self.width
                * np.exp(1j * k * self.center - 0.5 * (self.width * k) ** 2))

    def to_json(self):
        return {"family": self.family, "params": {
            "center": self.center, "width": self.width,
            "amplitude": [self.amplitude.real, self.amplitude.imag], "omega": self.omega}}


class CosinePowerBump(Coefficient):
    """amplitude * cos(pi s / 2)^power for |s| <= 1, s = (t-c)/half_width, times exp(-i omega t)."""

    family = "cosine-power"

    def __init__(self, center: float = 0.0, half_width: float = 1.0, power: int = 4,
                 amplitude: complex = 1.0, omega: float = 0.0):
        if not half_width > 0 or int(power) < 2:
            raise ValueError("need half_width > 0 and power >= 2")
        self.center, self.half_width, self.power = float(center), float(half_width), int(power)
        self.amplitude, self.omega = complex(amplitude), float(omega)
        self.support = (self.center - self.half_width, self.center + self.half_width)

    def _value(self, t):
        s = (t - self.center) / self.half_width
        return self.amplitude * np.cos(0.5 * np.pi * s) ** self.power * np.exp(-1j * self.omega * t)

    def _derivative(self, t):
        s = (t - self.center) / self.half_width
        c, sn = np.cos(0.5 * np.pi * s), np.sin(0.5 * np.pi * s)
        p = self.power
        d = -p * c ** (p - 1) * sn * (0.5 * np.pi / self.half_width)
        return self.amplitude * np.exp(-1j * self.omega * t) * (d - 1j * self.omega * c ** p)

    @property
    def is_real(self):
        return self.omega == 0.0 and self.amplitude.imag == 0.0

    @property
    def smoothness_scale(self):
        return min(self.half_width / 4.0, 1.0 / max(abs(self.omega), 1e-300))

    def fourier(self, rho):
        # cos^p(x) = 2^-p sum_k C(p,k) exp(i (p-2k) x), x = pi (t-c) / (2 w)
        k = np.asarray(rho, dtype=float) - self.omega
        w, p = self.half_width, self.power
        total = np.zeros(k.shape, dtype=complex)
        for j in range(p + 1):
            kappa = k + (p - 2 * j) * np.pi / (2 * w)
            total += math.comb(p, j) * 2 * w * np.sinc(kappa * w / np.pi)
        return self.amplitude * np.exp(1j * k * self.center) * total / 2 ** p

    def to_json(self):
        return {"family": self.family, "params": {
            "center": self.center, "half_width": self.half_width, "power": self.power,
            "amplitude": [self.amplitude.real, self.amplitude.imag], "omega": self.omega}}


class SmoothBump(Coefficient):
    """amplitude * exp(-1/(1-s^2)) for |s| < 1, times exp(-i omega t)."""

    family = "smooth-bump"

    def __init__(self, center: float = 0.0, half_width: float = 1.0, amplitude: complex = 1.0,
                 omega: float = 0.0):
        if not half_width > 0:
            raise ValueError("half_width must be positive")
        self.center, self.half_width = float(center), float(half_width)
        self.amplitude, self.omega = complex(amplitude), float(omega)
        self.support = (self.center - self.half_width, self.center + self.half_width)

    def _core(self, t):
        s = (t - self.center) / self.half_width
        q = 1.0 - s * s
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            val = np.where(q > 0, np.exp(-1.0 / np.where(q > 0, q, 1.0)), 0.0)
            dval = np.where(q > 0, val * (-2.0 * s / np.where(q > 0, q, 1.0) ** 2), 0.0)
        return val, dval / self.half_width

    def _value(self, t):
        return self.amplitude * self._core(t)[0] * np.exp(-1j * self.omega * t)

    def _derivative(self, t):
        v, dv = self._core(t)
        return self.amplitude * np.exp(-1j * self.omega * t) * (dv - 1j * self.omega * v)

    @property
    def is_real(self):
        return self.omega == 0.0 and self.amplitude.imag == 0.0

    @property
    def smoothness_scale(self):
        return min(self.half_width / 16.0, 1.0 / max(abs(self.omega), 1e-300))

    def to_json(self):
        return {"family": self.family, "params": {
            "center": self.center, "half_width": self.half_width,
            "amplitude": [self.amplitude.real, self.amplitude.imag], "omega": self.omega}}


class Tabulated(Coefficient):
    """Complex samples on a uniform grid, cubic-spline interpolated.

    The transform is exact for the spline interpolant (a Filon-type rule:
    each cubic piece is integrated against the exponential analytically).
    """

    family = "tabulated"

    def __init__(self, t0: float, dt: float, samples, tol: float = 1e-12):
        samples = np.asarray(samples, dtype=complex)
        if samples.ndim != 1 or samples.size < 4:
            raise ValueError("need at least four samples")
        scale = max(np.max(np.abs(samples)), 1e-300)
        if abs(samples[0]) > tol * scale or abs(samples[-1]) > tol * scale:
            raise ValueError("tabulated samples must vanish at the support endpoints")
        self.t0, self.dt, self.samples = float(t0), float(dt), samples
        self.grid = self.t0 + self.dt * np.arange(samples.size)
        self.support = (self.grid[0], self.grid[-1])
        self._spline = CubicSpline(self.grid, samples, bc_type="clamped")

    def _value(self, t):
        return self._spline(t)

    def _derivative(self, t):
        return self._spline(t, 1)

    @property
    def is_real(self):
        return bool(np.all(self.samples.imag == 0))

    @property
    def smoothness_scale(self):
        return self.dt

    def fourier(self, rho):
        rho = np.asarray(rho, dtype=float)
        c = self._spline.c  # (4, n-1) highest power first
        h = self.dt
        starts = self.grid[:-1]
        out = np.empty(rho.shape, dtype=complex)
        for idx, r in np.ndenumerate(rho):
            m = _power_moments(r, h, 3)
            piece = c[3] * m[0] + c[2] * m[1] + c[1] * m[2] + c[0] * m[3]
            out[idx] = np.sum(np.exp(1j * r * starts) * piece)
        return out

    def to_json(self):
        return {"grid": {"t0": self.t0, "dt": self.dt, "re": self.samples.real.tolist(),
                         "im": self.samples.imag.tolist()}, "support": list(self.support)}


def _power_moments(rho: float, h: float, kmax: int) -> np.ndarray:
    """M_k = integral_0^h u^k exp(i rho u) du for k = 0..kmax."""
    z = rho * h
    if abs(z) < 1.0:
        # series: sum_n (i z)^n / (n! (n+k+1)) * h^(k+1)
        n = np.arange(40)
        terms = (1j * z) ** n / np.array([math.factorial(int(i)) for i in n], dtype=float)
        return np.array([h ** (k + 1) * np.sum(terms / (n + k + 1)) for k in range(kmax + 1)])
    e = np.exp(1j * z)
    m = np.empty(kmax + 1, dtype=complex)
    m[0] = (e - 1.0) / (1j * rho)
    for k in range(1, kmax + 1):
        m[k] = (h ** k * e - k * m[k - 1]) / (1j * rho)
    return m


class ScaledShift(Coefficient):
    """scale * base(t - shift)."""

    family = "shifted"

    def __init__(self, base: Coefficient, shift: float = 0.0, scale: complex = 1.0):
        if isinstance(base, ScaledShift):
            shift += base.shift
            scale *= base.scale
            base = base.base
        self.base, self.shift, self.scale = base, float(shift), complex(scale)
        lo, hi = base.support
        self.support = (lo + self.shift, hi + self.shift)

    def _value(self, t):
        return self.scale * self.base(t - self.shift)

    def _derivative(self, t):
        return self.scale * self.base.derivative(t - self.shift)

    @property
    def is_real(self):
        return self.base.is_real and self.scale.imag == 0.0

    @property
    def smoothness_scale(self):
        return self.base.smoothness_scale

    def fourier(self, rho):
        rho = np.asarray(rho, dtype=float)
        return self.scale * np.exp(1j * rho * self.shift) * self.base.fourier(rho)

    def to_json(self):
        return {"family": self.family, "params": {
            "shift": self.shift, "scale": [self.scale.real, self.scale.imag]},
            "base": self.base.to_json()}


class Conjugate(Coefficient):
    family = "conjugate"

    def __init__(self, base: Coefficient):
        self.base = base
        self.support = base.support

    def _value(self, t):
        return np.conj(self.base(t))

    def _derivative(self, t):
        return np.conj(self.base.derivative(t))

    def conj(self):
        return self.base

    @property
    def is_real(self):
        return self.base.is_real

    @property
    def smoothness_scale(self):
        return self.base.smoothness_scale

    def fourier(self, rho):
        return np.conj(self.base.fourier(-np.asarray(rho, dtype=float)))

    def to_json(self):
        return {"family": self.family, "params": {}, "base": self.base.to_json()}


class Sum(Coefficient):
    family = "sum"

    def __init__(self, terms):
        flat = []
        for term in terms:
            flat.extend(term.terms if isinstance(term, Sum) else [term])
        if not flat:
            raise ValueError("empty sum")
        self.terms = flat
        self.support = (min(t.support[0] for t in flat), max(t.support[1] for t in flat))

    def _value(self, t):
        return sum(term(t) for term in self.terms)

    def _derivative(self, t):
        return sum(term.derivative(t) for term in self.terms)

    @property
    def is_real(self):
        return all(term.is_real for term in self.terms)

    @property
    def smoothness_scale(self):
        return min(term.smoothness_scale for term in self.terms)

    def fourier(self, rho):
        return sum(term.fourier(rho) for term in self.terms)

    def to_json(self):
        return {"family": self.family, "params": {},
                "terms": [term.to_json() for term in self.terms]}


class Weighted(Coefficient):
    """weight(t) * base(t) for a smooth real weight with known derivative."""

    family = "weighted"

    def __init__(self, base: Coefficient, weight, weight_derivative):
        self.base, self.weight, self.weight_derivative = base, weight, weight_derivative
        self.support = base.support

    def _value(self, t):
        return self.weight(t) * self.base(t)

    def _derivative(self, t):
        return self.weight_derivative(t) * self.base(t) + self.weight(t) * self.base.derivative(t)

    @property
    def is_real(self):
        return self.base.is_real

    @property
    def smoothness_scale(self):
        return self.base.smoothness_scale


class NegDerivative(Coefficient):
    """-d/dt of a base coefficient (the partial-integration image of a time derivative)."""

    family = "neg-derivative"

    def __init__(self, base: Coefficient):
        self.base = base
        self.support = base.support

    def _value(self, t):
        return -self.base.derivative(t)

    @property
    def is_real(self):
        return self.base.is_real

    @property
    def smoothness_scale(self):
        return self.base.smoothness_scale

    def fourier(self, rho):
        # integral e^{i rho t} (-a'(t)) dt = i rho * a_hat(rho)
        rho = np.asarray(rho, dtype=float)
        return 1j * rho * self.base.fourier(rho)

    def to_json(self):
        if isinstance(self.base, Weighted):
            return tabulate(self).to_json()
        return {"family": self.family, "params": {}, "base": self.base.to_json()}


def tabulate(coeff: Coefficient, points: int = 2049) -> Tabulated:
    """Sample a coefficient onto a uniform grid over its support."""
    lo, hi = coeff.support
    grid = np.linspace(lo, hi, points)
    samples = coeff(grid)
    samples[0] = samples[-1] = 0.0
    return Tabulated(lo, grid[1] - grid[0], samples)


_FAMILIES = {
    "gaussian-bump": GaussianBump,
    "cosine-power": CosinePowerBump,
    "smooth-bump": SmoothBump,
}


def _complex(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def coefficient_from_json(spec: dict) -> Coefficient:
    if "grid" in spec:
        g = spec["grid"]
        samples = np.asarray(g["re"], dtype=float) + 1j * np.asarray(g.get("im", [0.0] * len(g["re"])))
        return Tabulated(g["t0"], g["dt"], samples)
    family = spec.get("family")
    params = dict(spec.get("params", {}))
    if "amplitude" in params:
        params["amplitude"] = _complex(params["amplitude"])
    if family in _FAMILIES:
        return _FAMILIES[family](**params)
    if family == "shifted":
        return ScaledShift(coefficient_from_json(spec["base"]), params.get("shift", 0.0),
                           _complex(params.get("scale", 1.0)))
    if family == "conjugate":
        return Conjugate(coefficient_from_json(spec["base"]))
    if family == "sum":
        return Sum([coefficient_from_json(t) for t in spec["terms"]])
    if family == "neg-derivative":
        return NegDerivative(coefficient_from_json(spec["base"]))
    raise ValueError(f"unknown coefficient family {family!r}")
