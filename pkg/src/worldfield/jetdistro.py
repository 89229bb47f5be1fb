"""Distributions supported on a worldline, in canonical jet-coefficient form.

A distribution of order l acts on a test function f as

    T(f) = sum_{|alpha| <= l} integral a_alpha(t) (e_1^a1 e_2^a2 e_3^a3 f)(gamma(t)) dt

with e_i the spatial legs of the Fermi-Walker frame.  Time derivatives are
never stored: they are folded into lower-order coefficients by partial
integration (``canonicalize``).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .coefficients import (Coefficient, NegDerivative, ScaledShift, Sum, Weighted,
                           coefficient_from_json)
from .errors import (DirectionError, DomainError, OrderError, WorldlineKindError)
from .quadrature import integrate_adaptive, panel_rule
from .testfunctions import Constant, PlaneWave, TestFunction
from .worldline import Inertial, Worldline, mdot, tetrad_at, tetrad_derivative

MultiIndex = tuple

N_MAX = 6.0
NOISE_FLOOR = 1e-13


def multi_indices(order: int) -> list[tuple[int, int, int]]:
    """All spatial multi-indices with |alpha| <= order, by degree."""
    out = []
    for deg in range(order + 1):
        for a1 in range(deg, -1, -1):
            for a2 in range(deg - a1, -1, -1):
                out.append((a1, a2, deg - a1 - a2))
    return out


def _check_alpha(alpha) -> tuple[int, int, int]:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != 3 or min(alpha) < 0:
        raise ValueError(f"multi-index must be three nonnegative integers, got {alpha}")
    return alpha


def _alpha_directions(alpha) -> list[int]:
    """Tetrad leg indices (1..3) to differentiate along, one per derivative."""
    return [i + 1 for i, a in enumerate(alpha) for _ in range(a)]


def _frames(w: Worldline, t) -> np.ndarray:
    return tetrad_at(w, t, "fermi-walker").vectors


class JetDistribution:
    """Canonical element of D^l(gamma): a map alpha -> a_alpha(t)."""

    def __init__(self, worldline: Worldline, coefficients: dict, order: int | None = None,
                 real: bool | None = None):
        coeffs = {}
        for alpha, c in coefficients.items():
            alpha = _check_alpha(alpha)
            if not isinstance(c, Coefficient):
                raise TypeError("coefficients must be Coefficient instances")
            coeffs[alpha] = Sum([coeffs[alpha], c]) if alpha in coeffs else c
        top = max((sum(a) for a in coeffs), default=0)
        order = top if order is None else int(order)
        if order < 0 or top > order:
            raise OrderError(f"multi-index of degree {top} exceeds order {order}")
        if order >= 1 and not worldline.is_proper_time:
            raise OrderError("derivative terms need a proper-time parametrization")
        if order >= 2 and not worldline.is_inertial:
            raise OrderError("order >= 2 is supported only on inertial worldlines")
        for c in coeffs.values():
            if not worldline.contains_interval(*c.support):
                raise DomainError(f"coefficient support {c.support} leaves the worldline domain")
        if real and not all(c.is_real for c in coeffs.values()):
            raise ValueError("realness flag set but a coefficient is complex")
        self.worldline = worldline
        self.order = order
        self.coefficients = coeffs

    # -- structure ---------------------------------------------------------
    @property
    def is_real(self) -> bool:
        return all(c.is_real for c in self.coefficients.values())

    @property
    def support(self) -> tuple[float, float]:
        if not self.coefficients:
            return (0.0, 0.0)
        return (min(c.support[0] for c in self.coefficients.values()),
                max(c.support[1] for c in self.coefficients.values()))

    def __iter__(self):
        return iter(self.coefficients.items())

    def _same_curve(self, other: "JetDistribution"):
        if other.worldline is not self.worldline:
            raise ValueError("distributions live on different worldlines")

    def __add__(self, other: "JetDistribution") -> "JetDistribution":
        self._same_curve(other)
        coeffs = dict(self.coefficients)
        for alpha, c in other.coefficients.items():
            coeffs[alpha] = Sum([coeffs[alpha], c]) if alpha in coeffs else c
        return JetDistribution(self.worldline, coeffs, max(self.order, other.order))

    def __mul__(self, scalar) -> "JetDistribution":
        scalar = complex(scalar)
        return JetDistribution(self.worldline, {a: ScaledShift(c, 0.0, scalar)
                                                for a, c in self.coefficients.items()},
                               self.order)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def conj(self) -> "JetDistribution":
        """Complex conjugate distribution: T-bar(f) = conj(T(conj f))."""
        return JetDistribution(self.worldline, {a: c.conj() for a, c in self.coefficients.items()},
                               self.order)

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {"order": self.order, "worldline_id": self.worldline.worldline_id,
                "terms": [{"alpha": list(a), "coeff": c.to_json()}
                          for a, c in sorted(self.coefficients.items())],
                "real": self.is_real}

    @classmethod
    def from_json(cls, spec: dict, worldlines) -> "JetDistribution":
        """Rebuild from JSON; ``worldlines`` is a Worldline or a mapping id -> Worldline."""
        if isinstance(worldlines, Worldline):
            w = worldlines
        else:
            try:
                w = worldlines[spec["worldline_id"]]
            except KeyError:
                raise ValueError(f"unknown worldline id {spec.get('worldline_id')!r}") from None
        try:
            coeffs = {tuple(t["alpha"]): coefficient_from_json(t["coeff"]) for t in spec["terms"]}
            order = int(spec["order"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed distribution JSON: {exc}") from None
        return cls(w, coeffs, order, spec.get("real"))


def zero(worldline: Worldline, order: int = 0) -> JetDistribution:
    return JetDistribution(worldline, {}, order)


# ---------------------------------------------------------------------------
# Pre-canonical first-order jets


@dataclass
class DirectionField:
    """A four-vector field along the curve.

    ``lab``: constant lab components; ``tetrad``: the Fermi-Walker leg
    ``index``; ``custom``: ``func(tau) -> (..., 4)`` with optional
    ``derivative(tau)`` (central differences otherwise).
    """

    kind: str
    vector: np.ndarray | None = None
    index: int | None = None
    func: Callable | None = None
    derivative_func: Callable | None = None

    @classmethod
    def lab(cls, vector):
        return cls("lab", vector=np.asarray(vector, dtype=float))

    @classmethod
    def tetrad(cls, index: int):
        if index not in (0, 1, 2, 3):
            raise ValueError("tetrad index must be 0..3")
        return cls("tetrad", index=index)

    @classmethod
    def custom(cls, func, derivative=None):
        return cls("custom", func=func, derivative_func=derivative)

    def value(self, w: Worldline, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        if self.kind == "lab":
            return np.broadcast_to(self.vector, tau.shape + (4,)).copy()
        if self.kind == "tetrad":
            return _frames(w, tau)[..., self.index, :]
        return np.asarray(self.func(tau), dtype=float)

    def derivative(self, w: Worldline, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        if self.kind == "lab":
            return np.zeros(tau.shape + (4,))
        if self.kind == "tetrad":
            return tetrad_derivative(w, tau)[..., self.index, :]
        if self.derivative_func is not None:
            return np.asarray(self.derivative_func(tau), dtype=float)
        h = 1e-4
        f = self.func
        return (f(tau - 2 * h) - 8 * f(tau - h) + 8 * f(tau + h) - f(tau + 2 * h)) / (12 * h)


@dataclass
class JetTerm:
    coeff: Coefficient
    direction: DirectionField | None = None
    derivatives: int = 0


@dataclass
class GeneralJet:
    """Sum of terms a(t) * (v(t) f)(gamma(t)) or a(t) f(gamma(t))."""

    worldline: Worldline
    terms: list = field(default_factory=list)

    def __post_init__(self):
        for term in self.terms:
            if term.derivatives not in (0, 1):
                raise OrderError("general jets carry at most one derivative per term")
            if term.derivatives == 1 and term.direction is None:
                raise ValueError("derivative term without a direction")
        if any(t.derivatives for t in self.terms) and not self.worldline.is_proper_time:
            raise OrderError("derivative terms need a proper-time parametrization")

    @property
    def order(self) -> int:
        return max((t.derivatives for t in self.terms), default=0)


def _term_list(T):
    """(coeff, directions(tau) -> list of (N,4) arrays, derivative count)."""
    w = T.worldline
    out = []
    if isinstance(T, JetDistribution):
        for alpha, c in T.coefficients.items():
            legs = _alpha_directions(alpha)

            def dirs(tau, legs=legs):
                if not legs:
                    return []
                frames = _frames(w, tau)
                return [frames[..., i, :] for i in legs]
            out.append((c, dirs, len(legs)))
    elif isinstance(T, GeneralJet):
        for term in T.terms:
            if term.derivatives == 0:
                out.append((term.coeff, lambda tau: [], 0))
            else:
                out.append((term.coeff, lambda tau, d=term.direction: [d.value(w, tau)], 1))
    else:
        raise TypeError(f"not a worldline distribution: {type(T).__name__}")
    return out


def _start_panels(c: Coefficient) -> int:
    lo, hi = c.support
    return max(8, int(np.ceil((hi - lo) / c.smoothness_scale)))


def evaluate_against(T, f: TestFunction, rtol: float = 1e-12) -> complex:
    """T(f) by adaptive Gauss-Legendre panels over each coefficient's support."""
    if isinstance(T, Mollified):
        return T.evaluate(f)
    w = T.worldline
    total = 0.0 + 0.0j
    for c, dirs, count in _term_list(T):
        if count > f.max_order:
            raise OrderError(f"test function supplies derivatives only to order {f.max_order}")

        def integrand(t, c=c, dirs=dirs):
            x = w.event(t)
            return c(t) * f.directional(x, dirs(t))
        lo, hi = c.support
        atol = 0.0
        if f.accuracy > 0:
            t, wts = panel_rule(np.linspace(lo, hi, 9))
            scale = max(1.0, float(np.max(np.abs(f(w.event(t))))))
            atol = f.accuracy * scale * float(np.sum(wts * np.abs(c(t))))
        total += complex(integrate_adaptive(integrand, lo, hi, rtol=rtol, atol=atol,
                                            start_panels=_start_panels(c)))
    return total


# ---------------------------------------------------------------------------
# Canonicalization


def _components(w: Worldline, v: np.ndarray, tau) -> tuple[np.ndarray, np.ndarray]:
    """Frame components v^0 = -g(v, e0), v^i = g(v, e_i)."""
    frames = _frames(w, tau)
    v0 = -mdot(v, frames[..., 0, :])
    vi = np.stack([mdot(v, frames[..., i, :]) for i in (1, 2, 3)], axis=-1)
    return v0, vi


def _component_derivatives(w: Worldline, d: DirectionField, tau):
    v = d.value(w, tau)
    dv = d.derivative(w, tau)
    frames = _frames(w, tau)
    dframes = tetrad_derivative(w, tau)
    dv0 = -(mdot(dv, frames[..., 0, :]) + mdot(v, dframes[..., 0, :]))
    dvi = np.stack([mdot(dv, frames[..., i, :]) + mdot(v, dframes[..., i, :])
                    for i in (1, 2, 3)], axis=-1)
    return dv0, dvi


def canonicalize(G: GeneralJet) -> JetDistribution:
    """Fold time derivatives into lower order: a (e0 f) -> -(a)' f."""
    w = G.worldline
    coeffs: dict[tuple, list] = {}

    def add(alpha, c):
        coeffs.setdefault(alpha, []).append(c)

    for term in G.terms:
        c = term.coeff
        if term.derivatives == 0:
            add((0, 0, 0), c)
            continue
        d = term.direction
        lo, hi = c.support
        probe = np.linspace(lo, hi, 33)
        v0, vi = _components(w, d.value(w, probe), probe)
        if not (np.all(np.isfinite(v0)) and np.all(np.isfinite(vi))):
            raise DirectionError("direction field has non-finite tetrad components")
        if d.kind == "tetrad":
            # constant components: no weights needed
            if d.index == 0:
                add((0, 0, 0), NegDerivative(c))
            else:
                alpha = [0, 0, 0]
                alpha[d.index - 1] = 1
                add(tuple(alpha), c)
            continue

        def comp(tau, k, d=d):
            v0, vi = _components(w, d.value(w, tau), tau)
            return v0 if k == 0 else vi[..., k - 1]

        def dcomp(tau, k, d=d):
            dv0, dvi = _component_derivatives(w, d, tau)
            return dv0 if k == 0 else dvi[..., k - 1]

        if np.any(np.abs(v0) > 0):
            add((0, 0, 0), NegDerivative(Weighted(c, lambda t, k=0, f=comp: f(t, k),
                                                  lambda t, k=0, f=dcomp: f(t, k))))
        for k in (1, 2, 3):
            if np.any(np.abs(vi[:, k - 1]) > 0):
                alpha = [0, 0, 0]
                alpha[k - 1] = 1
                add(tuple(alpha), Weighted(c, lambda t, k=k, f=comp: f(t, k),
                                           lambda t, k=k, f=dcomp: f(t, k)))
    merged = {a: (cs[0] if len(cs) == 1 else Sum(cs)) for a, cs in coeffs.items()}
    return JetDistribution(w, merged, G.order)


# ---------------------------------------------------------------------------
# Fourier transforms


def _check_at_rest(w: Worldline):
    if not (isinstance(w, Inertial) and w.at_rest):
        raise WorldlineKindError("closed-form transform needs an inertial worldline at rest")


def fourier_transform(T: JetDistribution, rho, xi) -> np.ndarray:
    """T(exp(i(rho t - xi.x))) for a distribution on an inertial curve at rest.

    Vectorised: ``rho`` has shape S and ``xi`` shape S + (3,).
    """
    if isinstance(T, Mollified):
        return T.fourier_transform(rho, xi)
    _check_at_rest(T.worldline)
    rho = np.asarray(rho, dtype=float)
    xi = np.asarray(xi, dtype=float)
    rho, _ = np.broadcast_arrays(rho, xi[..., 0])
    origin = T.worldline.origin
    total = np.zeros(rho.shape, dtype=complex)
    for alpha, c in T.coefficients.items():
        poly = (-1j) ** sum(alpha) * np.prod(xi ** np.asarray(alpha), axis=-1)
        total += poly * c.fourier(rho)
    return total * np.exp(1j * (rho * origin[0] - xi @ origin[1:]))


PHASE_PANEL_NODES = 8
PHASE_PER_PANEL = np.pi / 2


def _phase_edges(w: Worldline, lo: float, hi: float, kmax: float, smooth: float) -> np.ndarray:
    """Panel edges with at most ``PHASE_PER_PANEL`` of phase and half ``smooth`` per panel."""
    fine = np.linspace(lo, hi, 1025)
    u = w.velocity(fine)
    rate = kmax * (np.abs(u[:, 0]) + np.linalg.norm(u[:, 1:], axis=1))
    phase = np.concatenate([[0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(fine))])
    # each panel gets at most one unit of the combined phase + length measure
    measure = phase / PHASE_PER_PANEL + 2.0 * (fine - lo) / smooth
    count = max(8, int(np.ceil(measure[-1])))
    return np.interp(np.linspace(0.0, measure[-1], count + 1), measure, fine)


def plane_wave_response(T, k, chunk: int = 256) -> np.ndarray:
    """T(exp(-i g(k, x))) for covectors ``k`` of shape (..., 4), any curve.

    Panels span at most pi/2 of phase and half a smoothness length; an
    8-point Gauss rule on such panels is accurate to rounding.
    """
    k = np.asarray(k, dtype=float)
    flat = k.reshape(-1, 4)
    out = np.zeros(flat.shape[0], dtype=complex)
    w = T.worldline
    terms = _term_list(T)
    if not terms:
        return out.reshape(k.shape[:-1])
    # all terms share one node set over the union of supports
    lo = min(c.support[0] for c, _, _ in terms)
    hi = max(c.support[1] for c, _, _ in terms)
    smooth = min(c.smoothness_scale for c, _, _ in terms)
    constant_frame = w.is_inertial
    norms = np.linalg.norm(flat, axis=1)
    order = np.argsort(norms)
    for start in range(0, flat.shape[0], chunk):
        idx = order[start:start + chunk]
        edges = _phase_edges(w, lo, hi, norms[idx[-1]], smooth)
        t, wts = panel_rule(edges, PHASE_PANEL_NODES)
        x = w.event(t)
        kk = flat[idx]
        phase = np.exp(-1j * (-np.outer(kk[:, 0], x[:, 0]) + kk[:, 1:] @ x[:, 1:].T))
        for c, dirs, count in terms:
            weights = wts * c(t)
            if count == 0:
                out[idx] += phase @ weights
            elif constant_frame:
                factor = np.ones(idx.size, dtype=complex)
                for v in dirs(t[:1]):
                    factor *= -1j * mdot(kk, v[0])
                out[idx] += factor * (phase @ weights)
            else:
                m = phase.copy()
                for v in dirs(t):
                    m *= -1j * (-np.outer(kk[:, 0], v[:, 0]) + kk[:, 1:] @ v[:, 1:].T)
                out[idx] += m @ weights
    return out.reshape(k.shape[:-1])


def fourier_transform_numeric(T, k) -> np.ndarray:
    """Direct quadrature of T against the plane wave exp(i(k0 t - k.x))."""
    if isinstance(T, Mollified):
        k = np.asarray(k, dtype=float)
        return T.multiplier(k) * fourier_transform_numeric(T.base, k)
    return plane_wave_response(T, k)


# ---------------------------------------------------------------------------
# Mollification


def mollifier_profile(s) -> np.ndarray:
    """m-hat(s) = exp(-s^4 / (1 - s^2)) on s < 1, zero beyond; m-hat(0) = 1."""
    s = np.asarray(s, dtype=float)
    inside = s < 1.0
    q = np.where(inside, 1.0 - s * s, 1.0)
    return np.where(inside, np.exp(-s ** 4 / q), 0.0)


class Mollified:
    """T convolved with a unit-mass mollifier at scale k, kept in transform space."""

    def __init__(self, base: JetDistribution, scale: float):
        if not scale > 0:
            raise ValueError("mollification scale must be positive")
        self.base = base
        self.scale = float(scale)
        self.worldline = base.worldline
        self.order = base.order

    def multiplier(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        return mollifier_profile(np.linalg.norm(k, axis=-1) / self.scale)

    def fourier_transform(self, rho, xi) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        xi = np.asarray(xi, dtype=float)
        k = np.concatenate([np.broadcast_to(rho, xi.shape[:-1])[..., None], xi], axis=-1)
        return self.multiplier(k) * fourier_transform(self.base, rho, xi)

    def evaluate(self, f: TestFunction) -> complex:
        """Only plane waves and constants are supported (transform space)."""
        if isinstance(f, Constant):
            return f.value * complex(self.evaluate(PlaneWave(np.zeros(4))))
        if isinstance(f, PlaneWave):
            return complex(self.multiplier(f.k) * fourier_transform_numeric(self.base, f.k))
        raise TypeError("mollified distributions are evaluated on plane waves only")


def mollify(T: JetDistribution, k: float) -> Mollified:
    return Mollified(T, k)


# ---------------------------------------------------------------------------
# Push-forward along the curve


def pushforward(T: JetDistribution, t: float, rule: str = "fermi-walker") -> JetDistribution:
    """Translate T by parameter ``t`` along its worldline.

    Under ``fermi-walker`` each frame leg is carried to the frame at the
    shifted point, so the coefficients are simply a_alpha(. - t).  Under
    ``parallel-lab`` the leg keeps its lab components and is re-expressed
    (and canonicalized) at the new point.
    """
    if rule not in ("fermi-walker", "parallel-lab"):
        raise ValueError(f"unknown transport rule {rule!r}")
    w = T.worldline
    lo, hi = T.support
    if T.coefficients and not w.contains_interval(lo + t, hi + t):
        raise DomainError("shifted support leaves the worldline domain")
    if T.order >= 2 and not w.is_inertial:
        raise OrderError("push-forward of order >= 2 needs an inertial worldline")
    shifted = {a: ScaledShift(c, t) for a, c in T.coefficients.items()}
    if rule == "fermi-walker" or w.is_inertial or T.order == 0:
        return JetDistribution(w, shifted, T.order)
    terms = []
    for alpha, c in shifted.items():
        if sum(alpha) == 0:
            terms.append(JetTerm(c))
            continue
        leg = alpha.index(1) + 1
        direction = DirectionField.custom(
            lambda tau, leg=leg: _frames(w, np.asarray(tau) - t)[..., leg, :],
            lambda tau, leg=leg: tetrad_derivative(w, np.asarray(tau) - t)[..., leg, :])
        terms.append(JetTerm(c, direction, 1))
    return canonicalize(GeneralJet(w, terms))


# ---------------------------------------------------------------------------
# Wave front scanner


@dataclass
class DirectionSample:
    direction: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    slope: float
    singular: bool
    noise: bool = False

    @property
    def classification(self) -> str:
        return "singular" if self.singular else "regular"


def _transform_function(T):
    if hasattr(T, "fourier") and not isinstance(T, JetDistribution):
        return T.fourier
    if isinstance(T, Mollified):
        return lambda k: T.multiplier(k) * _transform_function(T.base)(k)
    w = T.worldline
    if isinstance(w, Inertial) and w.at_rest:
        return lambda k: fourier_transform(T, k[..., 0], k[..., 1:])
    return lambda k: fourier_transform_numeric(T, k)


def geometric_radii(lo: float, hi: float, per_decade: int = 10) -> np.ndarray:
    decades = math.log10(hi / lo)
    return np.geomspace(lo, hi, int(round(decades * per_decade)) + 1)


def wavefront_scan(T, directions, radii, n_max: float = N_MAX,
                   floor: float = NOISE_FLOOR) -> list[DirectionSample]:
    """Classify covector directions by the growth of |T-hat(R n)| over the top decade."""
    radii = np.sort(np.asarray(radii, dtype=float))
    if radii[0] <= 0:
        raise ValueError("radii must be positive")
    decades = math.log10(radii[-1] / radii[0])
    if decades < 3 - 1e-9:
        raise ValueError("radii must span at least three decades")
    if radii.size - 1 < 8 * decades - 1e-9:
        raise ValueError("need at least eight radii per decade")
    dirs = np.asarray(directions, dtype=float).reshape(-1, 4)
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    transform = _transform_function(T)
    k = dirs[:, None, :] * radii[None, :, None]
    values = np.abs(np.asarray(transform(k)))
    peak = max(float(np.max(values)), float(np.abs(transform(np.zeros((1, 4))))[0]))
    cutoff = floor * peak
    top = radii >= radii[-1] / 10.0 * (1 - 1e-12)
    out = []
    for n, v in zip(dirs, values):
        keep = top & (v > cutoff)
        if np.count_nonzero(keep) < 3:
            out.append(DirectionSample(n, radii, v, -np.inf, False, True))
            continue
        slope = float(np.polyfit(np.log(radii[keep]), np.log(v[keep]), 1)[0])
        # a sample that drops under the floor inside the window means faster-than-polynomial decay
        decays = np.count_nonzero(top & ~(v > cutoff)) > 0
        singular = slope >= -n_max and not decays
        out.append(DirectionSample(n, radii, v, slope, bool(singular), False))
    return out


def write_scan_csv(samples: Iterable[DirectionSample], target):
    """Rows n0, n1, n2, n3, slope, class; ``target`` is a path or a text stream."""
    if not hasattr(target, "write"):
        with open(target, "w", newline="") as fh:
            return write_scan_csv(samples, fh)
    wr = csv.writer(target, lineterminator="\n")
    wr.writerow(["n0", "n1", "n2", "n3", "slope", "class"])
    for s in samples:
        wr.writerow([*("%.17g" % x for x in s.direction), "%.17g" % s.slope,
                     s.classification])


def random_directions(count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on S^3."""
    v = rng.standard_normal((count, 4))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def spatial_directions(count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on the equator rho = 0 of S^3."""
    v = rng.standard_normal((count, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return np.concatenate([np.zeros((count, 1)), v], axis=1)


def tilted_directions(count: int, rng: np.random.Generator, minimum: float = 0.1) -> np.ndarray:
    """Directions on S^3 whose time component has modulus at least ``minimum``."""
    n0 = rng.uniform(minimum, 1.0, count) * rng.choice([-1.0, 1.0], count)
    v = rng.standard_normal((count, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return np.concatenate([n0[:, None], np.sqrt(1 - n0[:, None] ** 2) * v], axis=1)


def expected_degree(T: JetDistribution) -> int:
    """Highest |alpha| whose coefficient has nonzero zero-frequency transform."""
    best = 0
    for alpha, c in T.coefficients.items():
        if abs(complex(c.fourier(np.array(0.0)))) > 0 and sum(alpha) > best:
            best = sum(alpha)
    return best


__all__ = [
    "DirectionField", "DirectionSample", "GeneralJet", "JetDistribution", "JetTerm",
    "Mollified", "canonicalize", "evaluate_against", "expected_degree", "fourier_transform",
    "fourier_transform_numeric", "geometric_radii", "mollifier_profile", "mollify",
    "multi_indices", "plane_wave_response", "pushforward", "random_directions",
    "spatial_directions", "tilted_directions", "wavefront_scan", "write_scan_csv", "zero",
]
