"""Timelike worldlines in Minkowski space and their adapted frames.

Signature is (-,+,+,+) throughout.  Every built-in family knows its event,
four-velocity and four-acceleration in closed form; tabulated curves are
interpolated with cubic Hermite splines.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import DomainError, InterpolationError, NonTimelikeError
from .quadrature import panel_rule

METRIC = np.diag([-1.0, 1.0, 1.0, 1.0])
TRANSPORT_RULES = ("fermi-walker", "parallel-lab")
NORM_TOL = 1e-10


def mdot(a, b):
    """Minkowski product over the last axis."""
    a = np.asarray(a)
    b = np.asarray(b)
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def boost_matrix(rapidity: float, direction) -> np.ndarray:
    """Pure boost taking (1,0,0,0) to (cosh eta, sinh eta * n)."""
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    lam = np.eye(4)
    lam[0, 0] = ch
    lam[0, 1:] = sh * n
    lam[1:, 0] = sh * n
    lam[1:, 1:] += (ch - 1.0) * np.outer(n, n)
    return lam


def _as_param(s):
    return np.asarray(s, dtype=float)


class Worldline:
    """Base class.  Subclasses implement ``_event``, ``_velocity`` and
    ``_acceleration`` in their own parameter ``s``.

    ``velocity`` is d(gamma)/ds; it is a unit timelike vector exactly when
    the curve is proper-time parametrized.
    """

    kind = "worldline"
    parametrization = "proper"

    def __init__(self, domain=(-np.inf, np.inf), worldline_id: str | None = None):
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise DomainError(f"empty parameter domain ({lo}, {hi})")
        self.domain = (lo, hi)
        self.worldline_id = worldline_id or self.kind

    # -- checks -----------------------------------------------------------
    def check_domain(self, s) -> np.ndarray:
        s = _as_param(s)
        lo, hi = self.domain
        if np.any(s < lo) or np.any(s > hi) or not np.all(np.isfinite(s)):
            raise DomainError(f"parameter outside domain {self.domain}")
        return s

    def contains_interval(self, lo: float, hi: float) -> bool:
        return self.domain[0] <= lo and hi <= self.domain[1]

    # -- public geometry --------------------------------------------------
    def event(self, s) -> np.ndarray:
        return self._event(self.check_domain(s))

    def velocity(self, s) -> np.ndarray:
        return self._velocity(self.check_domain(s))

    def acceleration(self, s) -> np.ndarray:
        return self._acceleration(self.check_domain(s))

    def evaluate(self, tau):
        """Event and unit four-velocity at ``tau``."""
        s = self.check_domain(tau)
        u = self._velocity(s)
        norm = np.sqrt(-mdot(u, u))[..., None]
        return self._event(s), u / norm

    @property
    def is_inertial(self) -> bool:
        return False

    @property
    def is_proper_time(self) -> bool:
        return self.parametrization == "proper"

    def max_speed_factor(self, lo: float, hi: float) -> float:
        """Upper bound of u^0 + |u_spatial| on [lo, hi] (phase-rate bound)."""
        s = np.linspace(lo, hi, 257)
        u = self.velocity(s)
        return float(np.max(u[:, 0] + np.linalg.norm(u[:, 1:], axis=1)))

    def to_json(self) -> dict:
        raise NotImplementedError


class Inertial(Worldline):
    kind = "inertial"

    def __init__(self, rapidity: float = 0.0, direction=(1.0, 0.0, 0.0),
                 origin=(0.0, 0.0, 0.0, 0.0), parametrization: str = "proper",
                 domain=(-np.inf, np.inf), worldline_id: str | None = None):
        super().__init__(domain, worldline_id)
        if parametrization not in ("proper", "coordinate"):
            raise ValueError(f"unknown parametrization {parametrization!r}")
        self.rapidity = float(rapidity)
        self.direction = np.asarray(direction, dtype=float)
        self.direction = self.direction / np.linalg.norm(self.direction)
        self.origin = np.asarray(origin, dtype=float)
        self.parametrization = parametrization
        self.boost = boost_matrix(self.rapidity, self.direction)
        u = self.boost[:, 0]
        self._tangent = u if parametrization == "proper" else u / u[0]

    @property
    def is_inertial(self) -> bool:
        return True

    @property
    def at_rest(self) -> bool:
        return self.rapidity == 0.0

    def _event(self, s):
        return self.origin + s[..., None] * self._tangent

    def _velocity(self, s):
        return np.broadcast_to(self._tangent, s.shape + (4,)).copy()

    def _acceleration(self, s):
        return np.zeros(s.shape + (4,))

    def to_json(self):
        return {"kind": self.kind, "rapidity": self.rapidity,
                "direction": self.direction.tolist(), "origin": self.origin.tolist(),
                "parametrization": self.parametrization,
                "domain": list(self.domain), "id": self.worldline_id}


class Rindler(Worldline):
    """Uniform acceleration ``a`` along x, through (0, 1/a, 0, 0) at tau = 0."""

    kind = "rindler"

    def __init__(self, acceleration: float, parametrization: str = "proper",
                 domain=(-np.inf, np.inf), worldline_id: str | None = None):
        super().__init__(domain, worldline_id)
        if not acceleration > 0:
            raise ValueError("Rindler acceleration must be positive")
        if parametrization not in ("proper", "coordinate"):
            raise ValueError(f"unknown parametrization {parametrization!r}")
        self.a = float(acceleration)
        self.parametrization = parametrization

    def _tau(self, s):
        if self.parametrization == "proper":
            return s
        return np.arcsinh(self.a * s) / self.a

    def _event(self, s):
        a, tau = self.a, self._tau(s)
        z = np.zeros_like(tau)
        return np.stack([np.sinh(a * tau) / a, np.cosh(a * tau) / a, z, z], axis=-1)

    def _velocity(self, s):
        a, tau = self.a, self._tau(s)
        z = np.zeros_like(tau)
        u = np.stack([np.cosh(a * tau), np.sinh(a * tau), z, z], axis=-1)
        if self.parametrization == "coordinate":
            u = u / u[..., :1]
        return u

    def _acceleration(self, s):
        if self.parametrization != "proper":
            raise NotImplementedError("acceleration is defined for proper-time curves")
        a, tau = self.a, s
        z = np.zeros_like(tau)
        return a * np.stack([np.sinh(a * tau), np.cosh(a * tau), z, z], axis=-1)

    def to_json(self):
        return {"kind": self.kind, "acceleration": self.a,
                "parametrization": self.parametrization,
                "domain": list(self.domain), "id": self.worldline_id}


class Circular(Worldline):
    """Circle of radius R in the xy-plane with coordinate angular velocity Omega."""

    kind = "circular"

    def __init__(self, radius: float, omega: float, parametrization: str = "proper",
                 domain=(-100.0, 100.0), worldline_id: str | None = None):
        super().__init__(domain, worldline_id)
        if not radius * abs(omega) < 1.0:
            raise NonTimelikeError("circular orbit requires R*|Omega| < 1")
        if parametrization not in ("proper", "coordinate"):
            raise ValueError(f"unknown parametrization {parametrization!r}")
        self.radius = float(radius)
        self.omega = float(omega)
        self.gamma = 1.0 / np.sqrt(1.0 - (self.radius * self.omega) ** 2)
        self.parametrization = parametrization

    def _rate(self):
        return self.gamma if self.parametrization == "proper" else 1.0

    def _event(self, s):
        t = self._rate() * s
        ph = self.omega * t
        return np.stack([t, self.radius * np.cos(ph), self.radius * np.sin(ph),
                         np.zeros_like(t)], axis=-1)

    def _velocity(self, s):
        k = self._rate()
        ph = self.omega * k * s
        ro = self.radius * self.omega
        return k * np.stack([np.ones_like(s), -ro * np.sin(ph), ro * np.cos(ph),
                             np.zeros_like(s)], axis=-1)

    def _acceleration(self, s):
        k = self._rate()
        ph = self.omega * k * s
        c = -self.radius * (self.omega * k) ** 2
        return np.stack([np.zeros_like(s), c * np.cos(ph), c * np.sin(ph),
                         np.zeros_like(s)], axis=-1)

    def to_json(self):
        return {"kind": self.kind, "radius": self.radius, "omega": self.omega,
                "parametrization": self.parametrization,
                "domain": list(self.domain), "id": self.worldline_id}


class Tabulated(Worldline):
    """Worldline from samples of events and velocities.

    Events are interpolated by cubic Hermite splines (using the supplied
    velocities as slopes); velocities by cubic splines.  ``max_gap`` bounds
    the parameter spacing accepted as interpolable.
    """

    kind = "tabulated"

    def __init__(self, params, events, velocities, parametrization: str = "proper",
                 max_gap: float = 0.05, worldline_id: str | None = None):
        params = np.asarray(params, dtype=float)
        events = np.asarray(events, dtype=float)
        velocities = np.asarray(velocities, dtype=float)
        if params.ndim != 1 or events.shape != (params.size, 4) or velocities.shape != events.shape:
            raise ValueError("expected params (n,), events (n,4), velocities (n,4)")
        if np.any(np.diff(params) <= 0):
            raise ValueError("tabulated parameters must be strictly increasing")
        gap = float(np.max(np.diff(params)))
        if gap > max_gap:
            raise InterpolationError(
                f"sample gap {gap:.3g} exceeds interpolation tolerance {max_gap:.3g}")
        if np.any(mdot(velocities, velocities) >= 0):
            raise NonTimelikeError("tabulated velocities contain a non-timelike sample")
        super().__init__((params[0], params[-1]), worldline_id)
        self.parametrization = parametrization
        self.params = params
        self.events = events
        self.velocities = velocities
        self.max_gap = max_gap
        self._pos = CubicHermiteSpline(params, events, velocities, axis=0)
        self._vel = CubicSpline(params, velocities, axis=0)

    def _event(self, s):
        return self._pos(s)

    def _velocity(self, s):
        return self._vel(s)

    def _acceleration(self, s):
        return self._vel(s, 1)

    def to_json(self):
        return {"kind": self.kind, "parametrization": self.parametrization,
                "params": self.params.tolist(), "events": self.events.tolist(),
                "velocities": self.velocities.tolist(), "id": self.worldline_id}

    @classmethod
    def from_csv(cls, path, max_gap: float = 0.05, worldline_id: str | None = None):
        """Load a curve with columns tau,t,x,y,z,ut,ux,uy,uz."""
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        cols = ["tau", "t", "x", "y", "z", "ut", "ux", "uy", "uz"]
        try:
            data = np.array([[float(r[c]) for c in cols] for r in rows])
        except KeyError as exc:
            raise ValueError(f"missing CSV column {exc}") from None
        return cls(data[:, 0], data[:, 1:5], data[:, 5:9], max_gap=max_gap,
                   worldline_id=worldline_id)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "t", "x", "y", "z", "ut", "ux", "uy", "uz"])
            for s, x, u in zip(self.params, self.events, self.velocities):
                w.writerow([repr(float(v)) for v in (s, *x, *u)])


def assert_timelike(w: Worldline, samples: int = 513):
    if isinstance(w, (Inertial, Rindler, Circular)):
        return  # timelike by construction
    lo, hi = w.domain
    lo = max(lo, -50.0)
    hi = min(hi, 50.0)
    s = np.linspace(lo, hi, samples)
    u = w.velocity(s)
    # scale-free test so that large rapidities do not trip on roundoff
    if np.any(mdot(u, u) >= -1e-8 * np.sum(u * u, axis=-1)):
        raise NonTimelikeError("non-timelike segment detected")


def proper_time(w: Worldline, s, origin: float = 0.0):
    """Proper time elapsed from parameter ``origin`` to ``s``."""
    s = w.check_domain(s)
    if w.is_proper_time:
        return s - origin
    if isinstance(w, Inertial):
        return (s - origin) / w.boost[0, 0]
    if isinstance(w, Circular):
        return (s - origin) / w.gamma
    if isinstance(w, Rindler):
        a = w.a
        return (np.arcsinh(a * s) - np.arcsinh(a * origin)) / a

    def rate(x):
        u = w.velocity(x)
        return np.sqrt(-mdot(u, u))

    flat = np.atleast_1d(s)
    out = np.empty_like(flat)
    for i, si in enumerate(flat):
        lo, hi, sign = (origin, si, 1.0) if si >= origin else (si, origin, -1.0)
        if hi == lo:
            out[i] = 0.0
            continue
        nodes, weights = panel_rule(np.linspace(lo, hi, 9))
        out[i] = sign * np.sum(weights * rate(nodes))
    return out.reshape(np.shape(s))


def reparametrize_proper_time(w: Worldline) -> Worldline:
    """Same path, traversed with unit-norm velocity."""
    assert_timelike(w)
    if w.is_proper_time:
        return w
    if isinstance(w, Inertial):
        start = w.origin
        lo, hi = w.domain
        k = w.boost[0, 0]
        return Inertial(w.rapidity, w.direction, start, "proper", (lo / k, hi / k),
                        w.worldline_id)
    if isinstance(w, Rindler):
        lo, hi = (np.arcsinh(w.a * x) / w.a for x in w.domain)
        return Rindler(w.a, "proper", (lo, hi), w.worldline_id)
    if isinstance(w, Circular):
        lo, hi = (x / w.gamma for x in w.domain)
        return Circular(w.radius, w.omega, "proper", (lo, hi), w.worldline_id)
    if isinstance(w, Tabulated):
        taus = proper_time(w, w.params, origin=w.params[0]) + w.params[0]
        u = w.velocities / np.sqrt(-mdot(w.velocities, w.velocities))[:, None]
        gap = max(w.max_gap, float(np.max(np.diff(taus))))
        return Tabulated(taus, w.events, u, "proper", gap, w.worldline_id)
    raise TypeError(f"cannot reparametrize {type(w).__name__}")


# ---------------------------------------------------------------------------
# Tetrads


@dataclass(frozen=True)
class Tetrad:
    """Orthonormal frame sample(s); ``vectors[..., mu, :]`` is e_mu."""

    vectors: np.ndarray
    rule: str = "fermi-walker"

    @property
    def e0(self):
        return self.vectors[..., 0, :]

    def spatial(self, i: int):
        return self.vectors[..., i, :]

    def gram(self):
        v = self.vectors
        return np.einsum("...ia,ab,...jb->...ij", v, METRIC, v)


@dataclass
class _FWIntegrator:
    """Dense Fermi-Walker transport for curves without a closed-form frame."""

    worldline: Worldline
    reference: float
    initial: np.ndarray
    _solutions: dict = field(default_factory=dict)

    def _rhs(self, s, y):
        e = y.reshape(4, 4)
        u = self.worldline._velocity(np.array(s))
        a = self.worldline._acceleration(np.array(s))
        de = mdot(e, a)[:, None] * u[None, :] - mdot(e, u)[:, None] * a[None, :]
        return de.ravel()

    def _solve(self, end):
        if end not in self._solutions:
            self._solutions[end] = solve_ivp(
                self._rhs, (self.reference, end), self.initial.ravel(), method="DOP853",
                rtol=1e-13, atol=1e-13, dense_output=True)
        return self._solutions[end].sol

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        out = np.empty((flat.size, 4, 4))
        lo, hi = self.worldline.domain
        for side, end in ((flat >= self.reference, hi), (flat < self.reference, lo)):
            if np.any(side):
                sol = self._solve(end)
                out[side] = sol(flat[side]).T.reshape(-1, 4, 4)
        return out.reshape(s.shape + (4, 4))


def _initial_frame(u: np.ndarray) -> np.ndarray:
    """Boost of the lab frame that carries (1,0,0,0) to the unit vector ``u``."""
    speed = np.linalg.norm(u[1:])
    if speed < 1e-15:
        return np.eye(4)
    rapidity = np.arcsinh(speed)
    return boost_matrix(rapidity, u[1:] / speed).T


def _fw_frames(w: Worldline, s) -> np.ndarray:
    if isinstance(w, Inertial):
        return np.broadcast_to(w.boost.T, np.shape(s) + (4, 4)).copy()
    if isinstance(w, Rindler):
        at = w.a * s
        ch, sh = np.cosh(at), np.sinh(at)
        frames = np.zeros(np.shape(s) + (4, 4))
        frames[..., 0, 0] = ch
        frames[..., 0, 1] = sh
        frames[..., 1, 0] = sh
        frames[..., 1, 1] = ch
        frames[..., 2, 2] = 1.0
        frames[..., 3, 3] = 1.0
        return frames
    integ = getattr(w, "_fw_integrator", None)
    if integ is None:
        ref = _reference_parameter(w)
        integ = _FWIntegrator(w, ref, _initial_frame(w._velocity(np.array(ref))))
        w._fw_integrator = integ
    return integ(s)


def _reference_parameter(w: Worldline) -> float:
    lo, hi = w.domain
    return 0.0 if lo <= 0.0 <= hi else lo


def tetrad_at(w: Worldline, tau, rule: str = "fermi-walker") -> Tetrad:
    """Orthonormal frame at proper time(s) ``tau``.

    ``fermi-walker`` gives the adapted frame (e0 = velocity) transported
    without rotation.  ``parallel-lab`` keeps lab components fixed: it is
    the Fermi-Walker frame at the reference parameter (0, or the domain
    start), adapted only there unless the curve is inertial.
    """
    if rule not in TRANSPORT_RULES:
        raise ValueError(f"unknown transport rule {rule!r}")
    if not w.is_proper_time:
        raise ValueError("tetrads require a proper-time parametrization")
    tau = w.check_domain(tau)
    if rule == "fermi-walker":
        return Tetrad(_fw_frames(w, tau), rule)
    ref = np.array(_reference_parameter(w))
    frame = _fw_frames(w, ref)
    return Tetrad(np.broadcast_to(frame, tau.shape + (4, 4)).copy(), rule)


def tetrad_derivative(w: Worldline, tau) -> np.ndarray:
    """d e_mu / d tau for the Fermi-Walker frame: g(e,a) u - g(e,u) a."""
    tau = w.check_domain(tau)
    e = _fw_frames(w, tau)
    u = w._velocity(tau)[..., None, :]
    a = w._acceleration(tau)[..., None, :]
    return (mdot(e, a)[..., None] * u - mdot(e, u)[..., None] * a)


def worldline_from_json(spec: dict) -> Worldline:
    spec = dict(spec)
    kind = spec.pop("kind")
    wid = spec.pop("id", None)
    if kind == "inertial":
        return Inertial(spec.get("rapidity", 0.0), spec.get("direction", (1, 0, 0)),
                        spec.get("origin", (0, 0, 0, 0)),
                        spec.get("parametrization", "proper"),
                        tuple(spec.get("domain", (-np.inf, np.inf))), wid)
    if kind == "rindler":
        return Rindler(spec["acceleration"], spec.get("parametrization", "proper"),
                       tuple(spec.get("domain", (-np.inf, np.inf))), wid)
    if kind == "circular":
        return Circular(spec["radius"], spec["omega"], spec.get("parametrization", "proper"),
                        tuple(spec.get("domain", (-100.0, 100.0))), wid)
    if kind == "tabulated":
        if "csv" in spec:
            return Tabulated.from_csv(spec["csv"], spec.get("max_gap", 0.05), wid)
        return Tabulated(spec["params"], spec["events"], spec["velocities"],
                         spec.get("parametrization", "proper"), spec.get("max_gap", 0.05), wid)
    raise ValueError(f"unknown worldline kind {kind!r}")
