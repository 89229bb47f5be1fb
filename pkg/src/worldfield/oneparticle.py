"""One-particle vectors KT on the mass shell.

For a distribution T the vector is

    KT(xi) = (2 pi)^(-3/2) lambda^(-1/2) T-hat(lambda, xi),   lambda = sqrt(|xi|^2 + m^2),

stored at Gauss-Legendre radial nodes as spherical-harmonic coefficients.
A vector may carry a spatial anchor b, meaning KT(xi) = exp(-i xi.b) sum c Y;
this keeps translated curves band-limited in angle.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import sph_harm_y

from .errors import GridMismatchError, OrderError
from .jetdistro import Mollified, mollifier_profile, plane_wave_response
from .quadrature import gauss_legendre, subpanel_interpolation, uniform_panels
from .worldline import Inertial

PREFACTOR = (2 * math.pi) ** -1.5


def harmonic_count(l_max: int) -> int:
    return (l_max + 1) ** 2


def harmonic_index(ell: int, m: int) -> int:
    return ell * ell + ell + m


def harmonic_degrees(l_max: int) -> np.ndarray:
    return np.concatenate([np.full(2 * ell + 1, ell) for ell in range(l_max + 1)])


def harmonic_orders(l_max: int) -> np.ndarray:
    return np.concatenate([np.arange(-ell, ell + 1) for ell in range(l_max + 1)])


def harmonics(l_max: int, directions) -> np.ndarray:
    """Orthonormal Y_lm at unit vectors, shape (N, (l_max+1)^2)."""
    n = np.asarray(directions, dtype=float)
    theta = np.arccos(np.clip(n[:, 2], -1.0, 1.0))
    phi = np.arctan2(n[:, 1], n[:, 0])
    out = np.empty((n.shape[0], harmonic_count(l_max)), dtype=complex)
    for ell in range(l_max + 1):
        for m in range(-ell, ell + 1):
            out[:, harmonic_index(ell, m)] = sph_harm_y(ell, m, theta, phi)
    return out


@dataclass(frozen=True)
class AngularRule:
    """Product rule: Gauss-Legendre in cos(theta), trapezoidal in phi."""

    n_theta: int
    n_phi: int

    @cached_property
    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        x, wx = gauss_legendre(self.n_theta)
        phi = 2 * np.pi * np.arange(self.n_phi) / self.n_phi
        ct = np.repeat(x, self.n_phi)
        st = np.sqrt(1.0 - ct * ct)
        ph = np.tile(phi, self.n_theta)
        dirs = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=1)
        weights = np.repeat(wx, self.n_phi) * (2 * np.pi / self.n_phi)
        return dirs, weights

    def exact_degree(self) -> int:
        return min(2 * self.n_theta - 1, self.n_phi - 1)


def rule_for_degree(degree: int) -> AngularRule:
    """Smallest product rule integrating polynomials of ``degree`` exactly."""
    return AngularRule(degree // 2 + 1, degree + 1)


def _rotation_to(axis) -> np.ndarray:
    """Rotation matrix taking e_z to the unit vector ``axis``."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    z = np.array([0.0, 0.0, 1.0])
    v = np.cross(z, a)
    c = float(a @ z)
    if np.linalg.norm(v) < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx / (1 + c)


class ModeGrid:
    """Radial Gauss-Legendre panels on [0, r_max] with harmonics up to l_max."""

    def __init__(self, mass: float = 0.0, r_max: float = 20.0, radial_panels: int = 40,
                 l_max: int = 4, nodes_per_panel: int = 20):
        if mass < 0 or not r_max > 0 or radial_panels < 1 or l_max < 0:
            raise ValueError("need mass >= 0, r_max > 0, radial_panels >= 1, l_max >= 0")
        self.mass = float(mass)
        self.r_max = float(r_max)
        self.radial_panels = int(radial_panels)
        self.l_max = int(l_max)
        self.nodes_per_panel = int(nodes_per_panel)
        self.r, self.weights = uniform_panels(0.0, self.r_max, self.radial_panels,
                                              self.nodes_per_panel)
        self.lam = np.sqrt(self.r ** 2 + self.mass ** 2)
        self.measure = self.weights * self.r ** 2

    @property
    def key(self) -> tuple:
        return (self.mass, self.r_max, self.radial_panels, self.l_max, self.nodes_per_panel)

    def refined(self, factor: int = 2, r_factor: float = 1.0) -> "ModeGrid":
        return ModeGrid(self.mass, self.r_max * r_factor, self.radial_panels * factor,
                        self.l_max, self.nodes_per_panel)

    def to_json(self) -> dict:
        return {"mass": self.mass, "r_max": self.r_max, "radial_panels": self.radial_panels,
                "l_max": self.l_max}

    @cached_property
    def projection_rule(self) -> AngularRule:
        return rule_for_degree(2 * self.l_max)

    @cached_property
    def _projection_table(self):
        dirs, w = self.projection_rule.nodes
        return dirs, w, harmonics(self.l_max, dirs)


class OneParticleVector:
    """KT(xi) = exp(-i xi.anchor) * sum_lm c[r, lm] Y_lm(xi/|xi|) at radial nodes."""

    def __init__(self, grid: ModeGrid, coeffs, anchor=(0.0, 0.0, 0.0)):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (grid.r.size, harmonic_count(grid.l_max)):
            raise ValueError("coefficient array does not match the grid")
        if not np.all(np.isfinite(coeffs)):
            raise FloatingPointError("non-finite one-particle coefficients")
        self.grid = grid
        self.coeffs = coeffs
        self.anchor = np.asarray(anchor, dtype=float)

    def values(self, directions) -> np.ndarray:
        """KT at every radial node and the given unit directions, shape (Nr, Nd)."""
        dirs = np.asarray(directions, dtype=float)
        y = harmonics(self.grid.l_max, dirs)
        phase = np.exp(-1j * np.outer(self.grid.r, dirs @ self.anchor))
        return (self.coeffs @ y.T) * phase

    def __add__(self, other: "OneParticleVector") -> "OneParticleVector":
        _check_grid(self, other)
        if not np.allclose(self.anchor, other.anchor, rtol=0, atol=0):
            raise ValueError("vectors with different anchors cannot be added coefficientwise")
        return OneParticleVector(self.grid, self.coeffs + other.coeffs, self.anchor)

    def __mul__(self, scalar) -> "OneParticleVector":
        return OneParticleVector(self.grid, complex(scalar) * self.coeffs, self.anchor)

    __rmul__ = __mul__

    def norm2(self) -> float:
        return float(np.sum(self.grid.measure[:, None] * np.abs(self.coeffs) ** 2))

    def to_csv(self, target):
        """Rows r, l, m, re, im; ``target`` is a path or a text stream."""
        if not hasattr(target, "write"):
            with open(target, "w", newline="") as fh:
                return self.to_csv(fh)
        deg = harmonic_degrees(self.grid.l_max)
        order = harmonic_orders(self.grid.l_max)
        wr = csv.writer(target, lineterminator="\n")
        wr.writerow(["r", "l", "m", "re", "im"])
        for i, r in enumerate(self.grid.r):
            for h in range(deg.size):
                c = self.coeffs[i, h]
                wr.writerow(["%.17g" % r, int(deg[h]), int(order[h]),
                             "%.17g" % c.real, "%.17g" % c.imag])


def _check_grid(u: OneParticleVector, v: OneParticleVector):
    if u.grid is not v.grid and u.grid.key != v.grid.key:
        raise GridMismatchError("one-particle vectors live on different mode grids")


# ---------------------------------------------------------------------------
# K maps


def _unwrap(T):
    if isinstance(T, Mollified):
        return T.base, T.scale
    return T, None


def _mollifier_radial(grid: ModeGrid, scale):
    if scale is None:
        return np.ones_like(grid.r)
    return mollifier_profile(np.sqrt(grid.lam ** 2 + grid.r ** 2) / scale)


@dataclass(frozen=True)
class _MonomialProjection:
    l_max: int

    @cached_property
    def table(self) -> dict:
        """<Y_lm, n^alpha> over the sphere, exact for |alpha| <= l_max."""
        rule = rule_for_degree(2 * self.l_max)
        dirs, w = rule.nodes
        y = harmonics(self.l_max, dirs)
        out = {}
        for deg in range(self.l_max + 1):
            for a1 in range(deg + 1):
                for a2 in range(deg - a1 + 1):
                    alpha = (a1, a2, deg - a1 - a2)
                    mono = np.prod(dirs ** np.asarray(alpha), axis=1)
                    out[alpha] = (w * mono) @ np.conj(y)
        return out


_PROJECTIONS: dict[int, _MonomialProjection] = {}


def monomial_projection(alpha, l_max: int) -> np.ndarray:
    if l_max not in _PROJECTIONS:
        _PROJECTIONS[l_max] = _MonomialProjection(l_max)
    return _PROJECTIONS[l_max].table[tuple(alpha)]


def k_map_inertial(T, grid: ModeGrid) -> OneParticleVector:
    """Mass-shell restriction for a distribution on an inertial curve at rest."""
    base, scale = _unwrap(T)
    w = base.worldline
    if not (isinstance(w, Inertial) and w.at_rest):
        raise ValueError("k_map_inertial needs an inertial worldline at rest; use k_map_general")
    if base.order > grid.l_max:
        raise OrderError(f"grid l_max={grid.l_max} is below the distribution order {base.order}")
    r, lam = grid.r, grid.lam
    t0 = w.origin[0]
    radial = PREFACTOR / np.sqrt(lam) * np.exp(1j * lam * t0) * _mollifier_radial(grid, scale)
    coeffs = np.zeros((r.size, harmonic_count(grid.l_max)), dtype=complex)
    for alpha, c in base.coefficients.items():
        deg = sum(alpha)
        prof = radial * (-1j) ** deg * r ** deg * c.fourier(lam)
        coeffs += np.outer(prof, monomial_projection(alpha, grid.l_max))
    return OneParticleVector(grid, coeffs, w.origin[1:])


def default_anchor(T) -> np.ndarray:
    base, _ = _unwrap(T)
    lo, hi = base.support
    w = base.worldline
    return w.event(np.array(0.5 * (lo + hi)))[1:] if base.coefficients else np.zeros(3)


def k_map_general(T, grid: ModeGrid, angular: AngularRule | None = None,
                  anchor=None) -> OneParticleVector:
    """Mass-shell values by direct quadrature along the curve, projected onto harmonics.

    ``angular`` sets the projection rule (default: exact for degree 2 l_max
    plus a margin of 8 against aliasing of higher harmonics).
    """
    base, scale = _unwrap(T)
    w = base.worldline
    if base.order >= 2 and not w.is_inertial:
        raise OrderError("k_map_general supports order <= 1 on non-inertial curves")
    if base.order > grid.l_max and w.is_inertial and getattr(w, "at_rest", False):
        raise OrderError(f"grid l_max={grid.l_max} is below the distribution order {base.order}")
    anchor = default_anchor(base) if anchor is None else np.asarray(anchor, dtype=float)
    rule = angular or rule_for_degree(2 * grid.l_max + 8)
    dirs, wa = rule.nodes
    y = harmonics(grid.l_max, dirs)
    r, lam = grid.r, grid.lam
    xi = r[:, None, None] * dirs[None, :, :]
    k = np.concatenate([np.broadcast_to(lam[:, None, None], xi.shape[:2] + (1,)), xi], axis=-1)
    values = plane_wave_response(base, k)
    values *= np.exp(1j * (xi @ anchor))
    radial = PREFACTOR / np.sqrt(lam) * _mollifier_radial(grid, scale)
    coeffs = radial[:, None] * ((values * wa[None, :]) @ np.conj(y))
    return OneParticleVector(grid, coeffs, anchor)


def k_map(T, grid: ModeGrid, **kwargs) -> OneParticleVector:
    base, _ = _unwrap(T)
    w = base.worldline
    if isinstance(w, Inertial) and w.at_rest and base.order <= grid.l_max:
        return k_map_inertial(T, grid)
    return k_map_general(T, grid, **kwargs)


# ---------------------------------------------------------------------------
# Inner products and derived functionals


OFFSET_PHASE = 12.0  # radians of anchor-offset phase per radial panel


def _overlap_rule(grid: ModeGrid, separation: float) -> AngularRule:
    degree = 2 * grid.l_max + int(math.ceil(grid.r_max * separation)) + 32
    return AngularRule(degree // 2 + 1, 2 * grid.l_max + 2)


def inner_product(u: OneParticleVector, v: OneParticleVector) -> complex:
    """<u, v> = integral conj(u) v d^3 xi, antilinear in the first slot."""
    _check_grid(u, v)
    d = u.anchor - v.anchor
    sep = float(np.linalg.norm(d))
    grid = u.grid
    if sep == 0.0:
        return complex(np.sum(grid.measure[:, None] * np.conj(u.coeffs) * v.coeffs))
    # rotate the angular rule so the anchor offset lies along its polar axis
    rule = _overlap_rule(grid, sep)
    dirs, wa = rule.nodes
    dirs = dirs @ _rotation_to(d).T
    y = harmonics(grid.l_max, dirs)
    r, measure, cu, cv = _resolve_offset(grid, sep, u.coeffs, v.coeffs)
    uu = np.conj(cu @ y.T)
    vv = cv @ y.T
    phase = np.exp(1j * np.outer(r, dirs @ d))
    return complex(np.sum(measure[:, None] * (uu * vv * phase) * wa[None, :]))


def _resolve_offset(grid: ModeGrid, sep: float, *coeffs):
    """Radial nodes fine enough for the phase exp(i r sep cos theta).

    Each radial panel is split so that it spans at most ``OFFSET_PHASE``
    radians; the smooth profiles sqrt(lambda) * c are interpolated onto
    the sub-panels.
    """
    n, panels = grid.nodes_per_panel, grid.radial_panels
    sub = max(1, math.ceil(sep * grid.r_max / panels / OFFSET_PHASE))
    if sub == 1:
        return (grid.r, grid.measure, *coeffs)
    B = subpanel_interpolation(n, sub)
    r, w = uniform_panels(0.0, grid.r_max, panels * sub, n)
    lam = np.sqrt(r * r + grid.mass * grid.mass)
    out = []
    for c in coeffs:
        smooth = (np.sqrt(grid.lam)[:, None] * c).reshape(panels, n, -1)
        fine = np.einsum("fn,pnh->pfh", B, smooth).reshape(r.size, -1)
        out.append(fine / np.sqrt(lam)[:, None])
    return (r, w * r * r, *out)


def _conj(T):
    base, scale = _unwrap(T)
    return Mollified(base.conj(), scale) if scale is not None else base.conj()


def two_point(T, S, grid: ModeGrid, **kwargs) -> complex:
    """W(T (x) S) = <K T-bar, K S>."""
    return inner_product(k_map(_conj(T), grid, **kwargs), k_map(S, grid, **kwargs))


def commutator(T, S, grid: ModeGrid, **kwargs) -> float:
    """G(T, S) = Im <K T, K S> for real T and S."""
    for X in (T, S):
        if not _unwrap(X)[0].is_real:
            raise ValueError("commutator needs real distributions")
    return float(np.imag(two_point(T, S, grid, **kwargs)))


def detector_norm(T, grid: ModeGrid, **kwargs) -> float:
    """<Omega, Phi(T)* Phi(T) Omega> = ||K T-bar||^2."""
    return k_map(_conj(T), grid, **kwargs).norm2()


def angular_spectrum(u: OneParticleVector) -> np.ndarray:
    """||P_l u||^2 for l = 0..l_max."""
    per = np.sum(u.grid.measure[:, None] * np.abs(u.coeffs) ** 2, axis=0)
    deg = harmonic_degrees(u.grid.l_max)
    return np.bincount(deg, weights=per, minlength=u.grid.l_max + 1)


def default_r_max(T, mass: float = 0.0, threshold: float = 1e-12) -> float:
    """Twice the radius where the coefficient transforms drop below ``threshold`` of peak."""
    base, _ = _unwrap(T)
    r = np.linspace(0.0, 400.0, 8001)
    lam = np.sqrt(r * r + mass * mass)
    env = np.zeros_like(r)
    for alpha, c in base.coefficients.items():
        env = np.maximum(env, np.abs(c.fourier(lam)) * np.maximum(r, 1.0) ** sum(alpha))
        env = np.maximum(env, np.abs(c.fourier(-lam)) * np.maximum(r, 1.0) ** sum(alpha))
    peak = float(np.max(env)) if env.size else 0.0
    if peak == 0.0:
        return 1.0
    above = np.nonzero(env >= threshold * peak)[0]
    return 2.0 * max(float(r[above[-1]]), 1.0)


def radial_density_probe(grid: ModeGrid, bumps, tests) -> np.ndarray:
    """Residuals of projecting test profiles onto the span of l=0 bump profiles.

    ``bumps`` are coefficient functions; ``tests`` are callables of r.  The
    profiles a-hat(lambda(r))/sqrt(lambda(r)) are compared in L^2(r^2 dr).
    """
    sw = np.sqrt(grid.measure)
    cols = np.stack([sw * b.fourier(grid.lam) / np.sqrt(grid.lam) for b in bumps], axis=1)
    q, s, _ = np.linalg.svd(cols, full_matrices=False)
    q = q[:, s > 1e-10 * s[0]]
    out = []
    for g in tests:
        v = sw * np.asarray(g(grid.r), dtype=complex)
        resid = v - q @ (np.conj(q).T @ v)
        out.append(np.linalg.norm(resid) / np.linalg.norm(v))
    return np.array(out)


__all__ = [
    "AngularRule", "ModeGrid", "OneParticleVector", "angular_spectrum", "commutator",
    "default_anchor", "default_r_max", "detector_norm", "harmonics", "inner_product",
    "k_map", "k_map_general", "k_map_inertial", "radial_density_probe", "rule_for_degree",
    "two_point",
]
