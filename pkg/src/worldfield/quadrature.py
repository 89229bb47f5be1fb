"""Composite Gauss-Legendre rules and oscillatory helpers."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import QuadratureError

NODES_PER_PANEL = 20


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(edges, n: int = NODES_PER_PANEL) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule over consecutive panels given by ``edges``."""
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(n)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def uniform_panels(lo: float, hi: float, panels: int, n: int = NODES_PER_PANEL):
    return panel_rule(np.linspace(lo, hi, panels + 1), n)


@lru_cache(maxsize=None)
def subpanel_interpolation(n: int, sub: int) -> np.ndarray:
    """Matrix taking values at the n Gauss nodes of a panel to the Gauss nodes
    of its ``sub`` equal sub-panels (degree n-1 polynomial interpolation)."""
    x, _ = gauss_legendre(n)
    y = ((x[None, :] + 1.0 + 2.0 * np.arange(sub)[:, None]) / sub - 1.0).ravel()
    leg = np.polynomial.legendre
    B = np.linalg.solve(leg.legvander(x, n - 1).T, leg.legvander(y, n - 1).T).T
    B.setflags(write=False)
    return B


def oscillatory_panel_count(length: float, frequency: float, minimum: int = 8) -> int:
    """Panels so that each spans at most pi/4 radians of the fastest phase."""
    width = np.pi / (4.0 * max(frequency, 1e-300))
    return max(minimum, int(np.ceil(length / width)))


def graded_edges(lo: float, hi: float, center: float, smallest: float, width: float):
    """Panel edges graded geometrically toward ``center``.

    Panels double in size moving away from ``center`` until they reach
    ``width``; beyond that they are uniform.
    """
    def one_side(span):
        if span <= 0:
            return np.array([0.0])
        edges = [0.0]
        step = smallest
        while edges[-1] + step < span and step < width:
            edges.append(edges[-1] + step)
            step *= 2.0
        remaining = span - edges[-1]
        count = max(1, int(np.ceil(remaining / width)))
        edges.extend(edges[-1] + remaining * np.arange(1, count + 1) / count)
        return np.array(edges)

    right = center + one_side(hi - center)
    left = center - one_side(center - lo)[::-1]
    return np.concatenate([left[:-1], right])


def integrate_adaptive(func, lo: float, hi: float, *, rtol: float = 1e-12, atol: float = 0.0,
                       start_panels: int = 8, max_panels: int = 1 << 16,
                       n: int = NODES_PER_PANEL):
    """Integrate a vectorised ``func`` over [lo, hi] by panel doubling.

    Stops when two successive refinements agree to ``rtol`` (relative to the
    result) or ``atol``; raises :class:`QuadratureError` once ``max_panels``
    is exceeded.
    """
    if hi <= lo:
        return 0.0
    panels = start_panels
    nodes, weights = uniform_panels(lo, hi, panels, n)
    values = func(nodes)
    previous = np.sum(weights * values, axis=-1)
    # cancellation guard: tolerance is relative to the integral of |func|
    mass = np.max(np.sum(weights * np.abs(values), axis=-1))
    while True:
        panels *= 2
        if panels > max_panels:
            raise QuadratureError(
                f"panel refinement exceeded {max_panels} panels on [{lo}, {hi}]")
        nodes, weights = uniform_panels(lo, hi, panels, n)
        current = np.sum(weights * func(nodes), axis=-1)
        err = np.max(np.abs(current - previous))
        if err <= max(atol, rtol * max(np.max(np.abs(current)), 1e-2 * mass)):
            return current
        previous = current


def richardson(values, steps, order: int | None = None):
    """Polynomial extrapolation of ``values(steps)`` to step -> 0 (Neville)."""
    values = np.asarray(values)
    steps = np.asarray(steps, dtype=float)
    if order is not None:
        values, steps = values[-(order + 1):], steps[-(order + 1):]
    table = [v for v in values]
    k = len(table)
    for level in range(1, k):
        for i in range(k - 1, level - 1, -1):
            h_new, h_old = steps[i], steps[i - level]
            table[i] = (h_old * table[i] - h_new * table[i - 1]) / (h_old - h_new)
    return table[-1]
