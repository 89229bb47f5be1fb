"""Smooth spacetime functions that distributions are evaluated against.

A test function maps events ``x`` (shape ``(..., 4)``) to complex values and
supplies directional derivatives ``d_v1 ... d_vn f`` along lab four-vectors.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
import sympy as sp

from .worldline import mdot

COORDS = sp.symbols("t x y z", real=True)


class TestFunction:
    __test__ = False  # not a pytest class
    max_order = 0
    accuracy = 0.0  # relative accuracy of derivative values

    def __call__(self, x) -> np.ndarray:
        raise NotImplementedError

    def directional(self, x, directions) -> np.ndarray:
        """Iterated derivative along the lab vectors in ``directions``."""
        raise NotImplementedError


class PlaneWave(TestFunction):
    """exp(-i g(k, x)) = exp(i (k0 t - k.x)) for a covector k = (rho, xi)."""

    max_order = 64

    def __init__(self, k):
        self.k = np.asarray(k, dtype=float)

    def __call__(self, x):
        return np.exp(-1j * mdot(self.k, np.asarray(x)))

    def directional(self, x, directions):
        value = self(x)
        for v in directions:
            value = value * (-1j * mdot(self.k, v))
        return value


class Constant(TestFunction):
    max_order = 64

    def __init__(self, value: complex = 1.0):
        self.value = complex(value)

    def __call__(self, x):
        return np.full(np.shape(x)[:-1], self.value, dtype=complex)

    def directional(self, x, directions):
        if len(directions) == 0:
            return self(x)
        return np.zeros(np.shape(x)[:-1], dtype=complex)


class Symbolic(TestFunction):
    """Function given as a sympy expression in t, x, y, z; derivatives are exact."""

    max_order = 64

    def __init__(self, expr):
        self.expr = sp.sympify(expr, locals=dict(zip(("t", "x", "y", "z"), COORDS)))
        self._cache: dict[tuple, callable] = {}

    def _partial(self, index: tuple):
        key = tuple(sorted(index))
        if key not in self._cache:
            e = self.expr
            for mu in key:
                e = sp.diff(e, COORDS[mu])
            self._cache[key] = sp.lambdify(COORDS, e, "numpy")
        return self._cache[key]

    def _eval(self, fn, x):
        x = np.asarray(x, dtype=float)
        val = fn(x[..., 0], x[..., 1], x[..., 2], x[..., 3])
        return np.broadcast_to(np.asarray(val, dtype=complex), x.shape[:-1]).copy()

    def __call__(self, x):
        return self._eval(self._partial(()), x)

    def directional(self, x, directions):
        n = len(directions)
        if n == 0:
            return self(x)
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape[:-1], dtype=complex)
        for index in itertools.product(range(4), repeat=n):
            weight = np.ones(x.shape[:-1])
            for v, mu in zip(directions, index):
                weight = weight * np.asarray(v)[..., mu]
            if np.all(weight == 0):
                continue
            total += weight * self._eval(self._partial(index), x)
        return total


class FiniteDifference(TestFunction):
    """Wrap a plain callable; derivatives by fourth-order central differences of step ``step``."""

    max_order = 3
    accuracy = 1e-8

    def __init__(self, func, step: float = 1e-3):
        self.func = func
        self.step = float(step)

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=complex)

    def directional(self, x, directions):
        if len(directions) > self.max_order:
            raise ValueError(f"finite differences limited to order {self.max_order}")
        if len(directions) == 0:
            return self(x)
        v, rest = np.asarray(directions[0]), directions[1:]
        h = self.step

        def g(y):
            return self.directional(y, rest)

        x = np.asarray(x, dtype=float)
        return (-g(x + 2 * h * v) + 8 * g(x + h * v) - 8 * g(x - h * v) + g(x - 2 * h * v)) / (12 * h)


class Gaussian4D:
    """exp(-|x - c|_E^2 / (2 s^2)) on R^4: a smooth density with empty wave front set.

    Its tails are below 1e-14 beyond eight widths, so it stands in for a
    compactly supported bump in the wave-front scanner.
    """

    def __init__(self, width: float = 1.0, center=(0.0, 0.0, 0.0, 0.0)):
        self.width = float(width)
        self.center = np.asarray(center, dtype=float)

    def fourier(self, k):
        k = np.asarray(k, dtype=float)
        s = self.width
        phase = np.exp(-1j * mdot(k, self.center))
        return (2 * math.pi * s * s) ** 2 * np.exp(-0.5 * s * s * np.sum(k * k, axis=-1)) * phase
