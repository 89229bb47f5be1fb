import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from worldfield.coefficients import GaussianBump
from worldfield.errors import FitError, WorldlineKindError
from worldfield.hadamard import (PulledBackKernel, bessel_comparison, default_backend,
                                 detector_response, eps_schedule, hadamard_recursion,
                                 kernel_value, kms_fit, kms_fit_from_spectrum,
                                 massive_closed_form, mode_integral, pauli_jordan_smeared,
                                 short_distance_check)
from worldfield.jetdistro import JetDistribution
from worldfield.oneparticle import ModeGrid, commutator
from worldfield.worldline import Circular, Inertial, Rindler

FOUR_PI2 = 4 * math.pi ** 2


def test_eps_schedule():
    e = eps_schedule()
    assert e[0] == 1e-2 and e[-1] <= 1e-4 < e[-2]
    assert np.allclose(e[1:] / e[:-1], 0.5)


@pytest.mark.parametrize("dt", [0.05, 0.5, 2.0, 7.0])
def test_mode_integral_timelike_matches_closed_forms(dt):
    eps = 1e-3
    d = np.array([dt, 0, 0, 0])
    m0 = -1 / (FOUR_PI2 * (dt - 1j * eps) ** 2)
    assert abs(mode_integral(d, 0.0, eps) - m0) <= 1e-12 * abs(m0)
    m1 = massive_closed_form(dt, 1.0, eps)
    assert abs(mode_integral(d, 1.0, eps) - m1) <= 1e-12 * abs(m1)


@settings(max_examples=20, deadline=None)
@given(dt=st.floats(-3, 3), r=st.floats(0.1, 3), eps=st.floats(1e-4, 1e-2))
def test_mode_integral_massless_closed_form(dt, r, eps):
    a = mode_integral(np.array([dt, r, 0, 0]), 0.0, eps)
    b = mode_integral(np.array([-dt, 0, 0, -r]), 0.0, eps)
    assert abs(a - np.conj(b)) <= 1e-10 * abs(a)
    exact = 1 / (FOUR_PI2 * (r * r - (dt - 1j * eps) ** 2))
    assert abs(a - exact) <= 1e-10 * abs(exact)


def test_spacelike_massless_value():
    v = mode_integral(np.array([0.0, 2.0, 0, 0]), 0.0, 0.0)
    assert abs(v - 1 / (FOUR_PI2 * 4.0)) <= 1e-15


def test_rindler_kernel_backends_agree():
    w = Rindler(1.0)
    mode = PulledBackKernel(w, "mode-integral")
    closed = PulledBackKernel(w, "closed-massless-rindler")
    for u in (0.3, 1.0, 3.0):
        a = kernel_value(mode, u, 0.0, 1e-7)
        b = kernel_value(closed, u, 0.0, 0.0)
        assert abs(a.real - b.real) <= 1e-10 * abs(b)
        # the regulators differ at O(eps) since one shifts lab time, the other proper time
        assert abs(a.imag) <= 1e-5 * abs(b)


def test_kernel_validation():
    with pytest.raises(WorldlineKindError):
        PulledBackKernel(Inertial(), "closed-massless-rindler")
    with pytest.raises(ValueError):
        PulledBackKernel(Rindler(1.0), "closed-massless-rindler", mass=1.0)
    with pytest.raises(ValueError):
        PulledBackKernel(Inertial(), "nonsense")
    K = PulledBackKernel(Inertial(), "closed-massless-inertial")
    with pytest.raises(ValueError):
        kernel_value(K, 1.0, 1.0, 0.0)
    assert default_backend(Rindler(1.0)) == "closed-massless-rindler"
    assert default_backend(Rindler(1.0), 1.0) == "mode-integral"
    assert default_backend(Circular(0.5, 1.0)) == "mode-integral"


def test_inertial_spectral_and_closed_backends_agree():
    win = GaussianBump(0.0, 1.0)
    om = np.array([-2.0, -1.0, -0.5, 0.5, 1.0])
    a = detector_response(Inertial(), win, om)
    b = detector_response(Inertial(), win, om, backend="closed-massless-inertial")
    assert np.max(np.abs(a - b)) <= 1e-11 * np.max(np.abs(a))
    # de-excitation dominates
    assert a[0] > a[1] > a[2] > a[3] > a[4] > 0


def test_kms_fit_from_synthetic_spectrum():
    om = np.array([0.5, 1.0, 1.5, 2.0])
    fm = np.exp(-om)
    fit = kms_fit_from_spectrum(om, fm * np.exp(-3.0 * om), fm)
    assert abs(fit.beta - 3.0) <= 1e-13 and fit.residual <= 1e-13 and fit.points_used == 4
    with pytest.raises(FitError):
        kms_fit_from_spectrum(om, np.zeros(4), fm)


def test_kms_fit_needs_enough_points():
    with pytest.raises(ValueError):
        kms_fit(Rindler(1.0), GaussianBump(0.0, 1.0), [0.5, 1.0, -1.0])


def test_hadamard_recursion_massive_values():
    h = hadamard_recursion(1, 8)
    assert h.values[0] == sp.Rational(1, 4) and h.values[1] == sp.Rational(1, 32)
    for j in range(1, 9):
        assert h.values[j] == h.values[j - 1] / (4 * (j + 1))
    assert np.max(bessel_comparison(h)) <= 1e-14


def test_hadamard_recursion_massless_and_bounds():
    assert all(v == 0 for v in hadamard_recursion(0, 5).values)
    with pytest.raises(ValueError):
        hadamard_recursion(1, 13)


def test_short_distance_massless():
    rep = short_distance_check(0.0, [0.05, 0.1, 0.2])
    assert np.max(np.abs(rep.scaled + 1 / FOUR_PI2)) <= 1e-10 / FOUR_PI2
    with pytest.raises(ValueError):
        short_distance_check(0.0, [0.6])
    with pytest.raises(WorldlineKindError):
        short_distance_check(0.0, [0.1], worldline=Rindler(1.0))


def test_pauli_jordan_oracle_matches_mode_commutator():
    sigma, d, c2 = 0.25, 2.0, 2.0
    a, b = GaussianBump(0.0, sigma), GaussianBump(c2, sigma)
    w1, w2 = Inertial(), Inertial(origin=(0.0, d, 0, 0))
    T = JetDistribution(w1, {(0, 0, 0): a})
    S = JetDistribution(w2, {(0, 0, 0): b})
    grid = ModeGrid(0.0, 80.0, 20, 8)
    oracle = pauli_jordan_smeared(a, w1, b, w2)
    g = commutator(T, S, grid)
    assert abs(oracle) > 1e-3
    assert abs(g - oracle) <= 1e-8 * abs(oracle)


def test_pauli_jordan_vanishes_at_spacelike_separation():
    a = GaussianBump(0.0, 0.25)
    assert pauli_jordan_smeared(a, Inertial(), a, Inertial(origin=(0, 10.0, 0, 0))) == 0.0
