import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from worldfield.ccr import (GaussianCPMap, GeneratorFamily, QuasifreeState, WeylWord,
                            _validate_gram, adjoint, compose_state, cp_apply, gns_gram_check,
                            gram_assemble, random_words, shift_lattice, state_evaluate,
                            translation_map_build, weyl_multiply)
from worldfield.coefficients import GaussianBump
from worldfield.errors import ValidationError
from worldfield.jetdistro import JetDistribution
from worldfield.oneparticle import ModeGrid, default_r_max
from worldfield.worldline import Inertial

N = 4
vec = arrays(np.float64, N, elements=st.floats(-2, 2))


def symplectic(seed=0, n=N):
    a = np.random.default_rng(seed).normal(size=(n, n))
    return a - a.T


@pytest.fixture(scope="module")
def inertial_family():
    T0 = JetDistribution(Inertial(), {(0, 0, 0): GaussianBump(0.0, 0.5)})
    grid = ModeGrid(0.0, default_r_max(T0), 10, 2)
    return gram_assemble(shift_lattice(T0, 0.5, 6), grid)


@settings(max_examples=40, deadline=None)
@given(a=vec, b=vec, c=vec)
def test_weyl_product_associative(a, b, c):
    S = symplectic()
    wa, wb, wc = WeylWord(a), WeylWord(b, 1j), WeylWord(c, -1.0)
    left = weyl_multiply(weyl_multiply(wa, wb, S), wc, S)
    right = weyl_multiply(wa, weyl_multiply(wb, wc, S), S)
    assert np.allclose(left.c, right.c) and abs(left.phase - right.phase) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(a=vec, b=vec)
def test_weyl_relations(a, b):
    S = symplectic(1)
    wa, wb = WeylWord(a), WeylWord(b)
    ab, ba = weyl_multiply(wa, wb, S), weyl_multiply(wb, wa, S)
    # W(a) W(b) = exp(-i a.S.b) W(b) W(a)
    assert abs(ab.phase - np.exp(-1j * (a @ S @ b)) * ba.phase) <= 1e-12
    unit = weyl_multiply(adjoint(wa), wa, S)
    assert np.allclose(unit.c, 0) and abs(unit.phase - 1) <= 1e-12
    lhs = adjoint(ab)
    rhs = weyl_multiply(adjoint(wb), adjoint(wa), S)
    assert np.allclose(lhs.c, rhs.c) and abs(lhs.phase - rhs.phase) <= 1e-12


def test_from_factors_and_state_evaluate():
    S = symplectic(2)
    Q = np.eye(N)
    w = WeylWord.from_factors([(np.ones(N), 1.0), (-np.ones(N), 1.0)], S)
    assert np.allclose(w.c, 0) and abs(w.phase - 1) <= 1e-15
    assert state_evaluate(QuasifreeState(Q), WeylWord(np.ones(N), 2.0)) == pytest.approx(2 * np.exp(-1.0))
    with pytest.raises(ValueError):
        WeylWord.from_factors([], S)
    with pytest.raises(ValueError):
        QuasifreeState(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_gram_structure(inertial_family):
    fam = inertial_family
    assert np.allclose(fam.M, fam.M.conj().T, atol=1e-15)
    assert np.allclose(fam.S, -fam.S.T, atol=1e-15)
    assert np.linalg.eigvalsh(fam.C + 1j * fam.S)[0] >= -1e-12
    # stationarity: the lattice Gram matrix is Toeplitz
    for d in range(fam.size):
        diag = np.diagonal(fam.M, d)
        assert np.max(np.abs(diag - diag[0])) <= 1e-13 * np.max(np.abs(fam.M))
    json.dumps(fam.to_json())


def test_complex_generators_rejected():
    T = JetDistribution(Inertial(), {(0, 0, 0): GaussianBump(0.0, 0.5, omega=1.0)})
    with pytest.raises(ValueError):
        gram_assemble([T], ModeGrid(0.0, 20.0, 4, 1))


def test_validate_gram_rejects_indefinite():
    with pytest.raises(ValidationError):
        _validate_gram(np.array([[1.0, 2.0], [2.0, 1.0]], dtype=complex))
    with pytest.raises(ValidationError):
        _validate_gram(np.array([[1.0, 1j], [1j, 1.0]]))


def test_vacuum_positive_and_corrupted_state_detected(inertial_family):
    fam = inertial_family
    rng = np.random.default_rng(0)
    words = [WeylWord.identity(fam.size)] + random_words(rng, fam.size, 8, scale=1.0)
    assert gns_gram_check(fam.vacuum(), fam, words) >= -1e-12
    assert gns_gram_check(QuasifreeState(0.1 * fam.C), fam, words) < -1e-3
    with pytest.raises(ValueError):
        gns_gram_check(fam.vacuum(), fam, [])


def test_inertial_translation_is_automorphism(inertial_family):
    fam = inertial_family
    cp = translation_map_build(fam, 0.5, 1)
    assert cp.automorphism and cp.mu == 0 and cp.s_norm <= 1e-12 * np.linalg.norm(fam.S)
    assert cp.target is fam and cp.dropped == (5,)
    assert np.array_equal(cp.L[1:, :5], np.eye(5)) and not cp.L[:, 5].any()
    # vacuum invariance on the retained block
    Q = compose_state(cp.target.vacuum(), cp).Q
    r = list(cp.retained)
    assert np.max(np.abs(Q[np.ix_(r, r)] - fam.C[np.ix_(r, r)])) <= 1e-13
    with pytest.raises(ValueError):
        cp_apply(cp, WeylWord(np.eye(fam.size)[5]))


def test_translation_semigroup(inertial_family):
    fam = inertial_family
    one, two = translation_map_build(fam, 0.5, 1), translation_map_build(fam, 0.5, 2)
    rng = np.random.default_rng(4)
    for w in random_words(rng, fam.size, 5, support=range(fam.size - 2)):
        a = cp_apply(one, cp_apply(one, w))
        b = cp_apply(two, w)
        assert np.array_equal(a.c, b.c) and abs(a.phase - b.phase) <= 1e-15


def test_rules_agree_at_order_zero(inertial_family):
    fam = inertial_family
    a = translation_map_build(fam, 0.5, 2, "fermi-walker")
    b = translation_map_build(fam, 0.5, 2, "parallel-lab")
    assert np.array_equal(a.L, b.L) and np.array_equal(a.Q_rho, b.Q_rho)


def test_non_lattice_shift_extends_target(inertial_family):
    fam = inertial_family
    cp = translation_map_build(fam, 0.25, 1)
    # a half-step push lands between lattice sites: new generators, still exact
    assert cp.target.size > fam.size
    assert cp.automorphism
    json.dumps(cp.to_json())


def test_noise_makes_channel_positive():
    # the map W(c) -> W(0) kills the symplectic form entirely: s_L = S
    S = np.array([[0.0, 1.0], [-1.0, 0.0]])
    fam = GeneratorFamily((), np.eye(2) + 1j * S)
    s_L = S
    mu = 2.0 * np.linalg.svd(s_L, compute_uv=False)[0]
    words = [WeylWord.identity(2)] + random_words(np.random.default_rng(5), 2, 10)
    assert gns_gram_check(QuasifreeState(mu * np.eye(2)), s_L, words) >= -1e-12
    assert gns_gram_check(QuasifreeState(0.1 * np.eye(2)), s_L, words) < -1e-3
    cp = GaussianCPMap(np.zeros((2, 2)), s_L, mu * np.eye(2), fam, fam, mu)
    assert compose_state(fam.vacuum(), cp).Q.shape == (2, 2)
