"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from worldfield import cli
from worldfield.ccr import (QuasifreeState, WeylWord, compose_state, cp_apply, gns_gram_check,
                            gram_assemble, random_words, shift_lattice, translation_map_build)
from worldfield.coefficients import GaussianBump
from worldfield.hadamard import (bessel_comparison, detector_response, hadamard_recursion,
                                 kms_fit, pauli_jordan_smeared, short_distance_check)
from worldfield.jetdistro import (JetDistribution, expected_degree, geometric_radii, mollify,
                                  spatial_directions, tilted_directions, wavefront_scan)
from worldfield.oneparticle import (ModeGrid, angular_spectrum, commutator, default_r_max,
                                    k_map_general, two_point)
from worldfield.worldline import Inertial, Rindler

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
OMEGAS = [0.5, 1.0, 1.5, 2.0]
WINDOW = GaussianBump(0.0, 40.0)
FOUR_PI2 = 4 * math.pi ** 2


def jet(w, terms):
    return JetDistribution(w, dict(terms))


@pytest.mark.parametrize("a", [1.0, 2.0])
def test_criterion_01_unruh_detailed_balance(criterion, a):
    c = criterion(1, f"detailed balance on the a={a:g} accelerated curve", budget=60)
    fit = kms_fit(Rindler(a), WINDOW, OMEGAS)
    expected = 2 * math.pi / a
    rel = abs(fit.beta / expected - 1)
    c.check(rel <= 0.02, f"beta={fit.beta:.5f} vs 2pi/a={expected:.5f} (rel {rel:.1e})")
    c.finish()


def test_criterion_02_inertial_ground_state(criterion):
    c = criterion(2, "inertial detector stays in its ground state", budget=30)
    om = np.array(OMEGAS)
    F = detector_response(Inertial(), WINDOW, np.concatenate([om, -om]))
    ratios = F[:4] / F[4:]
    worst = float(np.max(ratios[om >= 1]))
    c.check(worst < 1e-4, f"massless max F(w)/F(-w) over w>=1 = {worst:.1e}")
    m = 1.0
    Fp = detector_response(Inertial(), WINDOW, om, mass=m)
    Fm = detector_response(Inertial(), WINDOW, -om - 2 * m, mass=m)
    worst_m = float(np.max(Fp / Fm))
    c.check(worst_m <= 1e-6, f"m=1 max F(w)/F(-w-2m) = {worst_m:.1e}")
    c.finish()


def test_criterion_03_short_distance_coefficient(criterion):
    c = criterion(3, "leading short-distance coefficient 1/(4 pi^2)", budget=30)
    dtau = np.array([0.05, 0.075, 0.1, 0.15, 0.2])
    rep = short_distance_check(0.0, dtau)
    dev = float(np.max(np.abs(np.abs(rep.scaled) * FOUR_PI2 - 1)))
    c.check(dev <= 0.01, f"massless max | |W sigma| 4pi^2 - 1 | = {dev:.1e}")
    c.finish()


def test_criterion_04_hadamard_recursion(criterion):
    c = criterion(4, "Hadamard recursion V_0..V_8 against the Bessel series", budget=1)
    h = hadamard_recursion(1, 8)
    dev = float(np.max(bessel_comparison(h)))
    c.check(dev <= 1e-10, f"max relative deviation {dev:.1e} with constant c = m/2")
    c.finish()


def test_criterion_05_angular_content(criterion):
    c = criterion(5, "angular content of k_map_general on the inertial curve", budget=60)
    for ell, alpha in enumerate([(0, 0, 0), (1, 0, 0), (0, 1, 1), (1, 1, 1)]):
        T = jet(Inertial(), {alpha: GaussianBump(0.0, 1.0)})
        grid = ModeGrid(0.0, default_r_max(T), 8, 5)
        spec = angular_spectrum(k_map_general(T, grid))
        total = float(np.sum(spec))
        above = float(np.sum(spec[ell + 1:])) / total
        top = float(spec[ell]) / total
        c.check(math.sqrt(above) <= 1e-8 and top > 1e-3,
                f"l={ell}: ||P_>l||/||.||={math.sqrt(above):.0e}, ||P_l||^2 share={top:.2f}")
    c.finish()


def _pairs():
    s = 0.25
    timelike = [
        # (spatial offset, centre of the second bump): each pair straddles the light cone
        ((2.0, 0, 0), 2.0), ((1.5, 0, 0), 1.8), ((3.0, 0, 0), 2.7), ((0, 1.0, 0), 1.1),
        ((0, 0, 2.5), 2.4), ((1.0, 1.0, 0), 1.5), ((1.2, 0, 0), -1.2), ((0, 2.0, 0), -2.1),
        ((0.8, 0.6, 0), 0.9), ((1.0, 1.0, 1.0), -1.8),
    ]
    spacelike = [((d, 0, 0), c2) for d, c2 in [(8.0, 0.0), (10.0, 1.0), (12.0, -1.0), (15.0, 2.0),
                                              (20.0, 0.0)]]
    spacelike += [((0, d, 0), c2) for d, c2 in [(9.0, 0.5), (11.0, -0.5)]]
    spacelike += [((d, d, 0), c2) for d, c2 in [(6.0, 0.0), (7.0, 1.5), (8.0, -2.0)]]
    return s, timelike, spacelike


def test_criterion_06_commutator_oracle(criterion):
    c = criterion(6, "Im<KT,KS> against the light-cone quadrature of the commutator", budget=120)
    sigma, timelike, spacelike = _pairs()
    grid = ModeGrid(0.0, 80.0, 20, 8)
    a = GaussianBump(0.0, sigma)
    T = jet(Inertial(), {(0, 0, 0): a})
    norm_T = math.sqrt(abs(two_point(T, T, grid)))
    worst_t = 0.0
    for offset, c2 in timelike:
        b = GaussianBump(c2, sigma)
        w2 = Inertial(origin=(0.0, *offset))
        G = commutator(T, jet(w2, {(0, 0, 0): b}), grid)
        oracle = pauli_jordan_smeared(a, Inertial(), b, w2)
        worst_t = max(worst_t, abs(G - oracle) / abs(oracle))
    c.check(worst_t <= 1e-4, f"10 timelike pairs, max relative error {worst_t:.1e}")
    worst_s = 0.0
    for offset, c2 in spacelike:
        S = jet(Inertial(origin=(0.0, *offset)), {(0, 0, 0): GaussianBump(c2, sigma)})
        norm_S = math.sqrt(abs(two_point(S, S, grid)))
        worst_s = max(worst_s, abs(commutator(T, S, grid)) / (norm_T * norm_S))
    c.check(worst_s <= 1e-6, f"10 spacelike pairs, max |G|/norms {worst_s:.1e}")
    c.finish()


def test_criterion_07_mollification(criterion):
    c = criterion(7, "mollified two-point values converge to the direct ones", budget=60)
    alphas = [{(0, 0, 0)}, {(1, 0, 0)}, {(0, 0, 0), (0, 1, 0)}, {(2, 0, 0)}, {(1, 1, 0), (0, 0, 1)}]
    for i, group in enumerate(alphas):
        T = jet(Inertial(), {al: GaussianBump(0.1 * j, 1.0) for j, al in enumerate(sorted(group))})
        grid = ModeGrid(0.0, default_r_max(T), 20, 2)
        exact = two_point(T, T, grid).real
        vals = [two_point(mollify(T, k), mollify(T, k), grid).real for k in (4, 8, 16, 32)]
        steps = np.abs(np.diff(vals))
        gap = abs(vals[-1] - exact) / exact
        c.check(gap < 1e-3 and np.all(steps[1:] < steps[:-1]),
                f"T{i} (order {T.order}): gap {gap:.0e}, Cauchy steps {', '.join(f'{x:.0e}' for x in steps)}")
    c.finish()


def test_criterion_08_wavefront(criterion):
    c = criterion(8, "wave front classification of line distributions", budget=60)
    rng = np.random.default_rng(11)
    radii = geometric_radii(1.0, 1e5, 10)
    specs = [
        {(0, 0, 0): GaussianBump(0.0, 1.0)},
        {(0, 0, 0): GaussianBump(0.0, 1.0), (1, 0, 0): GaussianBump(0.5, 1.0)},
        {(0, 1, 0): GaussianBump(0.0, 0.5), (0, 0, 1): GaussianBump(0.0, 0.5)},
        {(2, 0, 0): GaussianBump(0.0, 1.0), (0, 0, 0): GaussianBump(0.0, 1.0)},
        {(1, 1, 0): GaussianBump(0.0, 0.7), (0, 0, 2): GaussianBump(0.2, 0.7),
         (1, 0, 0): GaussianBump(0.0, 0.7)},
    ]
    for i, spec in enumerate(specs):
        T = jet(Inertial(), spec)
        deg = expected_degree(T)
        spatial = wavefront_scan(T, spatial_directions(20, rng), radii)
        tilted = wavefront_scan(T, tilted_directions(20, rng), radii)
        slopes = np.array([s.slope for s in spatial])
        ok = all(s.singular for s in spatial) and np.all(np.abs(slopes - deg) <= 0.3)
        ok = ok and not any(s.singular for s in tilted)
        c.check(ok, f"T{i} degree {deg}: spatial singular {sum(s.singular for s in spatial)}/20, "
                    f"slopes in [{slopes.min():.3f}, {slopes.max():.3f}], "
                    f"tilted regular {sum(not s.singular for s in tilted)}/20")
    c.finish()


def test_criterion_09_cp_channels(criterion):
    c = criterion(9, "Gaussian CP translation channels", budget=120)
    # inertial l = 0: an automorphism obeying the semigroup law
    T0 = jet(Inertial(), {(0, 0, 0): GaussianBump(0.0, 0.5)})
    fam = gram_assemble(shift_lattice(T0, 0.5, 6), ModeGrid(0.0, default_r_max(T0), 10, 0))
    one, two = translation_map_build(fam, 0.5, 1), translation_map_build(fam, 0.5, 2)
    s_rel = max(one.s_norm, two.s_norm) / np.linalg.norm(fam.S)
    rng = np.random.default_rng(9)
    words = random_words(rng, fam.size, 10, support=range(fam.size - 2))
    # damping identically one: the image word keeps its phase exactly
    damping = max(abs(cp_apply(one, w).phase - w.phase) for w in words)
    semi = 0.0
    for w in words:
        x, y = cp_apply(one, cp_apply(one, w)), cp_apply(two, w)
        semi = max(semi, float(np.max(np.abs(x.c - y.c))), abs(x.phase - y.phase))
    c.check(one.automorphism and two.automorphism and s_rel <= 1e-8 and damping == 0
            and semi <= 1e-10,
            f"inertial l=0: ||s_L||/||S||={s_rel:.0e}, phase change {damping:.0e}, semigroup {semi:.0e}")

    # accelerated l = 1 under lab-parallel transport: positivity on 20 word sets
    w = Rindler(1.0)
    window = GaussianBump(0.0, 1 / 16)
    T1 = jet(w, {(0, 0, 0): window, (1, 0, 0): window})
    grid = ModeGrid(0.0, 80.0, 8, 8)
    fam1 = gram_assemble(shift_lattice(T1, 0.125, 4), grid)
    cp = translation_map_build(fam1, 0.125, 1, "parallel-lab", np.random.default_rng(1))
    composed = compose_state(cp.target.vacuum(), cp)
    noise = QuasifreeState(cp.Q_rho)
    rng = np.random.default_rng(2)
    worst = np.inf
    for _ in range(20):
        ws = [WeylWord.identity(fam1.size)] + random_words(rng, fam1.size, 5, support=cp.retained)
        worst = min(worst, gns_gram_check(composed, fam1, ws), gns_gram_check(noise, cp.s_L, ws))
    c.check(worst >= -1e-9, f"accelerated l=1 parallel-lab: ||s_L||={cp.s_norm:.2e}, mu={cp.mu:.2e}, "
                            f"min GNS eigenvalue {worst:.1e}")

    # l = 0: both transport rules give the same channel
    T2 = jet(w, {(0, 0, 0): window})
    fam2 = gram_assemble(shift_lattice(T2, 0.125, 3), grid)
    fw = translation_map_build(fam2, 0.125, 1, "fermi-walker")
    pl = translation_map_build(fam2, 0.125, 1, "parallel-lab")
    diff = max(float(np.max(np.abs(fw.L - pl.L))), float(np.max(np.abs(fw.s_L - pl.s_L))),
               float(np.max(np.abs(fw.Q_rho - pl.Q_rho))))
    c.check(diff <= 1e-8, f"l=0 rule independence {diff:.0e}")
    c.finish()


RUNS = [("detector", "rindler_detector.toml"), ("detector", "inertial_detector.toml"),
        ("kms", "rindler_detector.toml"), ("commutator", "commutator.toml"),
        ("wavefront", "wavefront.toml"), ("translate", "translate_inertial.toml"),
        ("translate", "translate_rindler.toml"), ("hadamard", "hadamard.toml"),
        ("angular", "angular.toml")]


def test_criterion_10_cli_determinism(criterion, tmp_path):
    c = criterion(10, "byte-identical CLI summaries across repeated runs")
    for command, config in RUNS:
        blobs = []
        for rep in range(2):
            out = tmp_path / f"{command}-{config}-{rep}"
            code = cli.main([command, "--config", str(CONFIGS / config), "--out", str(out)])
            blobs.append((code, (out / "summary.json").read_bytes() if code == 0 else b""))
        same = blobs[0][0] == 0 and blobs[0] == blobs[1]
        json.loads(blobs[0][1] or b"{}")
        c.check(same, f"{command} {config}: {'identical' if same else 'differs'}")
    c.finish()
