"""Command-line entry point: ``worldfield <command> --config run.toml``.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .ccr import (QuasifreeState, compose_state, gns_gram_check, gram_assemble, random_words,
                  shift_lattice, translation_map_build)
from .coefficients import coefficient_from_json
from .config import dump, load_config
from .errors import ConfigError, FitError, NumericalError, ValidationError, WorldfieldError
from .hadamard import (bessel_comparison, default_backend, detector_response, eps_schedule,
                       hadamard_recursion, kms_fit, kms_fit_from_spectrum, pauli_jordan_smeared,
                       short_distance_check)
from .jetdistro import (JetDistribution, expected_degree, geometric_radii, spatial_directions,
                        tilted_directions, random_directions, wavefront_scan, write_scan_csv)
from .oneparticle import ModeGrid, angular_spectrum, commutator, default_r_max, k_map, two_point
from .testfunctions import Gaussian4D
from .worldline import Inertial, Rindler, worldline_from_json

log = logging.getLogger("worldfield")

EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDATION = 2, 3, 4


# ---------------------------------------------------------------------------
# Output helpers


def _plain(obj):
    """numpy scalars/arrays to builtins; non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))
    if isinstance(obj, complex):
        return [_plain(obj.real), _plain(obj.imag)]
    return obj


def to_json_text(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([("%.17g" % v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


class Artifacts:
    """Collects outputs in memory; ``write`` emits them and a SHA-256 manifest."""

    def __init__(self):
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str):
        self.files[name] = text

    def write(self, out: Path):
        out.mkdir(parents=True, exist_ok=True)
        manifest = {}
        for name in sorted(self.files):
            data = self.files[name].encode()
            (out / name).write_bytes(data)
            manifest[name] = {"sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)}
        (out / "manifest.json").write_text(to_json_text({"artifacts": manifest}))


# ---------------------------------------------------------------------------
# Run context


class Context:
    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.mass = float(cfg["mass"])
        self.rng = np.random.default_rng(cfg["seed"])
        self.threads = cfg["threads"]
        try:
            self.worldlines = {w["id"]: worldline_from_json(w) for w in cfg["worldlines"]}
            self.distributions = [JetDistribution.from_json(d, self.worldlines)
                                  for d in cfg["distributions"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid worldline or distribution: {exc}") from exc
        eps = cfg["eps"]
        self.eps = (eps_schedule(eps["start"], eps["stop"]) if isinstance(eps, dict)
                    else np.asarray(eps, dtype=float))

    def distribution(self, index) -> JetDistribution:
        if not isinstance(index, int) or not 0 <= index < len(self.distributions):
            raise ConfigError(f"distribution index {index!r} out of range")
        return self.distributions[index]

    def worldline(self, wid):
        if wid is None:
            return self.worldlines[self.cfg["worldlines"][0]["id"]]
        if wid not in self.worldlines:
            raise ConfigError(f"unknown worldline id {wid!r}")
        return self.worldlines[wid]

    def grid(self, distributions) -> ModeGrid:
        g = self.cfg["grid"]
        r_max = g["r_max"]
        if r_max is None:
            r_max = max([default_r_max(T, self.mass) for T in distributions] or [20.0])
        return ModeGrid(self.mass, float(r_max), g["radial_panels"], g["l_max"])

    def map(self, func, items):
        items = list(items)
        if self.threads == 1:
            return [func(x) for x in items]
        with ThreadPoolExecutor(self.threads) as pool:
            return list(pool.map(func, items))


def _window(ctx: Context):
    try:
        return coefficient_from_json(ctx.cfg["detector"]["window"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid detector window: {exc}") from exc


def _omegas(ctx: Context) -> np.ndarray:
    om = np.asarray(ctx.cfg["omegas"], dtype=float)
    if om.size == 0:
        raise ConfigError("omega grid is empty")
    return om


def _expected_beta(w):
    return 2 * math.pi / w.a if isinstance(w, Rindler) else None


# ---------------------------------------------------------------------------
# Commands


def cmd_detector(ctx: Context, art: Artifacts) -> dict:
    sec = ctx.cfg["detector"]
    w = ctx.worldline(sec["worldline"])
    window = _window(ctx)
    om = _omegas(ctx)
    if sec["symmetric"]:
        om = np.unique(np.concatenate([np.abs(om), -np.abs(om)]))
    om = np.sort(om)
    backend = sec["backend"] or default_backend(w, ctx.mass)
    F = detector_response(w, window, om, backend, ctx.mass, ctx.eps)
    art.add("spectrum.csv", csv_text(["omega", "F"], zip(om.tolist(), F.tolist())))
    values = dict(zip(om.tolist(), F.tolist()))
    positive = [o for o in om.tolist() if o > 0 and -o in values]
    ratios = {repr(o): values[o] / values[-o] if values[-o] != 0 else None for o in positive}
    summary = {"command": "detector", "worldline": w.to_json(), "window": window.to_json(),
               "backend": backend, "mass": ctx.mass, "omegas": om, "F": F, "ratios": ratios,
               "expected_beta": _expected_beta(w)}
    if len(positive) >= ctx.cfg["kms"]["min_points"]:
        try:
            fit = kms_fit_from_spectrum(positive, [values[o] for o in positive],
                                        [values[-o] for o in positive])
            summary["kms"] = fit.to_json()
        except FitError as exc:
            summary["kms"] = {"rejected": str(exc)}
    return summary


def cmd_kms(ctx: Context, art: Artifacts) -> dict:
    sec = ctx.cfg["detector"]
    w = ctx.worldline(sec["worldline"])
    window = _window(ctx)
    backend = sec["backend"] or default_backend(w, ctx.mass)
    fit = kms_fit(w, window, _omegas(ctx), backend, ctx.mass, ctx.cfg["kms"]["min_points"])
    art.add("kms.csv", csv_text(["omega", "log_ratio"],
                                zip(fit.omegas.tolist(), fit.log_ratios.tolist())))
    expected = _expected_beta(w)
    return {"command": "kms", "worldline": w.to_json(), "window": window.to_json(),
            "backend": backend, "mass": ctx.mass, "fit": fit.to_json(), "expected_beta": expected,
            "relative_error": None if expected is None else fit.beta / expected - 1}


def _oracle_applicable(ctx, T, S):
    return (ctx.mass == 0 and all(isinstance(X.worldline, Inertial) and X.order == 0
                                  and set(X.coefficients) == {(0, 0, 0)} for X in (T, S)))


def cmd_commutator(ctx: Context, art: Artifacts) -> dict:
    n = len(ctx.distributions)
    pairs = ctx.cfg["commutator"]["pairs"] or [[i, j] for i in range(n) for j in range(i + 1, n)]
    if not pairs:
        raise ConfigError("commutator needs at least two distributions")
    for p in pairs:
        if not (isinstance(p, list) and len(p) == 2):
            raise ConfigError("commutator pairs must be [i, j] lists")
        ctx.distribution(p[0]), ctx.distribution(p[1])
    grid = ctx.grid(ctx.distributions)
    use_oracle = ctx.cfg["commutator"]["oracle"]

    def one(p):
        T, S = ctx.distributions[p[0]], ctx.distributions[p[1]]
        G = commutator(T, S, grid)
        W = two_point(T, S, grid)
        nt = abs(two_point(T, T, grid)) ** 0.5
        ns = abs(two_point(S, S, grid)) ** 0.5
        oracle = None
        if use_oracle and _oracle_applicable(ctx, T, S):
            oracle = pauli_jordan_smeared(T.coefficients[(0, 0, 0)], T.worldline,
                                          S.coefficients[(0, 0, 0)], S.worldline)
        return {"pair": p, "G": G, "W": complex(W), "norms": [nt, ns], "oracle": oracle,
                "relative_to_norms": abs(G) / (nt * ns) if nt * ns > 0 else None}

    rows = ctx.map(one, pairs)
    art.add("commutator.csv", csv_text(
        ["i", "j", "G", "oracle", "norm_i", "norm_j"],
        [[r["pair"][0], r["pair"][1], float(r["G"]),
          "" if r["oracle"] is None else float(r["oracle"]), r["norms"][0], r["norms"][1]]
         for r in rows]))
    return {"command": "commutator", "grid": grid.to_json(), "pairs": rows}


def cmd_wavefront(ctx: Context, art: Artifacts) -> dict:
    sec = ctx.cfg["wavefront"]
    if sec["smooth"] is not None:
        try:
            target = Gaussian4D(float(sec["smooth"]["width"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid smooth test function: {exc}") from exc
        degree, label = None, {"smooth": sec["smooth"]}
    else:
        target = ctx.distribution(sec["distribution"])
        if not isinstance(target.worldline, Inertial):
            raise ConfigError("the wave front scan needs a distribution on an inertial curve")
        degree, label = expected_degree(target), {"distribution": target.to_json()}
    groups = [("spatial", spatial_directions(sec["spatial"], ctx.rng)),
              ("tilted", tilted_directions(sec["tilted"], ctx.rng)),
              ("random", random_directions(sec["random"], ctx.rng))]
    dirs = np.concatenate([g for _, g in groups])
    names = [name for name, g in groups for _ in range(len(g))]
    if dirs.shape[0] == 0:
        raise ConfigError("no scan directions requested")
    r = sec["radii"]
    radii = geometric_radii(r["lo"], r["hi"], r["per_decade"])
    samples = wavefront_scan(target, dirs, radii, sec["n_max"], sec["floor"])
    if all(s.noise for s in samples):
        raise NumericalError("every direction is below the noise floor")
    buf = io.StringIO()
    write_scan_csv(samples, buf)
    art.add("wavefront.csv", buf.getvalue())
    counts = {}
    for name, s in zip(names, samples):
        c = counts.setdefault(name, {"singular": 0, "regular": 0, "noise": 0})
        c[s.classification] += 1
        c["noise"] += int(s.noise)
    slopes = [s.slope for name, s in zip(names, samples) if name == "spatial" and s.singular]
    return {"command": "wavefront", **label, "expected_degree": degree, "counts": counts,
            "spatial_slopes": slopes, "radii": {"lo": radii[0], "hi": radii[-1],
                                                "count": radii.size}}


def cmd_translate(ctx: Context, art: Artifacts) -> dict:
    sec = ctx.cfg["translate"]
    template = ctx.distribution(sec["distribution"])
    if not (isinstance(sec["count"], int) and sec["count"] >= 2):
        raise ConfigError("translate.count must be an integer >= 2")
    if not isinstance(sec["shift"], int):
        raise ConfigError("translate.shift must be an integer number of lattice steps")
    if sec["rule"] not in ("fermi-walker", "parallel-lab"):
        raise ConfigError(f"unknown transport rule {sec['rule']!r}")
    lattice = shift_lattice(template, float(sec["step"]), sec["count"])
    grid = ctx.grid(lattice)
    family = gram_assemble(lattice, grid)
    cp = translation_map_build(family, float(sec["step"]), sec["shift"], sec["rule"], ctx.rng)
    composed = compose_state(cp.target.vacuum(), cp)
    noise = QuasifreeState(cp.Q_rho)
    support = cp.retained
    word_sets = [random_words(ctx.rng, family.size, sec["words_per_set"], support=support)
                 for _ in range(sec["word_sets"])] if support else []
    composed_min = [gns_gram_check(composed, family, ws) for ws in word_sets]
    noise_min = [gns_gram_check(noise, cp.s_L, ws) for ws in word_sets]
    report = cp.to_json()
    art.add("channel.json", to_json_text({"map": report, "family": family.to_json()}))
    return {"command": "translate", "grid": grid.to_json(), "step": sec["step"],
            "count": sec["count"], "shift_steps": sec["shift"], "rule": sec["rule"],
            "automorphism": cp.automorphism, "s_L_norm": cp.s_norm, "mu": cp.mu,
            "escalations": cp.escalations, "dropped": len(cp.dropped),
            "dropped_indices": list(cp.dropped), "target_size": cp.target.size,
            "L": cp.L, "composed_state_min_eig": min(composed_min, default=None),
            "noise_min_eig": min(noise_min + [cp.noise_min_eig])}


def cmd_hadamard(ctx: Context, art: Artifacts) -> dict:
    sec = ctx.cfg["hadamard"]
    coeffs = hadamard_recursion(ctx.mass, sec["order"])
    dev = bessel_comparison(coeffs)
    try:
        report = short_distance_check(ctx.mass, sec["dtau"], ctx.eps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    modulus = np.abs(report.scaled) * 4 * math.pi ** 2
    art.add("short_distance.csv", csv_text(
        ["dtau", "modulus_times_4pi2", "phase"],
        zip(report.dtau.tolist(), modulus.tolist(), np.angle(report.scaled).tolist())))
    art.add("recursion.csv", csv_text(["j", "V_j", "exact", "bessel_deviation"],
                                      [[j, float(v), str(v), float(d)]
                                       for j, (v, d) in enumerate(zip(coeffs.values, dev))]))
    return {"command": "hadamard", "mass": ctx.mass, "V": [str(v) for v in coeffs.values],
            "normalization": coeffs.normalization, "bessel_max_deviation": float(np.max(dev)),
            "short_distance": report.to_json(),
            "max_leading_deviation": float(np.max(np.abs(modulus - 1)))}


def cmd_angular(ctx: Context, art: Artifacts) -> dict:
    T = ctx.distribution(ctx.cfg["angular"]["distribution"])
    grid = ctx.grid([T])
    u = k_map(T, grid)
    spec = angular_spectrum(u)
    art.add("angular.csv", csv_text(["l", "norm2"], [[ell, float(v)] for ell, v in enumerate(spec)]))
    buf = io.StringIO()
    u.to_csv(buf)
    art.add("vector.csv", buf.getvalue())
    return {"command": "angular", "grid": grid.to_json(), "order": T.order,
            "spectrum": spec, "norm2": u.norm2()}


COMMANDS = {
    "detector": cmd_detector, "kms": cmd_kms, "commutator": cmd_commutator,
    "wavefront": cmd_wavefront, "translate": cmd_translate, "hadamard": cmd_hadamard,
    "angular": cmd_angular,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML or JSON run configuration")
    common.add_argument("--out", help="output directory (overrides config)")
    common.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    common.add_argument("--threads", type=int, help="worker threads (overrides config)")
    common.add_argument("--dump-config", action="store_true",
                        help="print the resolved configuration as JSON and exit")
    parser = argparse.ArgumentParser(prog="worldfield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=func.__name__.replace("cmd_", "") + " run")
    return parser


def run(args) -> int:
    cfg = load_config(args.config, {"out": args.out, "seed": args.seed, "threads": args.threads})
    if args.dump_config:
        sys.stdout.write(dump(cfg) + "\n")
        return 0
    ctx = Context(cfg)
    art = Artifacts()
    summary = COMMANDS[args.command](ctx, art)
    art.add("config.json", dump(cfg) + "\n")
    art.add("summary.json", to_json_text(summary))
    art.write(Path(cfg["out"]))
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except ValidationError as exc:
        log.error("validation failed: %s", exc)
        return EXIT_VALIDATION
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except (WorldfieldError, ValueError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
