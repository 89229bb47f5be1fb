"""Finite-rank Weyl algebra, quasifree states and Gaussian CP translation maps.

A family of real distributions T_1..T_n spans the generator space R^n.  Its
Gram matrix M_jk = <K T_j, K T_k> splits into the covariance C = Re M and the
symplectic form S = Im M.  Weyl elements W(c) obey

    W(c1) W(c2) = exp(-(i/2) c1^T S c2) W(c1 + c2),

and a quasifree state with covariance Q has omega(W(c)) = exp(-c^T Q c / 4).
Positivity is always checked operationally by brute-force GNS Gram matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .jetdistro import JetDistribution, pushforward
from .oneparticle import ModeGrid, default_anchor, inner_product, k_map

GRAM_TOL = 1e-8
HERMITIAN_TOL = 1e-10


def _symplectic(family) -> np.ndarray:
    if isinstance(family, GeneratorFamily):
        return family.S
    S = np.asarray(family, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("symplectic data must be a square matrix")
    return S


# ---------------------------------------------------------------------------
# Generator families


@dataclass(frozen=True)
class GeneratorFamily:
    """Real distributions with their one-particle Gram data."""

    distributions: tuple
    M: np.ndarray
    grid: ModeGrid | None = None
    vectors: tuple = field(default=(), repr=False)
    anchor: tuple | None = None

    @property
    def size(self) -> int:
        return self.M.shape[0]

    @property
    def C(self) -> np.ndarray:
        return self.M.real

    @property
    def S(self) -> np.ndarray:
        return self.M.imag

    def vacuum(self) -> "QuasifreeState":
        return QuasifreeState(self.C.copy())

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "generators": [T.to_json() for T in self.distributions],
            "gram_real": self.M.real.tolist(),
            "gram_imag": self.M.imag.tolist(),
            "grid": self.grid.to_json() if self.grid is not None else None,
            "anchor": list(self.anchor) if self.anchor is not None else None,
        }


def _validate_gram(M: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(M)):
        raise ValidationError("non-finite Gram matrix")
    scale = max(float(np.max(np.abs(M))), 1e-300)
    if np.max(np.abs(M - M.conj().T)) > HERMITIAN_TOL * max(scale, 1.0):
        raise ValidationError("Gram matrix is not hermitian")
    M = 0.5 * (M + M.conj().T)
    trace = float(np.trace(M).real)
    if M.size and np.linalg.eigvalsh(M)[0] < -GRAM_TOL * max(trace, 0.0):
        raise ValidationError("Gram matrix is not positive semidefinite")
    return M


def family_from_vectors(distributions, vectors, grid=None, anchor=None) -> GeneratorFamily:
    vectors = tuple(vectors)
    n = len(vectors)
    M = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(j, n):
            M[j, k] = inner_product(vectors[j], vectors[k])
            M[k, j] = np.conj(M[j, k])
    return GeneratorFamily(tuple(distributions), _validate_gram(M), grid, vectors,
                           None if anchor is None else tuple(float(a) for a in anchor))


def common_anchor(distributions) -> np.ndarray:
    """Mean of the per-distribution anchors; shared so that M is an exact Gram matrix."""
    pts = [default_anchor(T) for T in distributions if T.coefficients]
    return np.mean(pts, axis=0) if pts else np.zeros(3)


def _map_all(distributions, grid, anchor):
    return [k_map(T, grid, anchor=anchor) for T in distributions]


def gram_assemble(distributions, grid: ModeGrid, anchor=None) -> GeneratorFamily:
    """Map every (real) distribution onto ``grid`` and assemble M_jk = <K T_j, K T_k>."""
    distributions = list(distributions)
    for T in distributions:
        if not T.is_real:
            raise ValueError("generator distributions must be real")
    anchor = common_anchor(distributions) if anchor is None else np.asarray(anchor, dtype=float)
    return family_from_vectors(distributions, _map_all(distributions, grid, anchor), grid, anchor)


def shift_lattice(template: JetDistribution, step: float, count: int) -> list:
    """Generators a_alpha(t - j step), j = 0..count-1 (coefficient shifts)."""
    return [pushforward(template, j * step, "fermi-walker") for j in range(count)]


# ---------------------------------------------------------------------------
# Weyl words and states


@dataclass(frozen=True)
class WeylWord:
    """phase * W(c) in reduced single-factor form."""

    c: np.ndarray
    phase: complex = 1.0

    @classmethod
    def from_factors(cls, factors, family) -> "WeylWord":
        """Reduce a product of (c, phase) factors left to right."""
        factors = list(factors)
        if not factors:
            raise ValueError("empty Weyl word")
        word = cls(np.asarray(factors[0][0], dtype=float), complex(factors[0][1]))
        for c, phase in factors[1:]:
            word = weyl_multiply(word, cls(np.asarray(c, dtype=float), complex(phase)), family)
        return word

    @classmethod
    def identity(cls, n: int) -> "WeylWord":
        return cls(np.zeros(n), 1.0)


def weyl_multiply(w1: WeylWord, w2: WeylWord, family) -> WeylWord:
    S = _symplectic(family)
    c1 = np.asarray(w1.c, dtype=float)
    c2 = np.asarray(w2.c, dtype=float)
    phase = complex(w1.phase) * complex(w2.phase) * np.exp(-0.5j * (c1 @ S @ c2))
    return WeylWord(c1 + c2, phase)


def adjoint(w: WeylWord) -> WeylWord:
    return WeylWord(-np.asarray(w.c, dtype=float), np.conj(complex(w.phase)))


@dataclass(frozen=True)
class QuasifreeState:
    """omega(W(c)) = exp(-c^T Q c / 4)."""

    Q: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("covariance must be a square matrix")
        if np.max(np.abs(Q - Q.T), initial=0.0) > HERMITIAN_TOL * max(1.0, np.max(np.abs(Q))):
            raise ValueError("covariance must be symmetric")
        object.__setattr__(self, "Q", 0.5 * (Q + Q.T))


def state_evaluate(state: QuasifreeState, w: WeylWord) -> complex:
    c = np.asarray(w.c, dtype=float)
    return complex(w.phase) * np.exp(-0.25 * (c @ state.Q @ c))


def gns_gram_check(state: QuasifreeState, family, words) -> float:
    """Smallest eigenvalue of G_ij = omega(W_i^* W_j)."""
    words = list(words)
    if not words:
        raise ValueError("at least one word is needed")
    k = len(words)
    G = np.empty((k, k), dtype=complex)
    for i in range(k):
        left = adjoint(words[i])
        for j in range(k):
            G[i, j] = state_evaluate(state, weyl_multiply(left, words[j], family))
    G = 0.5 * (G + G.conj().T)
    return float(np.linalg.eigvalsh(G)[0])


def random_words(rng: np.random.Generator, n: int, count: int, scale: float = 1.0,
                 support=None) -> list:
    """Random Weyl words with normal coefficients, optionally restricted to ``support``."""
    words = []
    for _ in range(count):
        c = rng.normal(scale=scale, size=n)
        if support is not None:
            mask = np.zeros(n, dtype=bool)
            mask[list(support)] = True
            c = np.where(mask, c, 0.0)
        words.append(WeylWord(c, np.exp(1j * rng.uniform(0, 2 * np.pi))))
    return words


# ---------------------------------------------------------------------------
# Gaussian CP maps


@dataclass
class GaussianCPMap:
    """alpha(W(c)) = rho(W(c)) W(L c), rho quasifree with covariance Q_rho on CCR(., s_L)."""

    L: np.ndarray
    s_L: np.ndarray
    Q_rho: np.ndarray
    source: GeneratorFamily
    target: GeneratorFamily
    mu: float = 0.0
    retained: tuple = ()
    dropped: tuple = ()
    automorphism: bool = False
    escalations: int = 0
    noise_min_eig: float = 1.0
    shift: float = 0.0
    rule: str = "fermi-walker"

    @property
    def s_norm(self) -> float:
        return float(np.linalg.norm(self.s_L))

    def noise_state(self) -> QuasifreeState:
        return QuasifreeState(self.Q_rho)

    def to_json(self) -> dict:
        return {
            "shift": self.shift, "rule": self.rule,
            "L": self.L.tolist(), "s_L": self.s_L.tolist(), "Q_rho": self.Q_rho.tolist(),
            "s_L_norm": self.s_norm, "mu": self.mu, "escalations": self.escalations,
            "noise_min_eig": self.noise_min_eig, "automorphism": self.automorphism,
            "retained": list(self.retained), "dropped": list(self.dropped),
            "source_size": self.source.size, "target_size": self.target.size,
        }


def translation_map_build(family: GeneratorFamily, step: float, k: int, rule: str = "fermi-walker",
                          rng: np.random.Generator | None = None, words: int = 12,
                          tol: float = 1e-8, identify_tol: float = 1e-12) -> GaussianCPMap:
    """Gaussian CP map of the push-forward by t = k * step on a shift-lattice family.

    Generator j maps to the push-forward of T_j.  When that coincides with a
    lattice member (same one-particle vector) L is an index shift, otherwise the
    pushed generator is appended to the target family.  Indices whose image
    leaves the lattice are dropped and reported.  The noise covariance is
    mu * I with mu = 2 * largest singular value of s_L, validated by a GNS Gram
    check and doubled up to three times.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    n = family.size
    if family.grid is None or len(family.vectors) != n:
        raise ValueError("family must carry its grid and one-particle vectors")
    t = k * step
    anchor = None if family.anchor is None else np.asarray(family.anchor)
    retained = tuple(j for j in range(n) if 0 <= j + k < n)
    dropped = tuple(j for j in range(n) if not 0 <= j + k < n)

    extra_T, extra_u, columns = [], [], {}
    for j in retained:
        T = pushforward(family.distributions[j], t, rule)
        u = k_map(T, family.grid, anchor=anchor)
        ref = family.vectors[j + k]
        diff = (u + ref * -1.0).norm2()
        if diff <= identify_tol * max(ref.norm2(), u.norm2(), 1e-300):
            columns[j] = j + k
        else:
            columns[j] = n + len(extra_T)
            extra_T.append(T)
            extra_u.append(u)

    if extra_T:
        target = family_from_vectors(list(family.distributions) + extra_T,
                                     list(family.vectors) + extra_u, family.grid, family.anchor)
    else:
        target = family
    L = np.zeros((target.size, n))
    for j, i in columns.items():
        L[i, j] = 1.0

    keep = np.zeros(n, dtype=bool)
    keep[list(retained)] = True
    S = np.where(np.outer(keep, keep), family.S, 0.0)
    s_L = S - L.T @ target.S @ L
    s_L = 0.5 * (s_L - s_L.T)
    automorphism = float(np.linalg.norm(s_L)) <= tol * max(float(np.linalg.norm(S)), 1e-300)

    escalations = 0
    if automorphism:
        mu = 0.0
        Q_rho = np.zeros((n, n))
        noise_min = 1.0
    else:
        mu = 2.0 * float(np.linalg.svd(s_L, compute_uv=False)[0])
        support = retained if retained else None
        test_words = [WeylWord.identity(n)] + random_words(rng, n, words, support=support)
        while True:
            Q_rho = mu * np.diag(keep.astype(float))
            noise_min = gns_gram_check(QuasifreeState(Q_rho), s_L, test_words)
            if noise_min >= -1e-9:
                break
            if escalations == 3:
                raise ValidationError("noise functional failed the positivity check")
            escalations += 1
            mu *= 2.0
    return GaussianCPMap(L, s_L, Q_rho, family, target, mu, retained, dropped,
                         automorphism, escalations, noise_min, t, rule)


def _check_domain(cp: GaussianCPMap, c: np.ndarray):
    if cp.dropped and np.any(c[list(cp.dropped)] != 0.0):
        raise ValueError("word has weight on generators dropped at the lattice boundary")


def cp_apply(cp: GaussianCPMap, w: WeylWord) -> WeylWord:
    """alpha(phase W(c)) = phase * exp(-c^T Q_rho c / 4) * W(L c)."""
    c = np.asarray(w.c, dtype=float)
    _check_domain(cp, c)
    damping = np.exp(-0.25 * (c @ cp.Q_rho @ c))
    return WeylWord(cp.L @ c, complex(w.phase) * damping)


def compose_state(state: QuasifreeState, cp: GaussianCPMap) -> QuasifreeState:
    """omega o alpha as a quasifree state on the source family: Q_rho + L^T Q L."""
    return QuasifreeState(cp.Q_rho + cp.L.T @ state.Q @ cp.L)


__all__ = [
    "GaussianCPMap", "GeneratorFamily", "QuasifreeState", "WeylWord", "adjoint",
    "common_anchor", "compose_state", "cp_apply", "family_from_vectors", "gns_gram_check",
    "gram_assemble", "random_words", "shift_lattice", "state_evaluate",
    "translation_map_build", "weyl_multiply",
]
