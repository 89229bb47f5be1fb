"""Quantum fields smeared along timelike worldlines in Minkowski space.

Modules:
    worldline    timelike curves, proper time and adapted tetrads
    jetdistro    distributions supported on curves, transforms, push-forward, wave front scans
    oneparticle  mass-shell vectors KT, two-point and commutator functionals
    hadamard     pulled-back vacuum kernels, detector spectra, Hadamard coefficients
    ccr          finite-rank Weyl algebra, quasifree states, Gaussian CP maps
    cli          the ``worldfield`` command-line tool
"""

from .ccr import (GaussianCPMap, GeneratorFamily, QuasifreeState, WeylWord, adjoint,
                  compose_state, cp_apply, gns_gram_check, gram_assemble, shift_lattice,
                  state_evaluate, translation_map_build, weyl_multiply)
from .coefficients import CosinePowerBump, GaussianBump, SmoothBump
from .hadamard import (PulledBackKernel, detector_response, hadamard_recursion, kms_fit,
                       pauli_jordan_smeared, short_distance_check)
from .jetdistro import (GeneralJet, JetDistribution, canonicalize, evaluate_against,
                        fourier_transform, fourier_transform_numeric, mollify, pushforward,
                        wavefront_scan)
from .oneparticle import (ModeGrid, OneParticleVector, angular_spectrum, commutator,
                          detector_norm, inner_product, k_map, k_map_general, k_map_inertial,
                          two_point)
from .worldline import Circular, Inertial, Rindler, Tabulated, reparametrize_proper_time, tetrad_at

__version__ = "0.1.0"

__all__ = [
    "Circular", "CosinePowerBump", "GaussianBump", "GaussianCPMap", "GeneralJet",
    "GeneratorFamily", "Inertial", "JetDistribution", "ModeGrid", "OneParticleVector",
    "PulledBackKernel", "QuasifreeState", "Rindler", "SmoothBump", "Tabulated", "WeylWord",
    "adjoint", "angular_spectrum", "canonicalize", "commutator", "compose_state", "cp_apply",
    "detector_norm", "detector_response", "evaluate_against", "fourier_transform",
    "fourier_transform_numeric", "gns_gram_check", "gram_assemble", "hadamard_recursion",
    "inner_product", "k_map", "k_map_general", "k_map_inertial", "kms_fit", "mollify",
    "pauli_jordan_smeared", "pushforward", "reparametrize_proper_time", "shift_lattice",
    "short_distance_check", "state_evaluate", "tetrad_at", "translation_map_build",
    "two_point", "wavefront_scan", "weyl_multiply",
]
