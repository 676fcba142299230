"""Harmonic reconstruction on spherical caps and selection among candidate
reconstructions from noisy ground samples."""
from .chooser import SelectionReport, build_directions, select, surrogate_h, verify_theorem
from .field import DiscreteField, NoiseSpec, add_noise, relative_error, sample
from .kernels import CandidateParams, KernelSymbols, apply_candidate, solve_symbols
from .quadrature import (CapGeometry, QuadratureRule, cap_rule, check_exactness,
                         discrete_inner, full_sphere_rule)
from .sphharm import SphCoeffs, UnitDirection, eval_Y, legendre_P, synthesize, upward_continue

__version__ = "0.1.0"

__all__ = [
    "SelectionReport", "build_directions", "select", "surrogate_h", "verify_theorem",
    "DiscreteField", "NoiseSpec", "add_noise", "relative_error", "sample",
    "CandidateParams", "KernelSymbols", "apply_candidate", "solve_symbols",
    "CapGeometry", "QuadratureRule", "cap_rule", "check_exactness", "discrete_inner",
    "full_sphere_rule", "SphCoeffs", "UnitDirection", "eval_Y", "legendre_P", "synthesize",
    "upward_continue",
]
