"""Convex roof of the square-root threetangle for mixtures of GHZ and W superpositions."""
from .bloch import BlochPoint, InteriorPoint
from .classifier import Region, RoofResult, classify, classify_many, roof_value, roof_values, structure, surface_pattern
from .decompositions import (
    Decomposition,
    avg_tangle,
    convexify,
    decide_02_vs_21,
    find_M_states,
    find_N_states,
    locking_perturbation,
    optimize_21_line,
)
from .errors import RoofError
from .oracle import brute_force_roof
from .tangle import P0, Amplitudes3Q, sqrt_tau3_analytic, sqrt_threetangle, superpose, threetangle
from .zero_polytope import ghz_w_polytope, zero_polytope

__all__ = [
    "P0",
    "Amplitudes3Q",
    "BlochPoint",
    "Decomposition",
    "InteriorPoint",
    "Region",
    "RoofError",
    "RoofResult",
    "avg_tangle",
    "brute_force_roof",
    "classify",
    "classify_many",
    "convexify",
    "decide_02_vs_21",
    "find_M_states",
    "find_N_states",
    "ghz_w_polytope",
    "locking_perturbation",
    "optimize_21_line",
    "roof_value",
    "roof_values",
    "sqrt_tau3_analytic",
    "sqrt_threetangle",
    "structure",
    "superpose",
    "threetangle",
    "zero_polytope",
]
