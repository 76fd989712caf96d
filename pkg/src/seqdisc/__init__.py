"""Optimal unambiguous discrimination of sequences of equal-overlap pure states."""

from .errors import (
    CapacityError,
    ConsistencyError,
    DomainError,
    NotPositiveDefiniteError,
    PreconditionError,
    SeqDiscError,
    SolverFailure,
)
from .gram import GramSpectrum, gram_structured, spectrum_crosscheck, structured_spectrum
from .optimum import OptimalityReport, dual_certificate, optimal_sequence, optimal_single, verify_optimality
from .povmsim import Povm, build_unambiguous_povm, simulate_collective, simulate_individual
from .sdp import SdpOptions, SdpProblem, SdpSolution, extract_dual, solve_primal
from .stateset import ParentSpec, build_parent_states, sequence_states

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConsistencyError",
    "DomainError",
    "GramSpectrum",
    "NotPositiveDefiniteError",
    "OptimalityReport",
    "ParentSpec",
    "Povm",
    "PreconditionError",
    "SdpOptions",
    "SdpProblem",
    "SdpSolution",
    "SeqDiscError",
    "SolverFailure",
    "build_parent_states",
    "build_unambiguous_povm",
    "dual_certificate",
    "extract_dual",
    "gram_structured",
    "optimal_sequence",
    "optimal_single",
    "sequence_states",
    "simulate_collective",
    "simulate_individual",
    "solve_primal",
    "spectrum_crosscheck",
    "structured_spectrum",
    "verify_optimality",
]
