"""Stochastic compilation of unitaries into gate sequences."""

__version__ = "0.1.0"

from .analysis import IdealPath, PathProfile, compilation_stats, path_profile
from .baselines import ideal_sequence, qdrift, randomized_trotter
from .compiler import CompilationTrace, StoqConfig, compile
from .gates import (
    CompiledSequence,
    GateAlphabet,
    GateInstance,
    GateSpec,
    hamiltonian_term_alphabet,
    universal_alphabet,
)
from .hamiltonian import Hamiltonian, PauliString, ising_hamiltonian, preset
from .linalg import cost, hermitian_expi, hs_overlap, trace_distance
from .random_targets import haar_random_unitary, random_circuit

__all__ = [
    "CompilationTrace",
    "CompiledSequence",
    "GateAlphabet",
    "GateInstance",
    "GateSpec",
    "Hamiltonian",
    "IdealPath",
    "PathProfile",
    "PauliString",
    "StoqConfig",
    "compilation_stats",
    "compile",
    "cost",
    "haar_random_unitary",
    "hamiltonian_term_alphabet",
    "hermitian_expi",
    "hs_overlap",
    "ideal_sequence",
    "ising_hamiltonian",
    "path_profile",
    "preset",
    "qdrift",
    "random_circuit",
    "randomized_trotter",
    "trace_distance",
    "universal_alphabet",
]
