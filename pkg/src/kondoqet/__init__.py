"""Quantum energy teleportation on a Kondo-impurity XXZ spin chain.

Exact diagonalization of small chains (N <= 12), the two-party QET protocol,
entanglement diagnostics and parameter sweeps.
"""

from kondoqet.eigen import GroundResult, ground_state, lowest_eigenpairs
from kondoqet.hilbert import OperatorSum, PauliString, StateVector, apply_operator, expectation
from kondoqet.kernels import BACKEND
from kondoqet.model import ModelParams, build_hamiltonian
from kondoqet.qet import QetResult, run_protocol

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "GroundResult",
    "ModelParams",
    "OperatorSum",
    "PauliString",
    "QetResult",
    "StateVector",
    "apply_operator",
    "build_hamiltonian",
    "expectation",
    "ground_state",
    "lowest_eigenpairs",
    "run_protocol",
]
