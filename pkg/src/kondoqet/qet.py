"""Quantum energy teleportation: Alice measures, Bob rotates conditionally.

Bob's extracted energy is evaluated two ways that must agree: the closed
form in (xi, eta) and the direct average over the two measurement branches.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from kondoqet.eigen import ground_state
from kondoqet.errors import (
    ImpossibleOutcomeError,
    NumericalConsistencyError,
    StructuralError,
    UndefinedAngleError,
)
from kondoqet.hilbert import (
    OperatorSum,
    PauliString,
    StateVector,
    apply_operator,
    apply_pauli_string,
    commutes,
    expectation,
    i_commutator,
)
from kondoqet.model import ModelParams, bob_local_hamiltonian, build_hamiltonian, shift_ground

OUTCOME_TOL = 1e-12


@dataclass(frozen=True)
class QetResult:
    xi: float
    eta: float
    theta: float
    p_plus: float
    e_injected: float
    e_b_closed: float
    e_b_direct: float
    e_teleported: float
    e0: float = math.nan
    gap: float = math.nan
    degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _check_unit_single(s: PauliString, who: str):
    if len(s.factors) != 1 or s.coeff != 1.0:
        raise StructuralError(f"{who} must be a unit-coefficient single-site Pauli, got {s}")


def _project(g: StateVector, sA: PauliString, mu: int) -> np.ndarray:
    """Unnormalized ``P(mu)|g> = (|g> + mu sA|g>) / 2``."""
    if mu not in (1, -1):
        raise StructuralError(f"measurement outcome must be +1 or -1, got {mu!r}")
    return 0.5 * (g.amplitudes + mu * apply_pauli_string(sA, g).amplitudes)


def measurement_probabilities(g: StateVector, sA: PauliString) -> tuple[float, float]:
    _check_unit_single(sA, "sA")
    m = expectation(sA, g)
    return 0.5 * (1.0 + m), 0.5 * (1.0 - m)


def post_measurement_state(g: StateVector, sA: PauliString, mu: int) -> StateVector:
    _check_unit_single(sA, "sA")
    p_plus, p_minus = measurement_probabilities(g, sA)
    p = p_plus if mu == 1 else p_minus
    if p < OUTCOME_TOL:
        raise ImpossibleOutcomeError(f"outcome mu={mu:+d} has probability {p:.3e}")
    branch = _project(g, sA, mu)
    return StateVector(branch / np.linalg.norm(branch))


def injected_energy(g: StateVector, h_shifted: OperatorSum, sA: PauliString) -> float:
    """Average energy deposited by Alice's measurement, ``sum_mu <g|P h P|g>``."""
    _check_unit_single(sA, "sA")
    total = 0.0
    for mu in (1, -1):
        phi = StateVector(_project(g, sA, mu), raw=True)
        total += expectation(h_shifted, phi)
    return total


def xi(g: StateVector, h_shifted: OperatorSum, sB: PauliString) -> float:
    """Energy of ``sB|g>`` measured against the zero-ground Hamiltonian."""
    _check_unit_single(sB, "sB")
    return expectation(h_shifted, StateVector(apply_pauli_string(sB, g).amplitudes))


def eta(g: StateVector, h: OperatorSum, sA: PauliString, sB: PauliString, tol: float = 1e-10) -> float:
    """Correlation ``<g| sA i[h, sB] |g>`` driving the extraction."""
    _check_unit_single(sA, "sA")
    _check_unit_single(sB, "sB")
    if sA.sites == sB.sites:
        raise StructuralError("sA and sB must act on distinct sites")
    dot = apply_operator(i_commutator(h, sB), g)
    value = g.vdot(apply_pauli_string(sA, dot))
    if abs(value.imag) >= tol:
        raise NumericalConsistencyError(f"eta has imaginary part {value.imag:.3e}")
    return value.real


def optimal_theta(xi_value: float, eta_value: float) -> float:
    """Rotation angle minimizing Bob's local energy, in (-pi/2, pi/2].

    With U(mu) = cos(theta) - i mu sin(theta) sB the branch-averaged energy
    is ``xi sin^2(theta) - (eta/2) sin(2 theta)``, minimized at
    cos(2 theta) = xi/r and sin(2 theta) = eta/r.
    """
    r = math.hypot(xi_value, eta_value)
    if r == 0.0:
        raise UndefinedAngleError("theta undefined for xi = eta = 0")
    return 0.5 * math.atan2(eta_value, xi_value)


def conditional_unitary(mu: int, theta: float, sB: PauliString) -> tuple[float, PauliString]:
    """U(mu) = a * I - i * b, returned as ``(a, b)`` with ``b`` a weighted Pauli string."""
    _check_unit_single(sB, "sB")
    if mu not in (1, -1):
        raise StructuralError(f"measurement outcome must be +1 or -1, got {mu!r}")
    return math.cos(theta), sB.with_coeff(mu * math.sin(theta))


def apply_conditional_unitary(mu: int, theta: float, sB: PauliString, psi: StateVector) -> StateVector:
    a, b = conditional_unitary(mu, theta, sB)
    out = a * psi.amplitudes - 1j * apply_pauli_string(b, psi).amplitudes
    return StateVector(out, raw=True)


def teleported_energy_closed(xi_value: float, eta_value: float) -> float:
    return 0.5 * (xi_value - math.hypot(xi_value, eta_value))


def teleported_energy_direct(
    g: StateVector, sA: PauliString, sB: PauliString, theta: float, h_B: OperatorSum
) -> float:
    """``Tr[rho_QET h_B]`` summed over the two unnormalized branches."""
    _check_unit_single(sA, "sA")
    total = 0.0
    for mu in (1, -1):
        phi = StateVector(_project(g, sA, mu), raw=True)
        phi = apply_conditional_unitary(mu, theta, sB, phi)
        total += expectation(h_B, phi)
    return total


def protocol_from_operators(
    g: StateVector,
    h_shifted: OperatorSum,
    h_B: OperatorSum,
    sA: PauliString,
    sB: PauliString,
) -> QetResult:
    """Run the protocol given the zero-ground Hamiltonian and Bob's block."""
    if not commutes(h_B, sA):
        raise StructuralError("Alice's observable must commute with Bob's local block")
    x = xi(g, h_shifted, sB)
    e = eta(g, h_shifted, sA, sB)
    try:
        theta = optimal_theta(x, e)
    except UndefinedAngleError:
        # sB|g> = |g> up to energy: nothing to extract, U = I
        theta = 0.0
    p_plus, _ = measurement_probabilities(g, sA)
    closed = teleported_energy_closed(x, e)
    return QetResult(
        xi=x,
        eta=e,
        theta=theta,
        p_plus=p_plus,
        e_injected=injected_energy(g, h_shifted, sA),
        e_b_closed=closed,
        e_b_direct=teleported_energy_direct(g, sA, sB, theta, h_B),
        e_teleported=0.0 - closed,
    )


def run_protocol(params: ModelParams) -> QetResult:
    params.check_protocol()
    h = build_hamiltonian(params)
    ground = ground_state(h, n=params.N)
    return protocol_for_ground(params, h, ground)


def protocol_for_ground(params: ModelParams, h: OperatorSum, ground) -> QetResult:
    g = ground.state
    h_shifted = shift_ground(h, ground.e0)
    block = bob_local_hamiltonian(params, g)
    res = protocol_from_operators(g, h_shifted, block.op, params.sigma_A, params.sigma_B)
    return QetResult(
        **{**res.to_dict(), "e0": ground.e0, "gap": ground.gap, "degenerate": ground.degenerate}
    )
