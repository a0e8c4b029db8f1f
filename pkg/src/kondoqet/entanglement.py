"""Entanglement diagnostics: reduced densities, entropies, Schmidt spectra.

All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg

from kondoqet.eigen import ground_state
from kondoqet.errors import CapabilityError, DomainError, StructuralError
from kondoqet.hilbert import MAX_DENSE_SITES, OperatorSum, PauliString, StateVector, expectation
from kondoqet.qet import measurement_probabilities, post_measurement_state, protocol_from_operators

EIG_CLAMP = 1e-14


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    matrix: np.ndarray
    subsystem: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    coefficients: np.ndarray
    cut: int

    def entropy(self) -> float:
        return _entropy_from_probs(self.coefficients**2)


@dataclass(frozen=True)
class MinimalModelCase:
    h: float
    k: float
    lam: float
    delta_S: float
    e_b: float
    rhs_eq9: float

    @property
    def margin(self) -> float:
        return self.delta_S - self.rhs_eq9


def _entropy_from_probs(p: np.ndarray) -> float:
    p = np.where(p > EIG_CLAMP, p, 0.0)
    nz = p[p > 0]
    return 0.0 - float(np.sum(nz * np.log(nz)))


def reduced_density(psi: StateVector, subset: Iterable[int]) -> ReducedDensity:
    """Partial trace of ``|psi><psi|`` onto ``subset`` (1-based sites, kept in ascending order)."""
    sites = tuple(sorted(set(int(s) for s in subset)))
    n = psi.n
    if not sites or len(sites) >= n:
        raise StructuralError(f"subset must be a nonempty proper subset of 1..{n}, got {sites}")
    if sites[0] < 1 or sites[-1] > n:
        raise StructuralError(f"subset {sites} out of range for N={n}")
    keep = [s - 1 for s in sites]
    rest = [a for a in range(n) if a not in keep]
    amps = psi.amplitudes.reshape((2,) * n).transpose(keep + rest)
    m = amps.reshape(1 << len(keep), -1)
    rho = m @ m.conj().T
    return ReducedDensity(rho, sites)


def von_neumann_entropy(rho: ReducedDensity | np.ndarray) -> float:
    mat = rho.matrix if isinstance(rho, ReducedDensity) else np.asarray(rho)
    return _entropy_from_probs(scipy.linalg.eigvalsh(mat))


def schmidt_coefficients(psi: StateVector, cut: int) -> SchmidtSpectrum:
    """Singular values across the bond after site ``cut`` (left block = sites 1..cut)."""
    n = psi.n
    if not 1 <= cut <= n - 1:
        raise StructuralError(f"cut={cut} outside [1, {n - 1}]")
    m = psi.amplitudes.reshape(1 << cut, 1 << (n - cut))
    sv = scipy.linalg.svd(m, compute_uv=False)
    return SchmidtSpectrum(np.sort(sv)[::-1], cut)


def cut_entropy(psi: StateVector, cut: int) -> float:
    return schmidt_coefficients(psi, cut).entropy()


def half_chain_entropy(psi: StateVector) -> float:
    return cut_entropy(psi, psi.n // 2)


def delta_S_AB(g: StateVector, sA: PauliString, cut: int) -> float:
    """Average loss of entanglement across ``cut`` caused by measuring ``sA``."""
    before = cut_entropy(g, cut)
    probs = measurement_probabilities(g, sA)
    after = 0.0
    for mu, p in zip((1, -1), probs):
        if p < 1e-12:
            continue
        after += p * cut_entropy(post_measurement_state(g, sA, mu), cut)
    return before - after


def magnetization(psi: StateVector) -> float:
    """Mean bare-Z polarization ``(1/N) sum_i <Z_i>``."""
    n = psi.n
    probs = np.abs(psi.amplitudes) ** 2
    idx = np.arange(psi.dim)
    total = 0.0
    for site in range(1, n + 1):
        bit = (idx >> (n - site)) & 1
        total += float(np.sum(probs * (1 - 2 * bit)))
    return total / n


def operator_norm(h: OperatorSum) -> float:
    """Spectral norm on the operator's own support, offset included."""
    support = h.support
    if not support:
        return abs(h.offset)
    if len(support) > MAX_DENSE_SITES:
        raise CapabilityError(f"support of {len(support)} sites too large for a dense norm")
    compact = h.relabeled({s: k + 1 for k, s in enumerate(support)})
    vals = scipy.linalg.eigvalsh(compact.to_dense(len(support)))
    return float(np.max(np.abs(vals)))


def bound_eq10_margin(s_a_comp: float, e_b: float, h_b_norm: float) -> float:
    """``S_A - E_B^2 / (4 ||H_B||^2)``; nonnegative when the entropy bound holds."""
    if h_b_norm <= 0.0:
        raise DomainError("local block norm must be positive")
    return s_a_comp - e_b**2 / (4.0 * h_b_norm**2)


def eq9_rhs(h: float, k: float, e_b: float) -> float:
    lam = math.atan(k / h)
    c, s = math.cos(lam), math.sin(lam)
    return -(1 + s * s) / (2 * c**3) * math.log((1 + c) / (1 - c)) * e_b / math.hypot(h, k)


def minimal_model_hamiltonian(h: float, k: float) -> OperatorSum:
    return OperatorSum(
        (
            PauliString(h, ((1, "Z"),)),
            PauliString(h, ((2, "Z"),)),
            PauliString(2 * k, ((1, "X"), (2, "X"))),
        )
    )


def minimal_model_case(h: float, k: float) -> MinimalModelCase:
    """Two-qubit QET: Alice measures X on qubit 0, Bob rotates with Y on qubit 1."""
    if not h > 0:
        raise DomainError(f"minimal model needs h > 0, got {h}")
    if k == 0:
        raise DomainError("minimal model needs k != 0")
    ham = minimal_model_hamiltonian(h, k)
    gr = ground_state(ham, n=2)
    h_shifted = ham.shifted(-gr.e0)
    raw_b = OperatorSum((PauliString(h, ((2, "Z"),)), PauliString(2 * k, ((1, "X"), (2, "X")))))
    h_b = raw_b.shifted(-expectation(raw_b, gr.state))
    sA = PauliString.single(1, "X")
    sB = PauliString.single(2, "Y")
    res = protocol_from_operators(gr.state, h_shifted, h_b, sA, sB)
    e_b = res.e_teleported
    return MinimalModelCase(
        h=h,
        k=k,
        lam=math.atan(k / h),
        delta_S=delta_S_AB(gr.state, sA, 1),
        e_b=e_b,
        rhs_eq9=eq9_rhs(h, k, e_b),
    )
