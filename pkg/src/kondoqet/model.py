"""Kondo-impurity XXZ chain and its zero-point local blocks.

The impurity spin sits at site 1 and talks to the host only through the
Kondo bond to ``coupled_site``.  The host chain is sites 2..N with open
boundaries.  Spin operators are S = sigma/2, so bond Pauli pairs carry J/4
and the field carries B/2 per Z.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from kondoqet.errors import DegenerateModelError, StructuralError
from kondoqet.hilbert import (
    AXES,
    MAX_DENSE_SITES,
    OperatorSum,
    PauliString,
    StateVector,
    expectation,
    i_commutator,
)

IMPURITY_SITE = 1


@dataclass(frozen=True)
class ModelParams:
    """Chain geometry and couplings; defaults follow the N=8 phase-diagram setup.

    Energies are in units of the bulk coupling scale; sites are 1-based.
    Geometry constraints for the QET protocol (Alice/Bob placement) are
    checked separately by :meth:`check_protocol`, so a bare Hamiltonian can
    still be built for tiny fixtures.
    """

    N: int = 8
    J: float = 0.5
    Delta: float = 1.0
    Jk: float = 0.2
    B: float = 0.4
    coupled_site: int = 2
    n_A: int = 4
    n_B: int = 7
    sigma_A_axis: str = "X"
    sigma_B_axis: str = "Y"
    include_impurity_bulk_bond: bool = False

    def __post_init__(self):
        if isinstance(self.N, bool) or not isinstance(self.N, (int, np.integer)):
            raise StructuralError(f"N must be an integer, got {self.N!r}")
        if not 1 <= self.N <= MAX_DENSE_SITES:
            raise StructuralError(f"N={self.N} outside [1, {MAX_DENSE_SITES}]")
        for name in ("J", "Delta", "Jk", "B"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise StructuralError(f"{name} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise StructuralError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("sigma_A_axis", "sigma_B_axis"):
            axis = str(getattr(self, name)).upper()
            if axis not in AXES:
                raise StructuralError(f"{name} must be one of {AXES}, got {axis!r}")
            object.__setattr__(self, name, axis)
        if self.N >= 2 and not 2 <= self.coupled_site <= self.N:
            raise StructuralError(f"coupled_site={self.coupled_site} outside [2, N={self.N}]")

    def check_protocol(self) -> "ModelParams":
        """Validate the Alice/Bob geometry needed by the QET protocol."""
        outside = [f"{name}={getattr(self, name)}" for name in ("n_A", "n_B") if not 1 <= getattr(self, name) <= self.N]
        if outside:
            raise StructuralError(f"{', '.join(outside)} out of range [1, N={self.N}]")
        for name in ("n_A", "n_B"):
            if getattr(self, name) == IMPURITY_SITE:
                raise StructuralError(f"{name} may not sit on the impurity site")
        if self.N < 4:
            raise StructuralError(f"N={self.N} too small for the QET protocol (need N >= 4)")
        if self.n_A == self.n_B:
            raise StructuralError("n_A and n_B must differ")
        if abs(self.n_A - self.n_B) < 2:
            raise StructuralError("|n_A - n_B| must be >= 2 so Alice's measurement commutes with Bob's block")
        return self

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def sigma_A(self) -> PauliString:
        return PauliString.single(self.n_A, self.sigma_A_axis)

    @property
    def sigma_B(self) -> PauliString:
        return PauliString.single(self.n_B, self.sigma_B_axis)


@dataclass(frozen=True)
class LocalBlock:
    site: int
    op: OperatorSum


def bonds(params: ModelParams) -> list[tuple[int, int, float]]:
    """``(i, j, coupling)`` for every exchange bond, i < j."""
    out = []
    if params.include_impurity_bulk_bond and params.N >= 2:
        out.append((1, 2, params.J))
    out.extend((i, i + 1, params.J) for i in range(2, params.N))
    if params.N >= 2:
        out.append((IMPURITY_SITE, params.coupled_site, params.Jk))
    return out


def bond_terms(i: int, j: int, coupling: float, delta: float) -> list[PauliString]:
    if coupling == 0.0:
        return []
    q = coupling / 4.0
    terms = [PauliString(q, ((i, "X"), (j, "X"))), PauliString(q, ((i, "Y"), (j, "Y")))]
    if delta != 0.0:
        terms.append(PauliString(q * delta, ((i, "Z"), (j, "Z"))))
    return terms


def field_term(site: int, b: float) -> list[PauliString]:
    return [PauliString(b / 2.0, ((site, "Z"),))] if b != 0.0 else []


def build_hamiltonian(params: ModelParams) -> OperatorSum:
    terms = []
    for i, j, c in bonds(params):
        terms += bond_terms(i, j, c, params.Delta)
    for site in range(1, params.N + 1):
        terms += field_term(site, params.B)
    return OperatorSum(tuple(terms))


def shift_ground(h: OperatorSum, e0: float) -> OperatorSum:
    """Shift ``h`` so that its ground energy becomes zero."""
    return h.shifted(-e0)


def _zero_block(site: int, terms: list[PauliString], g: StateVector) -> LocalBlock:
    raw = OperatorSum(tuple(terms))
    return LocalBlock(site, raw.shifted(-expectation(raw, g)))


def bob_local_hamiltonian(params: ModelParams, g: StateVector) -> LocalBlock:
    """Field plus every bond incident to Bob's site, offset to zero ground energy."""
    nb = params.n_B
    terms = []
    for i, j, c in bonds(params):
        if nb in (i, j):
            terms += bond_terms(i, j, c, params.Delta)
    terms += field_term(nb, params.B)
    if not terms:
        raise DegenerateModelError(f"site n_B={nb} is not touched by any Hamiltonian term")
    return _zero_block(nb, terms, g)


def zero_point_partition(params: ModelParams, g: StateVector) -> list[LocalBlock]:
    """One block per site: bonds owned by their lower site, fields by their own."""
    owned: dict[int, list[PauliString]] = {n: [] for n in range(1, params.N + 1)}
    for i, j, c in bonds(params):
        owned[i] += bond_terms(i, j, c, params.Delta)
    for site in owned:
        owned[site] += field_term(site, params.B)
    return [_zero_block(site, terms, g) for site, terms in owned.items()]


def check_commutator_condition(h: OperatorSum, block: OperatorSum, s: PauliString) -> float:
    """Spectral norm of ``i[h, s] - i[block, s]``; zero when the block captures ``s``'s dynamics."""
    from kondoqet.entanglement import operator_norm

    residual = (i_commutator(h, s) - i_commutator(block, s)).chop(0.0)
    if not residual.terms:
        return abs(residual.offset)
    return operator_norm(residual)
