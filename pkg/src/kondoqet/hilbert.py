"""Pauli-string operator algebra on spin-1/2 chains.

Conventions
-----------
* Sites are 1-based.  Site 1 is the most significant bit of the basis index,
  so on N sites site ``i`` lives on bit ``N - i``.
* Bit value 0 is spin up (Z eigenvalue +1), bit value 1 is spin down.
* Operators are real-weighted Pauli products plus a scalar offset, which keeps
  every :class:`OperatorSum` Hermitian by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from kondoqet import kernels
from kondoqet.errors import CapabilityError, NumericalConsistencyError, StructuralError

AXES = ("X", "Y", "Z")
MAX_DENSE_SITES = 12

# (a, b) -> (phase, c) with a*b = phase * c, c == "" meaning identity
_SITE_PRODUCT = {
    ("X", "X"): (1, ""),
    ("Y", "Y"): (1, ""),
    ("Z", "Z"): (1, ""),
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}


def _normalize_factors(factors) -> tuple[tuple[int, str], ...]:
    if isinstance(factors, Mapping):
        items = list(factors.items())
    else:
        items = [tuple(f) for f in factors]
    seen = set()
    out = []
    for site, axis in items:
        if isinstance(site, bool) or not isinstance(site, (int, np.integer)):
            raise StructuralError(f"site index must be an integer, got {site!r}")
        site = int(site)
        axis = str(axis).upper()
        if site < 1:
            raise StructuralError(f"site index {site} out of range (sites are 1-based)")
        if axis not in AXES:
            raise StructuralError(f"unknown Pauli axis {axis!r}")
        if site in seen:
            raise StructuralError(f"site {site} carries more than one Pauli factor")
        seen.add(site)
        out.append((site, axis))
    return tuple(sorted(out))


@dataclass(frozen=True)
class PauliString:
    """``coeff`` times a tensor product of single-site Pauli matrices."""

    coeff: float = 1.0
    factors: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        coeff = float(self.coeff)
        if not math.isfinite(coeff):
            raise StructuralError(f"non-finite coefficient {self.coeff!r}")
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "factors", _normalize_factors(self.factors))

    @classmethod
    def single(cls, site: int, axis: str, coeff: float = 1.0) -> "PauliString":
        return cls(coeff, ((site, axis),))

    @classmethod
    def parse(cls, text: str, coeff: float = 1.0) -> "PauliString":
        """Parse ``"X1 Y3"`` (axis letter followed by site) into a string."""
        factors = []
        for token in text.split():
            axis, site = token[0], token[1:]
            if not site.isdigit():
                raise StructuralError(f"cannot parse Pauli factor {token!r}")
            factors.append((int(site), axis))
        return cls(coeff, factors)

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.factors)

    @property
    def max_site(self) -> int:
        return self.factors[-1][0] if self.factors else 0

    def axis_at(self, site: int) -> str | None:
        for s, a in self.factors:
            if s == site:
                return a
        return None

    def with_coeff(self, coeff: float) -> "PauliString":
        return PauliString(coeff, self.factors)

    def masks(self, n: int) -> tuple[int, int, int]:
        """Return ``(xmask, zmask, n_y)`` for an ``n``-site register."""
        if self.max_site > n:
            raise StructuralError(f"site {self.max_site} out of range for N={n}")
        xmask = zmask = ny = 0
        for site, axis in self.factors:
            bit = 1 << (n - site)
            if axis in ("X", "Y"):
                xmask |= bit
            if axis in ("Z", "Y"):
                zmask |= bit
            if axis == "Y":
                ny += 1
        return xmask, zmask, ny

    def label(self) -> str:
        return " ".join(f"{a}{s}" for s, a in self.factors) or "I"

    def __str__(self):
        return f"{self.coeff:+g}*{self.label()}"


@dataclass(frozen=True)
class OperatorSum:
    """Sum of Pauli strings plus a real additive constant.

    Duplicate factor assignments are merged on construction; strings with an
    empty assignment are folded into ``offset``; exact zeros are dropped.
    """

    terms: tuple[PauliString, ...] = ()
    offset: float = 0.0

    def __post_init__(self):
        merged: dict[tuple, float] = {}
        offset = float(self.offset)
        for term in self.terms:
            if not isinstance(term, PauliString):
                raise StructuralError(f"expected PauliString, got {type(term).__name__}")
            if not term.factors:
                offset += term.coeff
                continue
            merged[term.factors] = merged.get(term.factors, 0.0) + term.coeff
        if not math.isfinite(offset):
            raise StructuralError("non-finite offset")
        terms = tuple(PauliString(c, f) for f, c in merged.items() if c != 0.0)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "offset", offset)

    @classmethod
    def from_terms(cls, terms: Iterable[PauliString], offset: float = 0.0) -> "OperatorSum":
        return cls(tuple(terms), offset)

    @property
    def max_site(self) -> int:
        return max((t.max_site for t in self.terms), default=0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted({s for t in self.terms for s in t.sites}))

    def coefficients(self) -> dict[tuple, float]:
        return {t.factors: t.coeff for t in self.terms}

    def is_zero(self, atol: float = 0.0) -> bool:
        return abs(self.offset) <= atol and all(abs(t.coeff) <= atol for t in self.terms)

    def chop(self, atol: float) -> "OperatorSum":
        offset = self.offset if abs(self.offset) > atol else 0.0
        return OperatorSum(tuple(t for t in self.terms if abs(t.coeff) > atol), offset)

    def shifted(self, delta: float) -> "OperatorSum":
        return OperatorSum(self.terms, self.offset + delta)

    def relabeled(self, mapping: Mapping[int, int]) -> "OperatorSum":
        terms = tuple(
            PauliString(t.coeff, tuple((mapping[s], a) for s, a in t.factors)) for t in self.terms
        )
        return OperatorSum(terms, self.offset)

    def __add__(self, other):
        if isinstance(other, PauliString):
            other = OperatorSum((other,))
        if isinstance(other, (int, float)):
            return self.shifted(float(other))
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return OperatorSum(self.terms + other.terms, self.offset + other.offset)

    __radd__ = __add__

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return OperatorSum(tuple(t.with_coeff(t.coeff * scalar) for t in self.terms), self.offset * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        if isinstance(other, PauliString):
            other = OperatorSum((other,))
        return self + (-other)

    def kernel_arrays(self, n: int):
        """Masks and phase-folded complex coefficients for the kernels."""
        size = len(self.terms)
        xm = np.empty(size, dtype=np.int64)
        zm = np.empty(size, dtype=np.int64)
        cf = np.empty(size, dtype=np.complex128)
        real = True
        for k, term in enumerate(self.terms):
            x, z, ny = term.masks(n)
            xm[k], zm[k] = x, z
            cf[k] = term.coeff * (1j**ny)
            real = real and ny % 2 == 0
        return xm, zm, cf, real

    def to_dense(self, n: int | None = None) -> np.ndarray:
        """Dense ``2**n x 2**n`` matrix (real dtype whenever possible)."""
        if n is None:
            n = max(self.max_site, 1)
        if n > MAX_DENSE_SITES:
            raise CapabilityError(f"dense materialization limited to N <= {MAX_DENSE_SITES}, got {n}")
        xm, zm, cf, real = self.kernel_arrays(n)
        dim = 1 << n
        mat = kernels.dense_matrix(xm, zm, cf, dim, real)
        mat[np.diag_indices(dim)] += self.offset
        return mat

    def __str__(self):
        parts = [str(t) for t in self.terms]
        if self.offset or not parts:
            parts.append(f"{self.offset:+g}")
        return " ".join(parts)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over the ``2**N`` computational basis.

    ``raw`` marks unnormalized intermediates (operator images, projections).
    """

    amplitudes: np.ndarray
    raw: bool = False
    n: int = field(init=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        dim = amps.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise StructuralError(f"amplitude length {dim} is not a power of two >= 2")
        if not np.all(np.isfinite(amps)):
            raise StructuralError("non-finite amplitudes")
        if not self.raw:
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > 1e-12:
                raise StructuralError(f"state not normalized (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n", dim.bit_length() - 1)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state from a bit string, site 1 first."""
        amps = np.zeros(1 << len(bits), dtype=np.complex128)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    @classmethod
    def product(cls, *site_states) -> "StateVector":
        amps = np.ones(1, dtype=np.complex128)
        for s in site_states:
            amps = np.kron(amps, np.asarray(s, dtype=np.complex128))
        return cls(amps / np.linalg.norm(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        norm = self.norm()
        if norm == 0.0:
            raise StructuralError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / norm)

    def as_raw(self) -> "StateVector":
        return StateVector(self.amplitudes, raw=True)

    def vdot(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __add__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return StateVector(self.amplitudes + other.amplitudes, raw=True)

    def __mul__(self, scalar):
        return StateVector(self.amplitudes * scalar, raw=True)

    __rmul__ = __mul__


def apply_pauli_string(p: PauliString, psi: StateVector) -> StateVector:
    """Return ``p|psi>`` as a raw state."""
    x, z, ny = p.masks(psi.n)
    out = kernels.apply_terms(
        np.array([x], dtype=np.int64),
        np.array([z], dtype=np.int64),
        np.array([p.coeff * 1j**ny], dtype=np.complex128),
        psi.amplitudes,
    )
    return StateVector(out, raw=True)


def apply_operator(h: OperatorSum, psi: StateVector) -> StateVector:
    """Return ``h|psi>`` as a raw state."""
    if h.max_site > psi.n:
        raise StructuralError(f"operator reaches site {h.max_site} but state has N={psi.n}")
    xm, zm, cf, _ = h.kernel_arrays(psi.n)
    out = kernels.apply_terms(xm, zm, cf, psi.amplitudes)
    if h.offset:
        out = out + h.offset * psi.amplitudes
    return StateVector(out, raw=True)


def expectation(h: OperatorSum | PauliString, psi: StateVector, tol: float = 1e-10) -> float:
    """``<psi|h|psi>`` for Hermitian ``h``; raises if the imaginary part exceeds ``tol``."""
    if isinstance(h, PauliString):
        h = OperatorSum((h,))
    value = psi.vdot(apply_operator(h, psi))
    if abs(value.imag) >= tol:
        raise NumericalConsistencyError(f"expectation has imaginary part {value.imag:.3e}")
    return value.real


def multiply_strings(p: PauliString, q: PauliString) -> tuple[complex, PauliString]:
    """``p * q = phase * result`` with ``phase`` in {1, -1, 1j, -1j}."""
    phase = 1 + 0j
    left = dict(p.factors)
    right = dict(q.factors)
    out = {}
    for site in sorted(set(left) | set(right)):
        a, b = left.get(site), right.get(site)
        if a is None or b is None:
            out[site] = a or b
            continue
        ph, c = _SITE_PRODUCT[(a, b)]
        phase *= ph
        if c:
            out[site] = c
    return phase, PauliString(p.coeff * q.coeff, out)


def strings_commute(p: PauliString, q: PauliString) -> bool:
    right = dict(q.factors)
    clashes = sum(1 for s, a in p.factors if s in right and right[s] != a)
    return clashes % 2 == 0


def i_commutator(h: OperatorSum, s: PauliString, tol: float = 1e-12) -> OperatorSum:
    """``i[h, s]`` as a real-weighted operator sum.

    Commuting terms and the offset drop out; anticommuting terms contribute
    ``2i * t * s``, whose phase is always +-i so the result stays real.
    """
    terms = []
    for t in h.terms:
        if strings_commute(t, s):
            continue
        phase, prod = multiply_strings(t, s)
        c = 2j * phase * prod.coeff
        if abs(c.imag) >= tol:
            raise NumericalConsistencyError(f"commutator coefficient {c} is not real")
        terms.append(prod.with_coeff(c.real))
    return OperatorSum(tuple(terms))


def commutes(h: OperatorSum, s: PauliString) -> bool:
    return all(strings_commute(t, s) for t in h.terms)
