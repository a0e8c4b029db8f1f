"""Exact diagonalization: lowest eigenpairs, ground state, gap."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from kondoqet import kernels
from kondoqet.errors import SolverError, StructuralError
from kondoqet.hilbert import MAX_DENSE_SITES, OperatorSum, StateVector

DEGENERACY_TOL = 1e-10
PHASE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GroundResult:
    e0: float
    state: StateVector
    gap: float
    degenerate: bool


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate ``vec`` so its first non-negligible amplitude is real positive."""
    idx = np.flatnonzero(np.abs(vec) > PHASE_TOL * max(np.abs(vec).max(), 1.0))
    if idx.size == 0:
        return vec
    a = vec[idx[0]]
    out = vec * (abs(a) / a)
    out[idx[0]] = abs(a)
    return out


def _sites(h: OperatorSum, n: int | None) -> int:
    n = max(h.max_site, 1) if n is None else n
    if n < h.max_site:
        raise StructuralError(f"operator reaches site {h.max_site} but N={n}")
    return n


def _dense_pairs(h: OperatorSum, n: int, k: int):
    mat = h.to_dense(n)
    vals, vecs = scipy.linalg.eigh(mat, subset_by_index=(0, k - 1), driver="evr")
    return vals, vecs


def _iterative_pairs(h: OperatorSum, n: int, k: int, maxiter: int | None):
    dim = 1 << n
    xm, zm, cf, _ = h.kernel_arrays(n)
    offset = h.offset

    def matvec(v):
        v = np.asarray(v, dtype=np.complex128).reshape(-1)
        return kernels.apply_terms(xm, zm, cf, v) + offset * v

    op = spla.LinearOperator((dim, dim), matvec=matvec, dtype=np.complex128)
    # fixed-seed start vector: a uniform one is the x-polarized state and stays in one symmetry sector
    rng = np.random.default_rng(0)
    v0 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    maxiter = maxiter or 20 * dim
    try:
        vals, vecs = spla.eigsh(op, k=k, which="SA", v0=v0, maxiter=maxiter, tol=1e-12)
    except spla.ArpackNoConvergence as exc:
        raise SolverError(f"Lanczos did not converge within {maxiter} iterations", iterations=maxiter) from exc
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def lowest_eigenpairs(
    h: OperatorSum, k: int, n: int | None = None, method: str = "auto", maxiter: int | None = None
) -> list[tuple[float, StateVector]]:
    """The ``k`` lowest eigenpairs in nondecreasing energy order.

    Dense symmetric solve up to N=12; ``method="lanczos"`` (or larger N)
    uses an implicitly restarted Lanczos iteration on the Pauli kernel.
    Every eigenvector has its first non-negligible amplitude real positive.
    """
    n = _sites(h, n)
    dim = 1 << n
    if not 1 <= k <= dim:
        raise StructuralError(f"k={k} outside [1, {dim}]")
    if method == "auto":
        method = "dense" if n <= MAX_DENSE_SITES else "lanczos"
    if method == "dense":
        vals, vecs = _dense_pairs(h, n, k)
    elif method == "lanczos":
        if k >= dim - 1:
            raise StructuralError("Lanczos path needs k < 2**N - 1")
        vals, vecs = _iterative_pairs(h, n, k, maxiter)
    else:
        raise StructuralError(f"unknown eigensolver method {method!r}")
    out = []
    for j in range(k):
        vec = fix_phase(np.asarray(vecs[:, j], dtype=np.complex128))
        vec = vec / np.linalg.norm(vec)
        out.append((float(vals[j]), StateVector(vec)))
    return out


def ground_state(h: OperatorSum, n: int | None = None, method: str = "auto") -> GroundResult:
    n = _sites(h, n)
    pairs = lowest_eigenpairs(h, min(2, 1 << n), n=n, method=method)
    e0, state = pairs[0]
    gap = max(pairs[1][0] - e0, 0.0) if len(pairs) > 1 else float("inf")
    return GroundResult(e0=e0, state=state, gap=gap, degenerate=gap < DEGENERACY_TOL)


def full_spectrum(h: OperatorSum, n: int | None = None) -> np.ndarray:
    """All eigenvalues, ascending (dense path only)."""
    n = _sites(h, n)
    return scipy.linalg.eigvalsh(h.to_dense(n))
