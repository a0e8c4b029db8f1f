"""Compare the compiled Pauli kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 10] [--repeat 5]

Times one Hamiltonian-vector product and one dense build on the default
chain geometry, for each backend that is available.
"""

import argparse
import timeit

import numpy as np

from kondoqet import _kernels_py
from kondoqet.model import ModelParams, build_hamiltonian

try:
    from kondoqet import _kernels as _ext
except ImportError:
    _ext = None


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10, help="chain length (sites)")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    p = ModelParams(N=args.n, Delta=0.7, n_A=4, n_B=min(7, args.n))
    h = build_hamiltonian(p)
    xm, zm, cf, real = h.kernel_arrays(p.N)
    dim = 1 << p.N
    psi = np.random.default_rng(0).normal(size=dim).astype(np.complex128)

    backends = {"numpy": _kernels_py}
    if _ext is not None:
        backends["cython"] = _ext
    else:
        print("compiled extension not built; timing the numpy fallback only")

    print(f"N={p.N}  dim={dim}  terms={len(h.terms)}")
    base = {}
    for name, mod in backends.items():
        t_apply = min(timeit.repeat(lambda: mod.apply_terms(xm, zm, cf, psi), number=10, repeat=args.repeat)) / 10
        t_dense = min(timeit.repeat(lambda: mod.dense_matrix(xm, zm, cf, dim, real), number=1, repeat=args.repeat))
        base.setdefault("apply", t_apply)
        base.setdefault("dense", t_dense)
        print(
            f"{name:7s} apply {t_apply * 1e3:9.3f} ms (x{base['apply'] / t_apply:5.1f})"
            f"   dense {t_dense * 1e3:9.3f} ms (x{base['dense'] / t_dense:5.1f})"
        )

    if _ext is not None:
        a = _ext.apply_terms(xm, zm, cf, psi)
        b = _kernels_py.apply_terms(xm, zm, cf, psi)
        print(f"max |cython - numpy| = {np.max(np.abs(a - b)):.2e}")


if __name__ == "__main__":
    main()
