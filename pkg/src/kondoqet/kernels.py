"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``KONDOQET_PURE=1`` to force the numpy fallback.
"""

import os

from kondoqet import _kernels_py

BACKEND = "python"
apply_terms = _kernels_py.apply_terms
dense_matrix = _kernels_py.dense_matrix

if os.environ.get("KONDOQET_PURE", "") not in ("1", "true", "yes"):
    try:
        from kondoqet import _kernels as _ext
    except ImportError:  # extension not built
        _ext = None
    if _ext is not None:
        BACKEND = "cython"
        apply_terms = _ext.apply_terms
        dense_matrix = _ext.dense_matrix

__all__ = ["BACKEND", "apply_terms", "dense_matrix"]
