"""Backend selection for the mod 2^64 kernels.

The compiled extension is used when it imports; setting the environment
variable ELLBETA_PURE_PYTHON=1 forces the numpy fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("ELLBETA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"

odd_inverse = _kernels_py.odd_inverse


def mul_trunc(a, b, n: int):
    """First n coefficients of a*b modulo 2^64 (uint64 arrays)."""
    return _impl.mul_trunc(np.ascontiguousarray(a, dtype=np.uint64),
                           np.ascontiguousarray(b, dtype=np.uint64), int(n))


def eliminate(M, V, bits: int, search_rows: int | None = None):
    """In-place 2-adic full-pivot column elimination; see _kernels_py.eliminate."""
    if M.dtype != np.uint64 or not M.flags.c_contiguous:
        raise TypeError("M must be a C-contiguous uint64 array")
    if V is not None and (V.dtype != np.uint64 or not V.flags.c_contiguous):
        raise TypeError("V must be a C-contiguous uint64 array")
    return _impl.eliminate(M, V, int(bits), search_rows)


def backends() -> dict:
    """All importable backends, keyed by name (used by tests and benchmarks)."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels as compiled  # type: ignore[attr-defined]

        out["cython"] = compiled
    except ImportError:
        pass
    return out
