"""Hot-loop kernels with a compiled core and a numpy fallback.

The compiled module ``opint._kernels`` is used when it imports; otherwise (or
when ``OPINT_PURE_PYTHON=1`` is set before import) the numpy versions below
are used.  Both produce the same values to rounding.
"""
import os

import numpy as np

_CHUNK = 1024


def exp_sums_numpy(c0, dc, coeffs, x):
    """out[i, k] = sum_g coeffs[g, k] * exp(-1j * x[i] * (c0 + g * dc))."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    x = np.ascontiguousarray(x, dtype=np.float64)
    centers = c0 + dc * np.arange(coeffs.shape[0])
    out = np.empty((x.size, coeffs.shape[1]), dtype=np.complex128)
    for start in range(0, x.size, _CHUNK):
        xs = x[start:start + _CHUNK]
        phase = np.exp(-1j * np.outer(xs, centers))
        out[start:start + _CHUNK] = phase @ coeffs
    return out


try:
    if os.environ.get("OPINT_PURE_PYTHON") == "1":
        raise ImportError("pure-python backend forced")
    from opint._kernels import exp_sums as _exp_sums_compiled
except ImportError:
    _exp_sums_compiled = None

BACKEND = "cython" if _exp_sums_compiled is not None else "numpy"


def exp_sums(c0, dc, coeffs, x, backend=None):
    """Dispatch to the selected backend (``"cython"`` or ``"numpy"``)."""
    backend = backend or BACKEND
    if backend == "cython":
        if _exp_sums_compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _exp_sums_compiled(
            float(c0),
            float(dc),
            np.ascontiguousarray(coeffs, dtype=np.complex128),
            np.ascontiguousarray(x, dtype=np.float64),
        )
    if backend == "numpy":
        return exp_sums_numpy(c0, dc, coeffs, x)
    raise ValueError(f"unknown backend {backend!r}")


def available_backends():
    return ("cython", "numpy") if _exp_sums_compiled is not None else ("numpy",)
