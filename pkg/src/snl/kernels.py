"""Backend selection for the edge kernels.

SNL_BACKEND=numba selects the compiled kernels (default when numba imports),
SNL_BACKEND=numpy forces the pure numpy fallback.  Both backends implement
identical contracts; floating-point results may differ in the last bits
because summation order differs, so cross-backend comparisons are tolerance
based while within-backend runs are bit-deterministic.
"""

import os

from . import _kernels_numpy

_CHOICE = os.environ.get("SNL_BACKEND", "").strip().lower()

if _CHOICE not in ("", "numba", "numpy"):
    raise RuntimeError(f"SNL_BACKEND must be 'numba' or 'numpy', got {_CHOICE!r}")

if _CHOICE == "numpy":
    _impl = _kernels_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _CHOICE == "numba":
            raise
        _impl = _kernels_numpy
        BACKEND = "numpy"

residuals = _impl.residuals
grad_from_residuals = _impl.grad_from_residuals
hvp_from_residuals = _impl.hvp_from_residuals


def get_backends():
    """Both kernel modules, keyed by name, for parity tests and benchmarks."""
    table = {"numpy": _kernels_numpy}
    try:
        from . import _kernels_numba

        table["numba"] = _kernels_numba
    except ImportError:
        pass
    return table
