"""Backend selection for the hot kernels.

Set ``SPLITDIFFUSE_PURE_NUMPY=1`` before import to force the numpy path; it is
also used automatically when numba cannot be imported.
"""

import importlib
import os

from . import numpy_impl

GREEDY = numpy_impl.GREEDY
ITERATIVE = numpy_impl.ITERATIVE


def _want_numba():
    return os.environ.get("SPLITDIFFUSE_PURE_NUMPY", "").strip().lower() not in ("1", "true", "yes", "on")


numba_impl = None
if _want_numba():
    try:
        numba_impl = importlib.import_module(".numba_impl", __name__)
    except ImportError:  # pragma: no cover
        numba_impl = None

BACKEND = "numba" if numba_impl is not None else "numpy"
_impl = numba_impl if numba_impl is not None else numpy_impl

split_diffuse = _impl.split_diffuse
pair_violations = _impl.pair_violations
choose_dimension = _impl.choose_dimension


def backend(name):
    """Return the kernel module for ``name`` ("numba" or "numpy")."""
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        if numba_impl is None:
            raise RuntimeError("numba backend unavailable or disabled")
        return numba_impl
    raise ValueError(f"unknown backend {name!r}")
