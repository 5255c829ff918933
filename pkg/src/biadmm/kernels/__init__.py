"""Hot inner loops, dispatched to numba or numpy per ``BIADMM_BACKEND``.

Both sets expose ``prox_rows``, ``edge_update``, ``scatter_edges``,
``tridiagonalize`` and ``tridiagonal_qr`` with identical semantics.
"""

from .._backend import BACKEND
from . import _numpy as numpy_kernels
from .codes import NORM_L1, NORM_L2, NORM_LINF

if BACKEND == "numba":
    from . import _numba as active
else:
    active = numpy_kernels


def get(backend):
    """Return the kernel module for ``backend`` ('numba' or 'numpy')."""
    if backend == "numpy":
        return numpy_kernels
    if backend == "numba":
        from . import _numba

        return _numba
    raise ValueError(f"unknown backend {backend!r}")


prox_rows = active.prox_rows
edge_update = active.edge_update
scatter_edges = active.scatter_edges
tridiagonalize = active.tridiagonalize
tridiagonal_qr = active.tridiagonal_qr

__all__ = [
    "BACKEND",
    "NORM_L1",
    "NORM_L2",
    "NORM_LINF",
    "edge_update",
    "get",
    "numpy_kernels",
    "prox_rows",
    "scatter_edges",
    "tridiagonal_qr",
    "tridiagonalize",
]
