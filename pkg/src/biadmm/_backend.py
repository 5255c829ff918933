"""Kernel backend selection.

Set ``BIADMM_BACKEND=numpy`` to force the pure-numpy kernels. The default
is ``numba`` whenever numba imports cleanly.
"""

import logging
import os

logger = logging.getLogger(__name__)

ENV_FLAG = "BIADMM_BACKEND"


def _numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def requested_backend():
    value = os.environ.get(ENV_FLAG, "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(f"{ENV_FLAG} must be 'numba' or 'numpy', got {value!r}")
    if value == "numba" and not _numba_available():
        logger.warning("numba not importable; falling back to numpy kernels")
        return "numpy"
    return value


BACKEND = requested_backend()
