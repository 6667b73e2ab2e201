"""Backend switch for the numeric kernels.

Every hot kernel in :mod:`mwo_acs.kernels` exists twice: a loop version
compiled with ``numba.njit`` and a vectorised pure-numpy version. The
numba path is used when numba imports cleanly, unless the environment
variable ``MWO_ACS_BACKEND`` is set to ``numpy``. The flag is read once,
at import time.
"""

import os

BACKEND_ENV = "MWO_ACS_BACKEND"

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_AVAILABLE = _numba is not None
REQUESTED_BACKEND = os.environ.get(BACKEND_ENV, "numba").strip().lower() or "numba"
if REQUESTED_BACKEND not in ("numba", "numpy"):
    raise ImportError(
        f"{BACKEND_ENV} must be 'numba' or 'numpy', got {REQUESTED_BACKEND!r}"
    )
USE_NUMBA = NUMBA_AVAILABLE and REQUESTED_BACKEND == "numba"
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` if numba is importable, otherwise a no-op decorator.

    Compilation is lazy, so decorating a kernel costs nothing when the
    numpy backend is selected and the loop version is never called.
    """
    if NUMBA_AVAILABLE:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func
