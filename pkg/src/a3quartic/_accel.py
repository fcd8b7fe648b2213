"""Backend switch for the hot enumeration kernels.

Set ``A3Q_DISABLE_NUMBA=1`` in the environment to force the pure-numpy
kernels even when numba is importable.  The flag is read once, at import.
"""
import os

_FLAG = os.environ.get("A3Q_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")

if USE_NUMBA and "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
    # an outdated system TBB only produces a warning; try it last
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
BACKEND = "numba" if USE_NUMBA else "numpy"

# Every kernel keeps all intermediate products below ~4 * B**2, so int64 is
# exact up to this height.  Larger B falls back to python-int enumeration.
INT64_SAFE_B = 10**9


def set_workers(n):
    """Set the numba thread count; no-op on the numpy backend."""
    if USE_NUMBA and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


def available_workers():
    if USE_NUMBA:
        return numba.config.NUMBA_NUM_THREADS
    return os.cpu_count() or 1
