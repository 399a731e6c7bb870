"""Rolling-statistics kernels with a compiled fast path.

The Cython extension `_rolling` is used when it was built; otherwise the
numpy fallback takes over.  Both produce the same numbers (to rounding) and
are benchmarked against each other in `benchmarks/bench_kernels.py`.
`backend()` reports which one is active.
"""

import numpy as np

from ..errors import InvalidArgumentError
from . import fallback as _fallback

try:
    from . import _rolling as _impl

    _BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    _BACKEND = "fallback"


def backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'fallback'."""
    return _BACKEND


def impl_modules() -> dict:
    """All importable backends, keyed by name (for tests and benchmarks)."""
    mods = {"fallback": _fallback}
    if _BACKEND == "compiled":
        mods["compiled"] = _impl
    return mods


def _as_f64(x) -> np.ndarray:
    a = np.ascontiguousarray(x, dtype=np.float64)
    if a.ndim != 1:
        raise InvalidArgumentError("expected a 1-D sample array")
    return a


def rolling_variance(x, window: int) -> np.ndarray:
    """Unbiased variance of every length-`window` slice of `x` (validated)."""
    a = _as_f64(x)
    window = int(window)
    if window < 2:
        raise InvalidArgumentError("window must be >= 2")
    if window > a.size:
        raise InvalidArgumentError(f"window {window} exceeds trace length {a.size}")
    return _impl.rolling_variance(a, window)


def delay_visibility_mean(a, b, delay: int, window: int, start: int, stop: int) -> float:
    """Mean sum/difference variance contrast with `b` shifted by `delay`.

    Windows are a[i : i+window] against b[i+delay : i+delay+window] for
    i in [start, stop); bounds are checked here so the kernels can run
    unchecked.
    """
    aa, bb = _as_f64(a), _as_f64(b)
    delay, window, start, stop = int(delay), int(window), int(start), int(stop)
    if window < 2:
        raise InvalidArgumentError("window must be >= 2")
    if not 0 <= start < stop:
        raise InvalidArgumentError(f"empty window range [{start}, {stop})")
    if stop - 1 + window > aa.size:
        raise InvalidArgumentError("window range runs past the end of the first trace")
    if start + delay < 0 or stop - 1 + delay + window > bb.size:
        raise InvalidArgumentError(f"delay {delay} pushes windows outside the second trace")
    return float(_impl.delay_visibility_mean(aa, bb, delay, window, start, stop))
