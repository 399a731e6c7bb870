"""Pure-numpy implementations of the rolling-statistics kernels.

These mirror the compiled versions in `_rolling.pyx` exactly: sliding sums of
anchor-subtracted values, restarted every `RENORM_INTERVAL` output points so
rounding error cannot accumulate over long traces.  Subtracting the anchor
(the trace value at the start of each renormalization block) also makes a
constant input produce exactly zero variance.

Inputs are assumed pre-validated by `sqzkit._kernels`; these functions are the
computational core only.
"""

import numpy as np

RENORM_INTERVAL = 100_000


def rolling_variance(x: np.ndarray, window: int) -> np.ndarray:
    """Unbiased variance over every length-`window` slice of `x`."""
    n = x.size
    m = n - window + 1
    out = np.empty(m)
    denom = window - 1.0
    for i0 in range(0, m, RENORM_INTERVAL):
        i1 = min(i0 + RENORM_INTERVAL, m)
        y = x[i0 : i1 + window - 1] - x[i0]
        s = np.concatenate(([0.0], np.cumsum(y)))
        q = np.concatenate(([0.0], np.cumsum(y * y)))
        sums = s[window:] - s[: i1 - i0]
        sqs = q[window:] - q[: i1 - i0]
        out[i0:i1] = np.maximum(sqs - sums * sums / window, 0.0) / denom
    return out


def delay_visibility_mean(
    a: np.ndarray, b: np.ndarray, delay: int, window: int, start: int, stop: int
) -> float:
    """Mean normalized contrast between the variances of a+b and a-b.

    For each window index i in [start, stop), pairs a[i : i+window] with
    b[i+delay : i+delay+window], computes the unbiased variances V+ and V- of
    the sum and difference, and averages |V+ - V-| / (V+ + V-) over i.
    Windows where V+ + V- is not positive contribute zero.
    """
    acc = 0.0
    w = window
    denom = w - 1.0
    for i0 in range(start, stop, RENORM_INTERVAL):
        i1 = min(i0 + RENORM_INTERVAL, stop)
        span = i1 - i0 + w - 1
        ya = a[i0 : i0 + span] - a[i0]
        yb = b[i0 + delay : i0 + delay + span] - b[i0 + delay]
        s1 = np.concatenate(([0.0], np.cumsum(ya)))
        s2 = np.concatenate(([0.0], np.cumsum(yb)))
        q1 = np.concatenate(([0.0], np.cumsum(ya * ya)))
        q2 = np.concatenate(([0.0], np.cumsum(yb * yb)))
        cc = np.concatenate(([0.0], np.cumsum(ya * yb)))
        k = i1 - i0
        sa = s1[w:] - s1[:k]
        sb = s2[w:] - s2[:k]
        qa = q1[w:] - q1[:k]
        qb = q2[w:] - q2[:k]
        cab = cc[w:] - cc[:k]
        v_plus = (qa + qb + 2.0 * cab - (sa + sb) ** 2 / w) / denom
        v_minus = (qa + qb - 2.0 * cab - (sa - sb) ** 2 / w) / denom
        tot = v_plus + v_minus
        vis = np.zeros(k)
        ok = tot > 0.0
        vis[ok] = np.abs(v_plus[ok] - v_minus[ok]) / tot[ok]
        acc += float(vis.sum())
    return acc / (stop - start)
