# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled streaming kernels: rolling variance and delay-visibility scan.

Same numerics as `fallback.py`: anchor-subtracted sliding sums, restarted
every RENORM_INTERVAL outputs so rounding error stays bounded on long traces.
"""

from libc.math cimport fabs

import numpy as np

cdef Py_ssize_t RENORM_INTERVAL = 100000


def rolling_variance(const double[::1] x, Py_ssize_t window):
    """Unbiased variance over every length-`window` slice of `x`."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = n - window + 1
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i = 0, j, k, steps
    cdef double anchor, s, q, y, y_in, y_out, v
    cdef double w = <double> window
    cdef double denom = w - 1.0
    while i < m:
        anchor = x[i]
        s = 0.0
        q = 0.0
        for j in range(i, i + window):
            y = x[j] - anchor
            s += y
            q += y * y
        v = (q - s * s / w) / denom
        ov[i] = v if v > 0.0 else 0.0
        steps = m - i - 1
        if steps > RENORM_INTERVAL - 1:
            steps = RENORM_INTERVAL - 1
        for k in range(steps):
            y_out = x[i + k] - anchor
            y_in = x[i + k + window] - anchor
            s += y_in - y_out
            q += y_in * y_in - y_out * y_out
            v = (q - s * s / w) / denom
            ov[i + k + 1] = v if v > 0.0 else 0.0
        i += steps + 1
    return out


cdef inline double _vis(double s1, double s2, double q1, double q2, double c,
                        double w, double denom) noexcept nogil:
    cdef double v_plus = (q1 + q2 + 2.0 * c - (s1 + s2) * (s1 + s2) / w) / denom
    cdef double v_minus = (q1 + q2 - 2.0 * c - (s1 - s2) * (s1 - s2) / w) / denom
    cdef double tot = v_plus + v_minus
    if tot <= 0.0:
        return 0.0
    return fabs(v_plus - v_minus) / tot


def delay_visibility_mean(const double[::1] a, const double[::1] b, Py_ssize_t delay,
                          Py_ssize_t window, Py_ssize_t start, Py_ssize_t stop):
    """Mean of |V(a+b) - V(a-b)| / (V(a+b) + V(a-b)) over windows in [start, stop),
    with b shifted by `delay` relative to a."""
    cdef double acc = 0.0
    cdef Py_ssize_t i = start, j, k, steps, jo, ji
    cdef double anchor_a, anchor_b, s1, s2, q1, q2, c
    cdef double y1, y2, y1o, y2o, y1i, y2i
    cdef double w = <double> window
    cdef double denom = w - 1.0
    while i < stop:
        anchor_a = a[i]
        anchor_b = b[i + delay]
        s1 = s2 = q1 = q2 = c = 0.0
        for j in range(window):
            y1 = a[i + j] - anchor_a
            y2 = b[i + delay + j] - anchor_b
            s1 += y1
            q1 += y1 * y1
            s2 += y2
            q2 += y2 * y2
            c += y1 * y2
        acc += _vis(s1, s2, q1, q2, c, w, denom)
        steps = stop - i - 1
        if steps > RENORM_INTERVAL - 1:
            steps = RENORM_INTERVAL - 1
        for k in range(steps):
            jo = i + k
            ji = i + k + window
            y1o = a[jo] - anchor_a
            y2o = b[jo + delay] - anchor_b
            y1i = a[ji] - anchor_a
            y2i = b[ji + delay] - anchor_b
            s1 += y1i - y1o
            q1 += y1i * y1i - y1o * y1o
            s2 += y2i - y2o
            q2 += y2i * y2i - y2o * y2o
            c += y1i * y2i - y1o * y2o
            acc += _vis(s1, s2, q1, q2, c, w, denom)
        i += steps + 1
    return acc / <double> (stop - start)
