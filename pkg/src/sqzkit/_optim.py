"""One-dimensional golden-section minimization (deterministic, no deps)."""

from __future__ import annotations

import math

from .errors import InvalidArgumentError

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_section_min(f, lo: float, hi: float, tol: float = 1e-9, max_iter: int = 200) -> float:
    """Minimize a unimodal function on [lo, hi]; returns the argmin.

    Bracket width shrinks by 1/phi per iteration; stops when it falls below
    `tol` or after `max_iter` iterations, whichever comes first.
    """
    if not hi > lo:
        raise InvalidArgumentError("need hi > lo for a search bracket")
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    a, b = float(lo), float(hi)
    h = b - a
    c, d = a + _INVPHI2 * h, a + _INVPHI * h
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if h <= tol:
            break
        h *= _INVPHI
        if fc < fd:
            b, d, fd = d, c, fc
            c = a + _INVPHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * h
            fd = f(d)
    return (a + b) / 2.0
