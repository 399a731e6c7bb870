"""RF sideband generation math for phase-modulated light.

A phase modulator driven at frequency f with modulation depth theta puts a
fraction J_n(theta)^2 of the optical power into the n-th sideband at offset
n*f.  This module computes Bessel functions of the first kind without scipy
(series + Miller recurrence), the modulation depth maximizing a chosen
sideband order, the RF drive power that depth requires, and two spectrum
quality metrics (THD, SFDR) from a measured peak list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._optim import golden_section_min
from .errors import DegenerateInputError, InvalidArgumentError

PEAK_KINDS = ("fundamental", "harmonic", "spur")

#: Series/recurrence crossover for the Bessel evaluation.
_SERIES_LIMIT = 12.0


@dataclass(frozen=True)
class SidebandDrive:
    """RF drive for a phase modulator: depth theta and hardware constants."""

    theta: float
    v_pi: float
    drive_freq: float = 25e9
    load_ohms: float = 50.0

    def __post_init__(self):
        if self.theta < 0:
            raise InvalidArgumentError("modulation depth must be non-negative")
        if self.v_pi <= 0 or self.drive_freq <= 0 or self.load_ohms <= 0:
            raise InvalidArgumentError("v_pi, drive_freq and load must be positive")


@dataclass(frozen=True)
class SpectralPeak:
    """One line in a measured RF spectrum."""

    freq_hz: float
    power_dbm: float
    kind: str

    def __post_init__(self):
        if self.freq_hz < 0:
            raise InvalidArgumentError("frequency must be non-negative")
        if self.kind not in PEAK_KINDS:
            raise InvalidArgumentError(f"peak kind must be one of {PEAK_KINDS}")


def _bessel_series(n: int, x: float) -> float:
    """Ascending power series, accurate for |x| below the crossover."""
    half = abs(x) / 2.0
    if half == 0.0:  # includes subnormal x where x/2 underflows
        return 1.0 if n == 0 else 0.0
    # Seed term (x/2)^n / n! via lgamma to dodge overflow for larger n.
    log_seed = n * math.log(half) - math.lgamma(n + 1.0)
    term = math.exp(log_seed)
    if x < 0 and n % 2:
        term = -term
    total = term
    q = (x / 2.0) ** 2
    for m in range(160):
        term *= -q / ((m + 1.0) * (n + m + 1.0))
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return total


def _bessel_miller(n: int, x: float) -> float:
    """Downward Miller recurrence, stable for large |x| and all n <= |x|+big."""
    ax = abs(x)
    m_start = 2 * ((n + int(math.sqrt(40.0 * n)) + int(ax) + 40) // 2 + 1)
    jp, j = 0.0, 1e-30
    result = 0.0
    norm = 0.0
    for k in range(m_start, 0, -1):
        jm = (2.0 * k / ax) * j - jp
        jp, j = j, jm
        if abs(j) > 1e100:  # rescale to avoid overflow mid-recurrence
            jp *= 1e-100
            j *= 1e-100
            result *= 1e-100
            norm *= 1e-100
        if k - 1 == n:
            result = j
        if (k - 1) % 2 == 0:
            norm += 2.0 * j
    norm -= j  # J0 counted twice in the even sum
    val = result / norm
    if x < 0 and n % 2:
        val = -val
    return val


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind, integer order.

    Negative order and argument fold through the reflection identities
    J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
    """
    n = int(n)
    if n < 0:
        val = bessel_j(-n, x)
        return -val if n % 2 else val
    x = float(x)
    if abs(x) < _SERIES_LIMIT:
        return _bessel_series(n, x)
    return _bessel_miller(n, x)


def sideband_powers(theta: float, n_max: int) -> list[float]:
    """Fractional optical power in sidebands 0..n_max: [J_n(theta)^2]."""
    if n_max < 0:
        raise InvalidArgumentError("n_max must be non-negative")
    return [bessel_j(n, theta) ** 2 for n in range(n_max + 1)]


def optimal_theta(order: int, search_range: tuple[float, float] | None = None) -> float:
    """Modulation depth maximizing power in the given sideband order.

    The default bracket (0, n + 1.8*n^(1/3)] ends before the first zero of
    J_n, where |J_n| is unimodal, so the golden-section search is exact.  A
    caller-supplied range must bracket a single interior maximum; hitting
    either endpoint raises.
    """
    if order < 1:
        raise InvalidArgumentError("order must be >= 1")
    if search_range is None:
        lo, hi = 1e-3, order + 1.8 * order ** (1.0 / 3.0)
    else:
        lo, hi = search_range
        if not 0 <= lo < hi:
            raise InvalidArgumentError("search range must satisfy 0 <= low < high")
        lo = max(lo, 1e-6)
    best = golden_section_min(lambda th: -bessel_j(order, th) ** 2, lo, hi, tol=1e-9)
    span = hi - lo
    if best - lo < 1e-6 * span or hi - best < 1e-6 * span:
        raise DegenerateInputError("maximum sits at the search boundary; widen the range")
    return best


def rf_power_required(drive: SidebandDrive) -> float:
    """Sine drive power (dBm) to reach the depth: V_peak = theta*V_pi/pi."""
    v_peak = drive.theta * drive.v_pi / math.pi
    if v_peak == 0.0:
        return -math.inf
    p_watts = v_peak**2 / (2.0 * drive.load_ohms)
    return 10.0 * math.log10(p_watts) + 30.0


def _fundamental(peaks: list[SpectralPeak]) -> SpectralPeak:
    fund = [p for p in peaks if p.kind == "fundamental"]
    if len(fund) != 1:
        raise InvalidArgumentError(f"need exactly one fundamental peak, got {len(fund)}")
    return fund[0]


def thd(peaks) -> float:
    """Total harmonic distortion in dBc (harmonics only; spurs ignored).

    Returns -inf when the spectrum has no harmonic peaks at all.
    """
    peaks = list(peaks)
    fund = _fundamental(peaks)
    harm = [p for p in peaks if p.kind == "harmonic"]
    if not harm:
        return -math.inf
    total_mw = sum(10.0 ** (p.power_dbm / 10.0) for p in harm)
    return 10.0 * math.log10(total_mw) - fund.power_dbm


def sfdr(peaks) -> float:
    """Spurious-free dynamic range in dBc: fundamental minus worst other peak.

    Harmonics and spurs both count; -inf when the fundamental is alone.
    """
    peaks = list(peaks)
    fund = _fundamental(peaks)
    others = [p.power_dbm for p in peaks if p.kind != "fundamental"]
    if not others:
        return -math.inf
    return fund.power_dbm - max(others)
