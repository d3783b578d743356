"""Closed-form laws and the estimators that compare simulations to them.

Forward evaluation only: nothing here fits model parameters beyond the
exponential decay slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import TimeSeries

__all__ = [
    "DecayFit",
    "InsufficientDataError",
    "analytic_detuned_population",
    "decay_rate_line",
    "decay_rate_tls",
    "revival_time",
    "long_time_plateau",
    "fit_exponential",
    "detect_revival",
    "time_average",
]


class InsufficientDataError(ValueError):
    """A requested estimator window holds too few samples."""


@dataclass(frozen=True)
class DecayFit:
    """Least-squares exponential fit of a decay window on (t, ln p_e)."""

    gamma_fit: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    n_samples: int


def analytic_detuned_population(lambda0: float, r: float, omega_q: float, t) -> np.ndarray:
    """Excited-state population for a bath of equal energies (1-r)*Omega.

    p(t) = 1 - [L^2 / (L^2 + (r Omega/2)^2)] sin^2(sqrt(L^2 + (r Omega/2)^2) t)

    with L the collective coupling lambda0.  r = 0 reduces to
    cos^2(lambda0 t); lambda0 = 0 gives the constant 1.
    """
    if lambda0 < 0:
        raise ValueError("lambda0 must be >= 0")
    t = np.asarray(t, dtype=float)
    half_det = 0.5 * r * omega_q
    kappa_sq = lambda0**2 + half_det**2
    if kappa_sq == 0.0:
        return np.ones_like(t)
    amp = lambda0**2 / kappa_sq
    return 1.0 - amp * np.sin(math.sqrt(kappa_sq) * t) ** 2


def decay_rate_line(g: float, omega_q: float, delta_omega: float) -> float:
    """Golden-rule rate 2 pi g^2 Omega / delta_omega^2 for the line bath."""
    if not delta_omega > 0:
        raise ValueError("delta_omega must be > 0")
    return 2.0 * math.pi * g * g * omega_q / delta_omega**2


def decay_rate_tls(nu0: float, lambda0: float, n: int) -> float:
    """Distributed-TLS rate 2 pi nu0 lambda0^2 / N."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 * math.pi * nu0 * lambda0**2 / n


def revival_time(delta_omega: float) -> float:
    """First recurrence time 2 pi / delta_omega of an equally spaced comb."""
    if not delta_omega > 0:
        raise ValueError("delta_omega must be > 0")
    return 2.0 * math.pi / delta_omega


def long_time_plateau(omega_q: float, n: int, gamma0: float) -> float:
    """Residual population 4 Omega / (N pi Gamma0) left after decay."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not gamma0 > 0:
        raise ValueError("gamma0 must be > 0")
    return 4.0 * omega_q / (n * math.pi * gamma0)


def fit_exponential(series: TimeSeries, p_hi: float, p_lo: float) -> DecayFit:
    """Exponential fit over the first monotone crossing from p_hi down to p_lo.

    Restricts to samples with p_lo <= p_e <= p_hi between the first entry
    below p_hi and the first subsequent drop below p_lo, then fits a line
    to (t, ln p_e); gamma_fit is minus the slope.
    """
    if not (p_hi > p_lo > 0):
        raise ValueError("need p_hi > p_lo > 0")
    p = series.p_e
    t = series.t
    below_hi = np.nonzero(p <= p_hi)[0]
    if below_hi.size == 0:
        raise InsufficientDataError(f"series never reaches p_e <= {p_hi:g}")
    i_hi = int(below_hi[0])
    below_lo = np.nonzero(p[i_hi:] < p_lo)[0]
    i_lo = int(i_hi + below_lo[0]) if below_lo.size else p.size
    sel = slice(i_hi, i_lo)
    mask = (p[sel] >= p_lo) & (p[sel] <= p_hi) & (p[sel] > 0)
    tw = t[sel][mask]
    pw = p[sel][mask]
    if tw.size < 10:
        raise InsufficientDataError(
            f"only {tw.size} samples in the window [{p_lo:g}, {p_hi:g}]"
        )
    logp = np.log(pw)
    slope, intercept = np.polyfit(tw, logp, 1)
    resid = logp - (slope * tw + intercept)
    total = logp - np.mean(logp)
    denom = float(np.sum(total**2))
    r_sq = 1.0 if denom == 0 else 1.0 - float(np.sum(resid**2)) / denom
    return DecayFit(
        gamma_fit=float(-slope),
        intercept=float(intercept),
        r_squared=r_sq,
        window=(float(tw[0]), float(tw[-1])),
        n_samples=int(tw.size),
    )


def detect_revival(series: TimeSeries, floor_factor: float) -> Optional[float]:
    """First repopulation time, or None.

    Takes the global minimum p_min of the series and returns the first
    later sample that reaches floor_factor * p_min while rising
    monotonically over at least three samples.  floor_factor sets the
    noise floor the rise must clear: it should exceed the peak-to-valley
    ratio of whatever fluctuates around the post-decay level, and stay
    well under the orders-of-magnitude climb of a genuine recurrence.
    """
    if not floor_factor > 1:
        raise ValueError("floor_factor must be > 1")
    p = series.p_e
    if p.size < 3:
        return None
    i_min = int(np.argmin(p))
    threshold = floor_factor * p[i_min]
    for k in range(max(i_min + 1, 2), p.size):
        if p[k] >= threshold and p[k - 2] < p[k - 1] < p[k]:
            return float(series.t[k])
    return None


def time_average(series: TimeSeries, t_lo: float, t_hi: float) -> float:
    """Trapezoidal mean of p_e over [t_lo, t_hi]."""
    if not t_lo < t_hi:
        raise ValueError("need t_lo < t_hi")
    m = (series.t >= t_lo) & (series.t <= t_hi)
    if np.count_nonzero(m) < 2:
        raise InsufficientDataError("fewer than two samples in the average window")
    t = series.t[m]
    p = series.p_e[m]
    return float(np.trapezoid(p, t) / (t[-1] - t[0]))
