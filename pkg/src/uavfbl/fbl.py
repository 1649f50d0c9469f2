"""Finite-blocklength rate primitives for the real AWGN normal approximation.

All functions accept scalars or numpy arrays. Blocklength is a positive real
here; integrality is left to the callers.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc

LOG2E = math.log2(math.e)

#: Upper SNR bracket (linear) used by the numeric inversions.
SNR_CAP = 1e9
ROOT_RTOL = 1e-12
ROOT_MAXITER = 200


class DomainError(ValueError):
    """An argument lies outside the domain of a rate primitive."""


class InfeasibleRateError(ValueError):
    """No SNR below the cap reaches the requested rate."""


def _check_prob(p, name):
    if isinstance(p, float):
        if not 0.0 < p < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {p!r}")
        return
    arr = np.asarray(p, dtype=float)
    if np.any(~(arr > 0.0)) or np.any(~(arr < 1.0)):
        raise DomainError(f"{name} must lie in (0, 1), got {p!r}")


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


# Acklam's rational approximation of the standard normal quantile.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def _acklam_upper(p):
    """Approximate Q^{-1}(p) for p in (0, 0.5] (relative error ~1e-9)."""
    x = np.empty_like(p)
    tail = p < _P_LOW
    if np.any(tail):
        q = np.sqrt(-2.0 * np.log(p[tail]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[tail] = -num / den
    mid = ~tail
    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        x[mid] = -num / den
    return x


def _inv_q_scalar(p):
    pu = p if p <= 0.5 else 1.0 - p
    if pu < _P_LOW:
        q = math.sqrt(-2.0 * math.log(pu))
        x = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
              / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    else:
        q = pu - 0.5
        r = q * q
        x = -((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
              / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    for _ in range(2):
        u = -(0.5 * math.erfc(x / _SQRT2) - pu) / (math.exp(-0.5 * x * x) / _SQRT2PI)
        x = x - u / (1.0 + 0.5 * x * u)
    if pu == 0.5:
        x = 0.0
    return x if p <= 0.5 else -x


def inv_q(p):
    """Inverse of :func:`q_function`.

    A rational starting point is polished with two Halley steps against
    ``q_function``, which is accurate to ~1e-15 relative in the tail, so the
    result satisfies ``q_function(inv_q(p)) == p`` to about 1e-13.
    """
    _check_prob(p, "p")
    if np.ndim(p) == 0:
        return _inv_q_scalar(float(p))
    arr = np.asarray(p, dtype=float)
    # work on the upper half and mirror: Q^{-1}(1-p) = -Q^{-1}(p)
    upper = arr <= 0.5
    pu = np.where(upper, arr, 1.0 - arr)
    x = _acklam_upper(pu)
    for _ in range(2):
        err = 0.5 * erfc(x / _SQRT2) - pu
        pdf = np.exp(-0.5 * x * x) / _SQRT2PI
        u = -err / pdf
        x = x - u / (1.0 + 0.5 * x * u)
    x = np.where(upper, x, -x)
    x[arr == 0.5] = 0.0
    return x


def shannon_capacity(snr):
    """Capacity log2(1 + snr) in bits per channel use."""
    s = np.asarray(snr, dtype=float)
    if np.any(~(s >= 0.0)):
        raise DomainError(f"snr must be non-negative, got {snr!r}")
    out = np.log2(1.0 + s)
    return float(out) if out.ndim == 0 else out


def _dispersion_scale(m, snr):
    # log2(e) * sqrt(V / m) with V = snr (snr + 2) / (snr + 1)^2
    return LOG2E * np.sqrt(snr * (snr + 2.0) / ((snr + 1.0) ** 2 * m))


def _check_m_snr(m, snr):
    if np.any(~(np.asarray(m, dtype=float) >= 1.0)):
        raise DomainError(f"blocklength must be >= 1, got {m!r}")
    if np.any(~(np.asarray(snr, dtype=float) > 0.0)):
        raise DomainError(f"snr must be positive, got {snr!r}")


def fbl_rate_raw(m, snr, eps):
    """Normal-approximation rate without clamping; may be negative."""
    _check_m_snr(m, snr)
    _check_prob(eps, "eps")
    m = np.asarray(m, dtype=float)
    snr = np.asarray(snr, dtype=float)
    out = (np.log2(1.0 + snr) - _dispersion_scale(m, snr) * inv_q(eps)
           + np.log2(m) / m)
    return float(out) if out.ndim == 0 else out


def fbl_rate(m, snr, eps):
    """Achievable coding rate (bits per channel use) at blocklength ``m``.

    Negative approximations are clamped to zero; use :func:`rate_clamped` to
    detect that case.
    """
    out = np.maximum(fbl_rate_raw(m, snr, eps), 0.0)
    return float(out) if np.ndim(out) == 0 else out


def rate_clamped(m, snr, eps):
    """True where :func:`fbl_rate` had to clamp a negative approximation."""
    out = np.asarray(fbl_rate_raw(m, snr, eps)) < 0.0
    return bool(out) if out.ndim == 0 else out


def fbl_error(m, snr, rate):
    """Block error probability when coding at ``rate`` over ``m`` symbols."""
    _check_m_snr(m, snr)
    if np.any(~(np.asarray(rate, dtype=float) >= 0.0)):
        raise DomainError(f"rate must be non-negative, got {rate!r}")
    m = np.asarray(m, dtype=float)
    snr = np.asarray(snr, dtype=float)
    arg = (np.log2(1.0 + snr) - rate + np.log2(m) / m) / _dispersion_scale(m, snr)
    return q_function(arg)


def rate_minimizing_snr(m, eps):
    """SNR beyond which the raw FBL rate is strictly increasing.

    The dispersion term makes the raw rate dip just above zero SNR; the dip
    ends where (1 + snr) * sqrt(snr (snr + 2)) = Q^{-1}(eps) / sqrt(m).
    Accepts arrays for ``m`` and ``eps``.
    """
    qi = inv_q(eps)
    if np.ndim(m) == 0 and np.ndim(qi) == 0:
        if qi <= 0.0:
            return 0.0
        t2 = qi * qi / m
        # with u = (1 + snr)^2 the condition reads u (u - 1) = t2
        u = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t2))
        return math.sqrt(u) - 1.0
    t2 = np.where(qi > 0.0, qi, 0.0) ** 2 / np.asarray(m, dtype=float)
    return np.sqrt(0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t2))) - 1.0


def on_increasing_branch(m, snr, eps):
    """True where ``snr`` is at or beyond the dispersion dip.

    Below the dip the approximation rises again towards ``log2(m)/m`` as the
    SNR vanishes, which is an artifact rather than an achievable rate.
    """
    return snr >= rate_minimizing_snr(m, eps) * (1.0 - 1e-12)


def invert_snr_for_error(m, eps, rate, snr_cap=SNR_CAP):
    """Smallest SNR on the increasing branch with ``fbl_error(m, snr, rate) == eps``.

    Equivalently solves ``fbl_rate_raw(m, snr, eps) == rate``. If ``rate`` is
    already met at the bottom of the dispersion dip, that dip SNR is returned
    and the rate is over-achieved.
    """
    if not m >= 1.0:
        raise DomainError(f"blocklength must be >= 1, got {m!r}")
    _check_prob(eps, "eps")
    if not rate > 0.0:
        raise DomainError(f"rate must be positive, got {rate!r}")
    qi = inv_q(eps)
    lo = rate_minimizing_snr(m, eps)
    lo_eval = max(lo, 1e-300)
    log_term = math.log2(m) / m

    def f(s):
        disp = LOG2E * math.sqrt(s * (s + 2.0) / ((s + 1.0) ** 2 * m))
        return math.log2(1.0 + s) - disp * qi + log_term - rate

    if f(lo_eval) >= 0.0:
        return lo
    if f(snr_cap) < 0.0:
        raise InfeasibleRateError(
            f"rate {rate} not reachable below SNR {snr_cap:g} at m={m}, eps={eps}")
    return brentq(f, lo_eval, snr_cap, xtol=1e-300, rtol=ROOT_RTOL,
                  maxiter=ROOT_MAXITER)


def invert_snr_for_error_many(m, eps, rate, snr_cap=SNR_CAP):
    """Array form of :func:`invert_snr_for_error` over paired ``m`` and ``rate``.

    Entries whose rate is out of reach below ``snr_cap`` come back as NaN
    instead of raising. Roots are found by bisection on ``log(snr)`` to about
    ``ROOT_RTOL`` relative, so values agree with the scalar routine to within
    that tolerance.
    """
    m = np.asarray(m, dtype=float)
    rate = np.asarray(rate, dtype=float)
    m, rate = np.broadcast_arrays(m, rate)
    if np.any(~(m >= 1.0)):
        raise DomainError("blocklengths must be >= 1")
    if np.any(~(rate > 0.0)):
        raise DomainError("rates must be positive")
    _check_prob(eps, "eps")
    qi = inv_q(eps)
    t2 = qi * qi / m if qi > 0.0 else np.zeros_like(m)
    lo = np.sqrt(0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t2))) - 1.0
    lo = np.maximum(lo, 1e-300)
    log_term = np.log2(m) / m

    def f(s):
        disp = LOG2E * np.sqrt(s * (s + 2.0) / ((s + 1.0) ** 2 * m))
        return np.log2(1.0 + s) - disp * qi + log_term - rate

    out = np.full(m.shape, np.nan)
    at_dip = f(lo) >= 0.0
    out[at_dip] = lo[at_dip]
    todo = ~at_dip & (f(np.full(m.shape, float(snr_cap))) >= 0.0)
    a = np.log(lo[todo])
    b = np.full(a.shape, math.log(snr_cap))
    mt, rt, lt = m[todo], rate[todo], log_term[todo]
    for _ in range(ROOT_MAXITER):
        if a.size == 0 or np.max(b - a) <= ROOT_RTOL:
            break
        mid = 0.5 * (a + b)
        s = np.exp(mid)
        val = (np.log2(1.0 + s) - LOG2E * np.sqrt(s * (s + 2.0) / ((s + 1.0) ** 2 * mt)) * qi
               + lt - rt)
        up = val >= 0.0
        b = np.where(up, mid, b)
        a = np.where(up, a, mid)
    out[todo] = np.exp(0.5 * (a + b))
    return out
