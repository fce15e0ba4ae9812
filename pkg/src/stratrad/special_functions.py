"""Exponential integrals, the scaled Planck function and the solar spectrum.

Every function accepts floats, numpy arrays or :class:`~stratrad.dual.Dual`
values. Temperatures and frequencies are in the scaled units used throughout
the package (temperature in units of 4780 K, frequency in units of 1e14 Hz).
"""

from __future__ import annotations

import numpy as np

from . import dual as dn

EULER_GAMMA = 0.577215664901533
EXPINT_TMAX = 18.0
# below this argument E_1 is replaced by 0 (its integral over a vanishing
# interval is negligible)
EXPINT_TMIN = 1e-10

T_SUN = 1.209
C_SUN = 2.03e-5 * 2.0 * np.sqrt(2.0) / 0.7
# value quoted in the text for the scaled solar power
C_SUN_TEXT = 5.66e-5

_SERIES_MAX_TERMS = 400


class DomainError(ValueError):
    """Argument outside the range where a special function is valid."""


def _e1_series(t):
    """E_1 from the positive series Ein(t) = e^-t sum_n t^n H_n / n!.

    All terms are positive, so unlike the alternating power series no digits
    are lost to cancellation for t up to 18.
    """
    tv = dn.value(t)
    small = tv < EXPINT_TMIN
    ts = dn.where(small, 1.0, t)
    term = dn.exp(-ts)
    total = 0.0 * ts
    harmonic = 0.0
    for n in range(1, _SERIES_MAX_TERMS):
        term = term * ts / n
        harmonic += 1.0 / n
        total = total + term * harmonic
        if n > 4 and np.all(dn.value(term) * harmonic <= 1e-17 * dn.value(total)):
            break
    e1 = total - EULER_GAMMA - dn.log(ts)
    return dn.where(small, 0.0, e1)


def _e1_listing(t):
    """Alternating power series with the reference program's term count."""
    tv = np.asarray(dn.value(t), dtype=float)
    small = tv < EXPINT_TMIN
    ts = dn.where(small, 1.0, t)
    nterms = (9 + (np.asarray(dn.value(ts)) - 1) * 4).astype(int)
    ak = ts
    total = -EULER_GAMMA - dn.log(ts) + ak
    for k in range(2, int(np.max(nterms))):
        ak = ak * (-ts * (k - 1) / k**2)
        total = total + dn.where(k < nterms, ak, 0.0)
    return dn.where(small, 0.0, total)


def _expint_unchecked(p: int, t, method: str = "series"):
    if method == "series":
        e = _e1_series(t)
    elif method == "listing":
        e = _e1_listing(t)
    else:
        raise ValueError(f"unknown expint method {method!r}")
    if p == 1:
        return e
    emt = dn.exp(-t)
    for q in range(2, p + 1):
        e = (emt - t * e) / (q - 1)
    return e


def expint(p: int, t, method: str = "series"):
    """Exponential integral E_p(t) = int_0^1 exp(-t/mu) mu^(p-2) dmu, p = 1..5.

    E_1 comes from a series (``method="series"`` is cancellation free,
    ``method="listing"`` reproduces the truncated alternating series of the
    reference program); higher orders follow from
    (p-1) E_p(t) = exp(-t) - t E_{p-1}(t).

    For t < 1e-10, E_1 is returned as 0.

    Raises DomainError for p outside 1..5 or t outside [0, 18].
    """
    if p not in (1, 2, 3, 4, 5):
        raise DomainError(f"expint order must be in 1..5, got {p}")
    tv = np.asarray(dn.value(t), dtype=float)
    if np.any(~np.isfinite(tv)) or np.any(tv < 0) or np.any(tv > EXPINT_TMAX):
        raise DomainError(f"expint argument outside [0, {EXPINT_TMAX}]: range [{tv.min()}, {tv.max()}]")
    return _expint_unchecked(p, t, method)


def expint_extended(p: int, t, method: str = "series"):
    """E_p for p up to 6 (antiderivatives of the kernel moments)."""
    if not 1 <= p <= 6:
        raise DomainError(f"expint order must be in 1..6, got {p}")
    tv = np.asarray(dn.value(t), dtype=float)
    if np.any(tv < 0) or np.any(tv > EXPINT_TMAX):
        raise DomainError(f"expint argument outside [0, {EXPINT_TMAX}]: range [{tv.min()}, {tv.max()}]")
    return _expint_unchecked(p, t, method)


def planck(nu, T):
    """Scaled Planck function b(nu, T) = nu^3 / (exp(nu/T) - 1).

    Zero for T < 1e-7; T nu^2 for nu < 1e-10.
    """
    Tv = np.asarray(dn.value(T), dtype=float)
    nuv = np.asarray(nu, dtype=float)
    cold = Tv < 1e-7
    tiny = nuv < 1e-10
    Ts = dn.where(cold, 1.0, T)
    nus = np.where(tiny, 1.0, nuv)
    x = nus / Ts
    # nu^3 e^-x / (1 - e^-x) stays finite for large x
    with np.errstate(over="ignore", under="ignore"):
        b = -(nus**3) * dn.exp(-x) / dn.expm1(-x)
    b = dn.where(tiny, T * nuv**2, b)
    return dn.where(cold, 0.0, b)


def planck_dT(nu, T):
    """Temperature derivative of :func:`planck`.

    Zero for T < 1e-7; nu^2 for nu < 1e-10.
    """
    Tv = np.asarray(dn.value(T), dtype=float)
    nuv = np.asarray(nu, dtype=float)
    cold = Tv < 1e-7
    tiny = nuv < 1e-10
    Ts = dn.where(cold, 1.0, T)
    nus = np.where(tiny, 1.0, nuv)
    x = nus / Ts
    with np.errstate(over="ignore", under="ignore"):
        em = dn.expm1(-x)
        d = dn.exp(-x) * (nus * nus / em / Ts) ** 2
    d = dn.where(tiny, nuv**2 + 0.0 * Ts, d)
    return dn.where(cold, 0.0, d)


def solar_source(nu, T_sun: float = T_SUN, C_sun: float = C_SUN):
    """Scaled solar spectrum C_sun * nu^3 / (exp(nu/T_sun) - 1)."""
    return C_sun * planck(np.asarray(nu, dtype=float), T_sun)
