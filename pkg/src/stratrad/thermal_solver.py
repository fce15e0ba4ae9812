"""Temperature from the radiative energy balance int k b(T) dnu = int k J dnu.

All depth nodes are solved at once; bracketing, bisection and Newton steps
are applied elementwise with masks so that each node follows the sequence of
iterates it would follow on its own, up to summation rounding.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import dual as dn
from .special_functions import planck, planck_dT
from .spectral_grid import SpectralGrid

log = logging.getLogger(__name__)

T_FLOOR = 0.1


@dataclass
class TemperatureProfile:
    T: object
    flagged: list = field(default_factory=list)

    def __len__(self):
        return len(dn.value(self.T))


def _kappa_weights(spectral: SpectralGrid, kappa_eff=None):
    """kappa_j * dnu_j as a (jmax, 1) or (jmax, n) array."""
    if kappa_eff is None:
        k = spectral.kappa.reshape(-1, 1) if dn.is_dual(spectral.kappa) else spectral.kappa[:, None]
    else:
        k = kappa_eff
    return k * spectral.dnu[:, None]


def absorbed_power(field_J, spectral: SpectralGrid, kappa_eff=None):
    """int k J dnu at every depth node."""
    return (_kappa_weights(spectral, kappa_eff) * field_J).sum(axis=0)


def _emitted(T, nu, kw):
    Tr = T.reshape(1, -1) if dn.is_dual(T) else np.asarray(T)[None, :]
    return (kw * planck(nu[:, None], Tr)).sum(axis=0)


def _emitted_dT(T, nu, kw):
    Tr = T.reshape(1, -1) if dn.is_dual(T) else np.asarray(T)[None, :]
    return (kw * planck_dT(nu[:, None], Tr)).sum(axis=0)


def balance_residual(T0, rhs, spectral: SpectralGrid, midpoint: bool = False, kappa_eff=None):
    """int k b(nu, T0) dnu - rhs with the rectangle rule.

    ``midpoint`` evaluates b at cell midpoints, as the Newton iteration does.
    Works elementwise on arrays of temperatures.
    """
    scalar = np.ndim(dn.value(T0)) == 0
    T = dn.asarray(T0)
    nu = spectral.nu_mid if midpoint else spectral.nu
    kw = _kappa_weights(spectral, kappa_eff)
    r = _emitted(T, nu, kw) - rhs
    return r[0] if scalar else r


def bracket_and_bisect(rhs, spectral: SpectralGrid, T_start, eps: float = 0.01, kappa_eff=None):
    """Bracket the root by halving/doubling from max(T_start, 0.1), then bisect to width ``eps``."""
    kw = _kappa_weights(spectral, kappa_eff)
    nu = spectral.nu

    def res(T):
        return _emitted(T, nu, kw) - rhs

    hot = dn.value(rhs) > 0
    lo = dn.maximum(T_start, T_FLOOR)
    hi = lo.copy() if dn.is_dual(lo) else np.array(lo, dtype=float)
    r = res(lo)
    while True:
        m = hot & (dn.value(r) > 0)
        if not np.any(m):
            break
        lo = dn.where(m, lo / 2, lo)
        r = res(lo)
    r = res(hi)
    while True:
        m = hot & (dn.value(r) < 0)
        if not np.any(m):
            break
        hi = dn.where(m, hi * 2, hi)
        r = res(hi)
    while True:
        m = hot & (dn.value(hi - lo) > eps)
        if not np.any(m):
            break
        mid = (hi + lo) / 2
        r = res(mid)
        up = m & (dn.value(r) > 0)
        down = m & ~(dn.value(r) > 0)
        hi = dn.where(up, mid, hi)
        lo = dn.where(down, mid, lo)
    return (hi + lo) / 2


def solve_profile(
    J,
    spectral: SpectralGrid,
    T_init,
    eps_dycho: float = 0.01,
    eps_newton: float = 1e-12,
    newton_max: int = 50,
    kappa_eff=None,
    midpoint: bool = True,
) -> TemperatureProfile:
    """Solve the energy balance at every depth node.

    Bracketing and bisection use node frequencies; Newton uses midpoint
    frequencies for b and db/dT unless ``midpoint`` is false. Iteration stops once the residual of the
    current iterate is below ``eps_newton``; that iterate still receives its
    Newton correction. Nodes with no absorbed power get T = 0. Nodes that do
    not converge in ``newton_max`` steps are flagged and keep their last
    iterate.
    """
    rhs = absorbed_power(J, spectral, kappa_eff)
    n = len(dn.value(rhs))
    T_init = T_init + np.zeros(n) if np.ndim(dn.value(T_init)) == 0 else T_init
    hot = dn.value(rhs) > 0
    T = bracket_and_bisect(rhs, spectral, T_init, eps_dycho, kappa_eff)
    kw = _kappa_weights(spectral, kappa_eff)
    nu1 = spectral.nu_mid if midpoint else spectral.nu
    active = hot.copy()
    converged = ~hot
    for _ in range(newton_max):
        if not np.any(active):
            break
        pres = rhs - _emitted(T, nu1, kw)
        deriv = _emitted_dT(T, nu1, kw)
        step = active & (np.abs(dn.value(deriv)) > 1e-10)
        safe = dn.where(step, deriv, 1.0)
        T = dn.where(step, T + pres / safe, T)
        done = active & (np.abs(dn.value(pres)) <= eps_newton)
        converged |= done
        active &= ~done
    flagged = [int(i) for i in np.nonzero(hot & ~converged)[0]]
    if flagged:
        log.warning("Newton precision doubtful at depth nodes %s", flagged)
    T = dn.where(hot, T, 0.0)
    return TemperatureProfile(T=T, flagged=flagged)


def solve_node(i: int, J, spectral: SpectralGrid, T_init=0.0, **kw) -> float:
    """Temperature at depth node ``i`` alone."""
    col = J[:, i : i + 1]
    prof = solve_profile(col, spectral, np.array([dn.value(T_init)]) if not dn.is_dual(T_init) else T_init, **kw)
    return prof.T[0]


def solve_profile_grey(J, spectral: SpectralGrid):
    """Closed-form temperature for frequency-independent absorption.

    T = (15 int J dnu)^(1/4) / pi, the inverse of int b(nu, T) dnu = pi^4 T^4 / 15.
    """
    total = (J * spectral.dnu[:, None]).sum(axis=0)
    total = dn.maximum(total, 0.0)
    return dn.sqrt(dn.sqrt(15 * total)) / np.pi
