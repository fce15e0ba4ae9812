"""Temperature sensitivity to a band-limited absorption increase.

The absorption kappa_nu = base + dk 1_(nu1, nu2) is built with dk a dual
number seeded at zero, and the full fixed-point solve is run on duals; the
derivative channel of the resulting temperature is dT/d(dk) at dk = 0.
"""

from __future__ import annotations

import numpy as np

from . import dual as dn
from .config import SolverConfig
from .solver_driver import Solution, fixed_point_solve, gauss_half
from .special_functions import planck
from .spectral_grid import SpectralGrid, kappa_banded
from .transport_kernel import reconstruct_intensity


def perturbed_grid(spectral: SpectralGrid, nu1: float, nu2: float, dk, base: float = 0.5) -> SpectralGrid:
    return spectral.with_kappa(kappa_banded(spectral.nu, base=base, step=dk, nu_lo=nu1, nu_hi=nu2))


def sensitivity_run(nu1: float, nu2: float, spectral: SpectralGrid, cfg: SolverConfig, base: float = 0.5):
    """dT/d(dk) at every depth node, and the dual solution it came from."""
    dk = dn.Dual(0.0, 1.0)
    sol = fixed_point_solve(perturbed_grid(spectral, nu1, nu2, dk, base), cfg)
    return np.array(dn.derivative(sol.T), dtype=float), sol


def finite_difference_check(nu1: float, nu2: float, spectral: SpectralGrid, cfg: SolverConfig, h: float = 1e-3, base: float = 0.5, floor: float = 1e-6):
    """Compare the dual derivative with (T(h) - T(-h)) / 2h.

    Returns (max relative deviation over nodes with |T'| > floor, T', central difference).
    """
    dT, _ = sensitivity_run(nu1, nu2, spectral, cfg, base)
    Tp = fixed_point_solve(perturbed_grid(spectral, nu1, nu2, h, base), cfg).T
    Tm = fixed_point_solve(perturbed_grid(spectral, nu1, nu2, -h, base), cfg).T
    fd = (Tp - Tm) / (2 * h)
    mask = np.abs(dT) > floor
    dev = float(np.max(np.abs(fd[mask] - dT[mask]) / np.abs(dT[mask]))) if np.any(mask) else 0.0
    return dev, dT, fd


def sign_criterion(sol: Solution) -> np.ndarray:
    """sign(J_nu(tau) - b_nu(T(tau))), shape (jmax, n_tau)."""
    J = dn.value(sol.field.J)
    T = dn.value(sol.T)
    b = planck(sol.spectral.nu[:, None], T[None, :])
    return np.sign(J - b)


def switch_points(signs: np.ndarray, nu: np.ndarray, altitude: np.ndarray, z_max: float = 6.0, nu_max: float | None = None):
    """Sign changes of the criterion.

    Returns two lists of (altitude, nu) points: flips between consecutive
    frequencies at fixed depth node, and flips between consecutive depth
    nodes at fixed frequency (reported at the lower node).
    """
    along_nu, along_z = [], []
    nu_max = np.inf if nu_max is None else nu_max
    jmax, n = signs.shape
    for i in range(n):
        if altitude[i] > z_max:
            continue
        s = signs[:, i]
        for j in np.nonzero(s[1:] * s[:-1] < 0)[0]:
            if nu[j] <= nu_max:
                along_nu.append((float(altitude[i]), float(nu[j])))
    for j in range(jmax):
        if nu[j] > nu_max:
            continue
        s = signs[j]
        for i in np.nonzero(s[1:] * s[:-1] < 0)[0]:
            if altitude[i] <= z_max:
                along_z.append((float(altitude[i]), float(nu[j])))
    return along_nu, along_z


def perturbation_predictor(sol: Solution, nu_star: float, nq: int = 64) -> np.ndarray:
    """Predicted sign profile of the temperature response at frequency ``nu_star``.

    Evaluates, with unit perturbation amplitude,

        P(tau) = -| int_0^tau 1/2 int_0^1 (I(t, mu) - I(t, -mu)) / mu dmu dt |
                 + (J(tau) - b(T(tau))) / kappa

    at the frequency node nearest ``nu_star``; the inner angular integral is
    the principal value of the half mean of I / mu. kappa is the grid
    absorption at that node.
    """
    op = sol.op
    j = int(np.argmin(np.abs(sol.spectral.nu - nu_star)))
    kappa = float(dn.value(sol.spectral.kappa)[j])
    tau = op.grid.tau
    T = dn.value(sol.T)
    mu, w = gauss_half(nq)
    # cell Gauss points for the depth integral of the angular term
    xg, wg = np.polynomial.legendre.leggauss(4)
    a, b = tau[:-1], tau[1:]
    tg = (0.5 * (b - a)[:, None] * (xg[None, :] + 1) + a[:, None])
    wt = 0.5 * (b - a)[:, None] * wg[None, :]
    src_T = dn.value(sol.T_source if sol.T_source is not None else sol.T)
    I = reconstruct_intensity(tg.ravel(), np.concatenate([mu, -mu]), j, sol.field, src_T, op)
    odd = 0.5 * ((I[:, : len(mu)] - I[:, len(mu) :]) / mu) @ w
    per_cell = (odd.reshape(tg.shape) * wt).sum(axis=1)
    cumulative = np.concatenate([[0.0], np.cumsum(per_cell)])
    J = dn.value(sol.field.J)[j]
    bT = planck(sol.spectral.nu[j], T)
    return -np.abs(cumulative) + (J - bT) / kappa


def sign_agreement(predicted: np.ndarray, measured: np.ndarray, floor: float = 0.0) -> float:
    """Fraction of nodes where the two profiles have the same sign."""
    mask = np.abs(measured) > floor
    if not np.any(mask):
        return 1.0
    return float(np.mean(np.sign(predicted[mask]) == np.sign(measured[mask])))


__all__ = [
    "perturbed_grid",
    "sensitivity_run",
    "finite_difference_check",
    "sign_criterion",
    "switch_points",
    "perturbation_predictor",
    "sign_agreement",
]
