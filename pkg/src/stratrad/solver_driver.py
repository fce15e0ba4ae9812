"""Outer fixed-point iteration between the transport update and the energy balance."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import dual as dn
from .atmosphere import OpticalGrid, build_grid
from .config import SolverConfig
from .spectral_grid import SpectralGrid
from .thermal_solver import solve_profile
from .transport_kernel import RadiationField, TransportOperator, emission_terms, intensity_core

PROBE_NODES = (2,)


@dataclass
class SolveReport:
    iterations: int = 0
    norm_J: list = field(default_factory=list)
    norm_S2: list = field(default_factory=list)
    probe_T: list = field(default_factory=list)
    sup_diff_T: list = field(default_factory=list)
    flagged: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def final_sup_diff(self) -> float:
        return self.sup_diff_T[-1] if self.sup_diff_T else float("nan")

    def to_text(self, timing: bool = False) -> str:
        lines = ["k\tT_probe\t|J|\t|S2|\tsup_dT"]
        for k in range(self.iterations):
            lines.append(
                f"{k}\t{self.probe_T[k]:.12g}\t{self.norm_J[k]:.12g}\t{self.norm_S2[k]:.12g}\t{self.sup_diff_T[k]:.6g}"
            )
        if self.flagged:
            lines.append("flagged\t" + " ".join(f"{k}:{i}" for k, i in self.flagged))
        if timing:
            lines.append(f"wall_time\t{self.wall_time:.3f}")
        return "\n".join(lines) + "\n"


@dataclass
class Solution:
    T: object
    field: RadiationField
    report: SolveReport
    op: TransportOperator
    # temperature the final field was computed from
    T_source: object = None

    @property
    def grid(self) -> OpticalGrid:
        return self.op.grid

    @property
    def spectral(self) -> SpectralGrid:
        return self.op.spectral

    @property
    def altitude(self) -> np.ndarray:
        return self.op.grid.altitude


def _balance_weights(op: TransportOperator, cfg: SolverConfig):
    if not cfg.balance_scattering_weights:
        return None
    k = op.spectral.kappa.reshape(-1, 1) if dn.is_dual(op.spectral.kappa) else op.spectral.kappa[:, None]
    return k * (1 - np.asarray(op.scattering.a_iso)[None, :])


def fixed_point_solve(
    spectral: SpectralGrid,
    cfg: SolverConfig | None = None,
    grid: OpticalGrid | None = None,
    op: TransportOperator | None = None,
) -> Solution:
    """Iterate field update and temperature solve ``cfg.k_max`` times.

    Starts from T = cfg.T_init and J = S2 = 0. With ``cfg.tol`` set, stops
    early once the sup-norm change of T falls below it.
    """
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    if op is None:
        grid = grid or build_grid(cfg.n_tau, cfg.H)
        op = TransportOperator(spectral, grid, cfg)
    grid = op.grid
    n = grid.n_tau
    like = spectral.kappa if dn.is_dual(spectral.kappa) else None
    T = dn.zeros(n, like) + cfg.T_init
    fld = RadiationField.zeros(spectral.jmax, n, like)
    kappa_eff = _balance_weights(op, cfg)
    report = SolveReport()
    T_prev = T
    for k in range(cfg.k_max):
        fld = op.update(fld, T)
        prof = solve_profile(
            fld.J, spectral, T, cfg.eps_dycho, cfg.eps_newton, cfg.newton_max, kappa_eff, cfg.newton_midpoint
        )
        T_prev, T = T, prof.T
        nJ, nS = fld.norms()
        report.norm_J.append(nJ)
        report.norm_S2.append(nS)
        report.probe_T.append(float(dn.value(T)[PROBE_NODES[0]]) if n > PROBE_NODES[0] else float("nan"))
        diff = float(np.max(np.abs(dn.value(T) - dn.value(T_prev))))
        report.sup_diff_T.append(diff)
        report.flagged.extend((k, i) for i in prof.flagged)
        report.iterations = k + 1
        if not (np.all(np.isfinite(dn.value(T))) and np.isfinite(nJ)):
            raise FloatingPointError(f"non-finite state at iteration {k}")
        if cfg.tol is not None and diff < cfg.tol:
            break
    report.wall_time = time.perf_counter() - t0
    return Solution(T=T, field=fld, report=report, op=op, T_source=T_prev)


def gauss_half(nq: int = 64):
    """Gauss-Legendre nodes and weights on (0, 1)."""
    x, w = np.polynomial.legendre.leggauss(nq)
    return 0.5 * (x + 1), 0.5 * w


def energy_identity_check(sol: Solution, nq: int = 64, n_sub: int = 8) -> float:
    """Relative residual of the L2 energy identity for the frequency-integrated intensity.

    Multiplying mu dI/dtau + k (I - B) = 0 by I and integrating over depth and
    angle gives, when the energy balance holds,

        k int int (I - J)^2 + 1/2 int_0^1 mu [I(Z, mu)^2 + I(0, -mu)^2]
            = 1/2 int_0^1 mu [I(Z, -mu)^2 + I(0, mu)^2],

    with I integrated over frequency and J its half angular mean. Requires a
    frequency-independent kappa and no scattering. Returns
    |lhs - rhs| / rhs, or 0 for a zero solution.
    """
    op = sol.op
    spectral = op.spectral
    kappa = np.asarray(dn.value(spectral.kappa))
    ks = np.asarray(dn.value(op.kappa_source))
    if not (np.all(kappa == kappa[0]) and np.all(ks == ks[0])):
        raise ValueError("energy identity needs a frequency-independent kappa")
    if np.any(op.scattering.a_iso) or np.any(op.scattering.a_ray):
        raise ValueError("energy identity needs zero scattering")
    T_src = dn.value(sol.T_source if sol.T_source is not None else sol.T)
    fld = RadiationField(dn.value(sol.field.J), dn.value(sol.field.S2))
    H0, H2 = emission_terms(SpectralGrid(nu=spectral.nu, kappa=kappa), op.scattering, T_src, fld)
    w = spectral.dnu
    n = op.grid.n_tau - 1
    H0bar = (H0[:, :n] * w[:, None]).sum(axis=0)
    Q = op.Q0
    bc = op.cfg.boundary
    qbar = float(np.sum(w * Q))
    k0, ks0 = float(kappa[0]), float(ks[0])
    edges = op.grid.tau
    mu, wq = gauss_half(nq)
    angles = np.concatenate([mu, -mu])
    wa = np.concatenate([wq, wq])

    def Ibar(tau):
        return intensity_core(
            k0, ks0, H0bar, None, edges, tau, angles,
            q_bottom=bc.alpha_bottom * qbar, q_top=(1 - bc.alpha_bottom) * qbar,
            plain=bc.bottom_plain, levels=op.levels,
        )

    # volume term, Gauss points inside each depth cell
    xg, wg = np.polynomial.legendre.leggauss(n_sub)
    a, b = edges[:-1], edges[1:]
    taus = (0.5 * (b - a)[:, None] * (xg[None, :] + 1) + a[:, None]).ravel()
    wt = (0.5 * (b - a)[:, None] * wg[None, :]).ravel()
    I = Ibar(taus)
    J = 0.5 * I @ wa
    volume = k0 * np.sum(wt * ((I - J[:, None]) ** 2 @ wa))
    top = Ibar([edges[-1]])[0]
    bottom = Ibar([0.0])[0]
    nqh = len(mu)
    out = 0.5 * np.sum(wq * mu * (top[:nqh] ** 2 + bottom[nqh:] ** 2))
    inc = 0.5 * np.sum(wq * mu * (top[nqh:] ** 2 + bottom[:nqh] ** 2))
    if inc == 0:
        return 0.0 if volume + out == 0 else float("inf")
    return float(abs(volume + out - inc) / inc)
