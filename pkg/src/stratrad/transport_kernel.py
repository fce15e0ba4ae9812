"""Mean-intensity update of the multigroup integral equation.

For each frequency the zeroth and second angular moments of the intensity are

    J(tau)  = src0(tau) + 1/2 int_0^Z [E1(k|tau-t|) + a_e E1(k(tau+t))] H0(t)
                        + 1/2 int_0^Z [E3(k|tau-t|) + a_e E3(k(tau+t))] H2(t) dt
    S2(tau) = src2(tau) + the same with kernels E3 and E5,

with H0 = k [b(T)(1 - a_r) + (a_iso + 1.125 a_r) J - 1.125 a_r S2] and
H2 = -0.375 a_r k (J - 3 S2) (a_r is the Rayleigh band weight). T, J and S2 are
piecewise constant on depth cells, so the t-integrals reduce to fixed weight
matrices that depend only on kappa and the grid. They are assembled once per
absorption spectrum in :class:`TransportOperator`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dual as dn
from .atmosphere import OpticalGrid, ScatteringProfile, build_scattering
from .config import SolverConfig
from .special_functions import _expint_unchecked, expint, planck, solar_source
from .spectral_grid import SpectralGrid

RAYLEIGH_BAND = (0.8, 1.2)


@dataclass
class RadiationField:
    """Zeroth (J) and second (S2) angular moments, shape (jmax, n_tau)."""

    J: object
    S2: object

    @classmethod
    def zeros(cls, jmax: int, n_tau: int, like=None) -> "RadiationField":
        return cls(dn.zeros((jmax, n_tau), like), dn.zeros((jmax, n_tau), like))

    def norms(self) -> tuple[float, float]:
        return float(np.sum(np.abs(dn.value(self.J)))), float(np.sum(np.abs(dn.value(self.S2))))


def _expint_orders(t, orders, method):
    """E_p(t) for each p in ``orders`` from one E_1 evaluation."""
    out = {}
    e = _expint_unchecked(1, t, method)
    if 1 in orders:
        out[1] = e
    emt = dn.exp(-t)
    for q in range(2, max(orders) + 1):
        e = (emt - t * e) / (q - 1)
        if q in orders:
            out[q] = e
    return out


def _check_domain(x, what):
    xv = dn.value(x)
    if np.max(xv) > 18.0:
        raise ValueError(
            f"exponential-integral argument {np.max(xv):.3g} exceeds 18 in {what}; "
            "reduce kappa or the depth Z"
        )


def _column(kappa):
    """kappa as shape (jmax, 1, 1) for broadcasting against (points, cells)."""
    if dn.is_dual(kappa):
        return kappa.reshape(-1, 1, 1)
    return np.asarray(kappa, dtype=float).reshape(-1, 1, 1)


def exact_weights(kappa, edges, points, orders=(1, 3, 5), method="series"):
    """Cell weights 1/2 int_cell E_p(k|x - t|) dt for every point x and cell.

    Uses d/ds E_{p+1}(s) = -E_p(s). Returns {p: array (jmax, len(points), len(edges)-1)}.
    """
    k = _column(kappa)
    d = np.asarray(points, dtype=float)[:, None] - np.asarray(edges, dtype=float)[None, :]
    below = k * np.maximum(d, 0.0)
    above = k * np.maximum(-d, 0.0)
    _check_domain(below, "depth kernel")
    _check_domain(above, "depth kernel")
    anti = sorted({p + 1 for p in orders})
    Fb = _expint_orders(below, anti, method)
    Fa = _expint_orders(above, anti, method)
    out = {}
    for p in orders:
        lo = Fb[p + 1][..., 1:] - Fb[p + 1][..., :-1]
        hi = Fa[p + 1][..., :-1] - Fa[p + 1][..., 1:]
        out[p] = 0.5 * (lo + hi) / k
    return out


def exact_reflected_weights(kappa, edges, points, level=0.0, orders=(1, 3, 5), method="series"):
    """1/2 int_{cell, t > level} E_p(k(x + t - level)) dt for every point and cell."""
    k = _column(kappa)
    e = np.maximum(np.asarray(edges, dtype=float), level) - level
    s = np.asarray(points, dtype=float)[:, None] + e[None, :]
    arg = k * s
    _check_domain(arg, "reflected kernel")
    F = _expint_orders(arg, sorted({p + 1 for p in orders}), method)
    return {p: 0.5 * (F[p + 1][..., :-1] - F[p + 1][..., 1:]) / k for p in orders}


def _sample_nodes(grid: OpticalGrid, cfg: SolverConfig):
    dt = cfg.step(0.0, grid.Z)
    t = np.arange(int(np.ceil(grid.Z / dt)) + 1) * dt
    t = t[t < grid.Z]
    return t, dt


def sampled_weights(kappa, grid: OpticalGrid, points, cfg: SolverConfig, orders=(1, 3, 5), reflect_levels=()):
    """Left-point rule of step dt on [0, Z], accumulated per cell.

    Samples where kappa (t - x) is exactly zero are skipped. Returns direct
    weights and, for each (level, albedo) in ``reflect_levels``, the reflected
    weights scaled by the albedo.
    """
    t, dt = _sample_nodes(grid, cfg)
    cells = grid.cell_index(t)
    starts = np.searchsorted(cells, np.arange(grid.n_tau - 1), side="left")
    k = _column(kappa)
    x = np.asarray(points, dtype=float)
    dist = np.abs(x[:, None] - t[None, :])
    arg = k * dist
    _check_domain(arg, "sampled kernel")
    skip = (dn.value(arg) == 0.0)
    E = _expint_orders(arg, sorted(orders), cfg.expint_method)

    def accumulate(vals):
        vals = dn.where(np.broadcast_to(skip, dn.value(vals).shape), 0.0, vals)
        return _reduce_cells(vals, starts, grid.n_tau - 1) * (0.5 * dt)

    direct = {p: accumulate(E[p]) for p in orders}
    reflected = {}
    for level, alb in reflect_levels:
        s = x[:, None] + t[None, :] - level
        arg_r = k * np.where(t[None, :] >= level, s, 0.0)
        _check_domain(arg_r, "sampled reflected kernel")
        Er = _expint_orders(arg_r, sorted(orders), cfg.expint_method)
        mask = np.broadcast_to((t >= level)[None, :], dist.shape)
        for p in orders:
            v = dn.where(np.broadcast_to(mask, dn.value(Er[p]).shape), Er[p], 0.0)
            w = _reduce_cells(v, starts, grid.n_tau - 1) * (0.5 * dt * alb)
            reflected[p] = w if p not in reflected else reflected[p] + w
    return direct, reflected


def _reduce_cells(vals, starts, ncell):
    def red(a):
        out = np.zeros(a.shape[:-1] + (ncell,))
        nonempty = starts < a.shape[-1]
        idx = starts[nonempty]
        sums = np.add.reduceat(a, idx, axis=-1)
        # reduceat repeats a value for empty cells; zero those out
        counts = np.diff(np.append(idx, a.shape[-1]))
        sums = np.where(counts > 0, sums, 0.0)
        out[..., np.nonzero(nonempty)[0]] = sums
        return out

    if dn.is_dual(vals):
        return dn.Dual(red(vals.val), red(vals.der))
    return red(np.asarray(vals))


def rayleigh_weight(nu, a_ray):
    """Band-limited Rayleigh weight a_r(t, nu), shape (jmax, n_tau)."""
    nu = np.asarray(nu, dtype=float)[:, None]
    lo, hi = RAYLEIGH_BAND
    band = ((nu > lo) & (nu < hi)).astype(float)
    return np.asarray(a_ray)[None, :] * (nu - lo) ** 2 * (nu - hi) ** 2 * band * 40


def emission_terms(spectral: SpectralGrid, scattering: ScatteringProfile, T, field: RadiationField):
    """Depth sources (H0, H2), shape (jmax, n_tau)."""
    kappa = spectral.kappa.reshape(-1, 1) if dn.is_dual(spectral.kappa) else spectral.kappa[:, None]
    ar4 = rayleigh_weight(spectral.nu, scattering.a_ray)
    b = planck(spectral.nu[:, None], T[None, :] if not dn.is_dual(T) else T.reshape(1, -1))
    iso = np.asarray(scattering.a_iso)[None, :]
    H0 = kappa * (b * (1 - ar4) + (iso + 1.125 * ar4) * field.J - 1.125 * ar4 * field.S2)
    if np.any(ar4 != 0):
        H2 = -0.375 * ar4 * kappa * (field.J - 3 * field.S2)
    else:
        H2 = None
    return H0, H2


class TransportOperator:
    """Assembled depth kernels for one absorption spectrum and boundary setup."""

    def __init__(self, spectral: SpectralGrid, grid: OpticalGrid, cfg: SolverConfig, scattering: ScatteringProfile | None = None):
        self.spectral = spectral
        self.grid = grid
        self.cfg = cfg
        if scattering is None:
            scattering = build_scattering(
                grid, cfg.a_is, cfg.a_rs, cfg.tm1_frac, cfg.tm2_frac, listing_offset=cfg.profile_offset
            )
        self.scattering = scattering
        bc = cfg.boundary
        levels = []
        if bc.earth_albedo:
            levels.append((0.0, bc.earth_albedo))
        for tau_k, alpha_k in bc.albedo_levels:
            if not 0 <= tau_k < grid.Z:
                raise ValueError(f"albedo level {tau_k} outside [0, Z)")
            levels.append((tau_k, alpha_k))
        self.levels = levels
        self.W = self._weights(grid.tau)
        self.src0, self.src2 = self._boundary_source(grid.tau)

    def _weights(self, points):
        kappa = self.spectral.kappa
        cfg = self.cfg
        if cfg.quadrature == "exact":
            W = exact_weights(kappa, self.grid.tau, points, method=cfg.expint_method)
            for level, alb in self.levels:
                R = exact_reflected_weights(kappa, self.grid.tau, points, level, method=cfg.expint_method)
                for p in W:
                    W[p] = W[p] + alb * R[p]
            return W
        W, R = sampled_weights(kappa, self.grid, points, cfg, reflect_levels=self.levels)
        for p in R:
            W[p] = W[p] + R[p]
        return W

    @property
    def kappa_source(self):
        return dn.maximum(self.spectral.kappa, self.cfg.kappa_source_floor)

    @property
    def Q0(self):
        return solar_source(self.spectral.nu, self.cfg.T_sun, self.cfg.C_sun) * self.cfg.boundary.source_scale

    def _boundary_source(self, points):
        """Beam contributions 1/2 Q0 E3 and 1/2 Q0 E5 at the given depths."""
        bc = self.cfg.boundary
        Z = self.grid.Z
        x = np.asarray(points, dtype=float)[None, :]
        ks = self.kappa_source
        ks = ks.reshape(-1, 1) if dn.is_dual(ks) else ks[:, None]
        half_q = 0.5 * self.Q0[:, None]
        m = self.cfg.expint_method
        top = 1 - bc.alpha_bottom
        bottom_arg = x if bc.bottom_plain else Z + x
        bottom_arg2 = x if (bc.bottom_plain or self.cfg.bottom_s2_listing) else Z + x
        src0 = half_q * (top * expint(3, ks * (Z - x), m) + bc.alpha_bottom * expint(3, ks * bottom_arg, m))
        src2 = half_q * (top * expint(5, ks * (Z - x), m) + bc.alpha_bottom * expint(5, ks * bottom_arg2, m))
        return src0, src2

    def source_moments(self, T, field: RadiationField):
        """Convolution part (m0, m2) of the update at every node, shape (jmax, n_tau)."""
        H0, H2 = emission_terms(self.spectral, self.scattering, T, field)
        return self._apply(self.W, H0, H2)

    def _apply(self, W, H0, H2):
        n = self.grid.n_tau - 1
        H0c = H0[:, :n]
        m0 = dn.einsum("jik,jk->ji", W[1], H0c)
        m2 = dn.einsum("jik,jk->ji", W[3], H0c)
        if H2 is not None:
            H2c = H2[:, :n]
            m0 = m0 + dn.einsum("jik,jk->ji", W[3], H2c)
            m2 = m2 + dn.einsum("jik,jk->ji", W[5], H2c)
        return m0, m2

    def update(self, field: RadiationField, T) -> RadiationField:
        """One Jacobi sweep: new (J, S2) from the current T, J and S2."""
        m0, m2 = self.source_moments(T, field)
        return RadiationField(m0 + self.src0, m2 + self.src2)


def source_moments(j: int, tau, field: RadiationField, T, op: TransportOperator):
    """Convolution moments (m0, m2) of frequency ``j`` at arbitrary depths ``tau``."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(tau < 0) or np.any(tau > op.grid.Z):
        raise ValueError("tau outside [0, Z]")
    sub = _single_frequency(op, j)
    W = sub._weights(tau)
    H0, H2 = emission_terms(sub.spectral, op.scattering, T, _row(field, j))
    n = op.grid.n_tau - 1
    m0 = dn.einsum("ik,k->i", W[1][0], H0[0, :n])
    m2 = dn.einsum("ik,k->i", W[3][0], H0[0, :n])
    if H2 is not None:
        m0 = m0 + dn.einsum("ik,k->i", W[3][0], H2[0, :n])
        m2 = m2 + dn.einsum("ik,k->i", W[5][0], H2[0, :n])
    return m0, m2


def multilayer_albedo_kernel(tau, j: int, field: RadiationField, T, op: TransportOperator, levels):
    """Reflected contribution sum_k alpha_k 1/2 int_{tau_k}^Z E1(k(t + tau - tau_k)) H0(t) dt.

    With a single level at tau_k = 0 this equals the ground-albedo term of the
    update. Levels are (tau_k, alpha_k) pairs.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    levels = [(float(t), float(a)) for t, a in levels]
    if not levels:
        return np.zeros_like(tau)
    if sum(a for _, a in levels) >= 1:
        raise ValueError("sum of albedos must be below 1")
    for t_k, _ in levels:
        if not 0 <= t_k < op.grid.Z:
            raise ValueError(f"level {t_k} outside [0, Z)")
    sub = _single_frequency(op, j)
    H0, H2 = emission_terms(sub.spectral, op.scattering, T, _row(field, j))
    n = op.grid.n_tau - 1
    total = 0.0
    for t_k, a_k in levels:
        R = exact_reflected_weights(sub.spectral.kappa, op.grid.tau, tau, t_k, orders=(1, 3), method=op.cfg.expint_method)
        total = total + a_k * dn.einsum("ik,k->i", R[1][0], H0[0, :n])
        if H2 is not None:
            total = total + a_k * dn.einsum("ik,k->i", R[3][0], H2[0, :n])
    return total


def _row(field: RadiationField, j: int) -> RadiationField:
    return RadiationField(field.J[j : j + 1], field.S2[j : j + 1])


def _single_frequency(op: TransportOperator, j: int) -> TransportOperator:
    """Shallow operator restricted to frequency ``j`` (weights built lazily)."""
    sub = object.__new__(TransportOperator)
    sub.spectral = SpectralGrid(nu=op.spectral.nu[j : j + 1], kappa=op.spectral.kappa[j : j + 1])
    sub.grid = op.grid
    sub.cfg = op.cfg
    sub.scattering = op.scattering
    sub.levels = op.levels
    return sub


def update_field(field: RadiationField, T, op: TransportOperator) -> RadiationField:
    return op.update(field, T)


# --- pointwise intensity -------------------------------------------------


def _ray_weights(kappa, edges, tau, mu):
    """int_{cell on the upstream side} exp(-k|tau - t|/|mu|) / |mu| dt.

    Shapes: tau (P,), mu (Q,) nonzero; returns (P, Q, cells).
    """
    a = edges[:-1][None, None, :]
    b = edges[1:][None, None, :]
    x = tau[:, None, None]
    m = np.abs(mu)[None, :, None]
    up = (mu > 0)[None, :, None]
    # upward rays see cells below tau, downward rays cells above
    lo_u, hi_u = np.minimum(a, x), np.minimum(b, x)
    lo_d, hi_d = np.maximum(a, x), np.maximum(b, x)
    with np.errstate(under="ignore"):
        w_up = (np.exp(-kappa * (x - hi_u) / m) - np.exp(-kappa * (x - lo_u) / m)) / kappa
        w_dn = (np.exp(-kappa * (lo_d - x) / m) - np.exp(-kappa * (hi_d - x) / m)) / kappa
    return np.where(up, w_up, w_dn)


def intensity_core(kappa, kappa_src, H0c, H2c, edges, tau, mu, q_bottom=0.0, q_top=0.0, plain=False, levels=()):
    """Intensity I(tau, mu) for one frequency from cell sources.

    The emission along a ray is (H0 + mu^2 H2) / |mu| per unit depth. At the
    ground the upward intensity is the beam mu q_bottom (attenuated by
    exp(-kappa_src Z / mu) unless ``plain``) plus albedo reflections of the
    downward thermal intensity at each (tau_l, alpha_l) level. At the top the
    downward intensity is the beam |mu| q_top.
    """
    edges = np.asarray(edges, dtype=float)
    Z = edges[-1]
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if np.any(mu == 0):
        raise ValueError("mu must be nonzero")
    if np.any(mu < -1) or np.any(mu > 1):
        raise ValueError("mu must lie in [-1, 1]")
    H0c = np.asarray(H0c, dtype=float)
    src = H0c[None, None, :] + (mu**2)[None, :, None] * (0.0 if H2c is None else np.asarray(H2c)[None, None, :])
    I = np.sum(_ray_weights(kappa, edges, tau, mu) * src, axis=-1)
    m = np.abs(mu)[None, :]
    x = tau[:, None]
    up = (mu > 0)[None, :]
    with np.errstate(under="ignore"):
        reflected = 0.0
        for level, alb in levels:
            down = intensity_core(kappa, kappa_src, H0c, H2c, edges, [level], -np.abs(mu))[0]
            reflected = reflected + alb * down[None, :]
        attenuation = 1.0 if plain else np.exp(-kappa_src * Z / m)
        beam_up = np.exp(-kappa * x / m) * reflected + q_bottom * m * attenuation * np.exp(-kappa_src * x / m)
        beam_dn = np.exp(-kappa_src * (Z - x) / m) * q_top * m
    return I + np.where(up, beam_up, beam_dn)


def reconstruct_intensity(tau, mu, j: int, field: RadiationField, T, op: TransportOperator):
    """Intensity I_j(tau, mu) from a solved (field, T); returns shape (len(tau), len(mu))."""
    H0, H2 = emission_terms(
        SpectralGrid(nu=op.spectral.nu[j : j + 1], kappa=dn.value(op.spectral.kappa)[j : j + 1]),
        op.scattering,
        dn.value(T),
        RadiationField(dn.value(field.J)[j : j + 1], dn.value(field.S2)[j : j + 1]),
    )
    n = op.grid.n_tau - 1
    bc = op.cfg.boundary
    q = float(op.Q0[j])
    return intensity_core(
        float(dn.value(op.spectral.kappa)[j]),
        float(dn.value(op.kappa_source)[j]),
        H0[0, :n],
        None if H2 is None else H2[0, :n],
        op.grid.tau,
        tau,
        mu,
        q_bottom=bc.alpha_bottom * q,
        q_top=(1 - bc.alpha_bottom) * q,
        plain=bc.bottom_plain,
        levels=op.levels,
    )
