"""Optical-depth grid, scattering profiles and boundary configuration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

H_DEFAULT = 12.0


@dataclass(frozen=True)
class OpticalGrid:
    """Depth nodes tau[0] = 0 < ... < tau[-1] = Z with their altitudes.

    Temperatures and mean intensities are piecewise constant on the cells
    [tau[k], tau[k+1]), taking the value of the left node.
    """

    tau: np.ndarray
    altitude: np.ndarray

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        alt = np.asarray(self.altitude, dtype=float)
        if tau.ndim != 1 or len(tau) < 2:
            raise ValueError("need at least two depth nodes")
        if tau[0] != 0 or np.any(np.diff(tau) <= 0):
            raise ValueError("tau must start at 0 and increase strictly")
        if alt.shape != tau.shape:
            raise ValueError("altitude and tau must have the same length")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "altitude", alt)

    @property
    def n_tau(self) -> int:
        return len(self.tau)

    @property
    def Z(self) -> float:
        return float(self.tau[-1])

    @property
    def uniform(self) -> bool:
        n = self.n_tau
        return bool(np.array_equal(self.tau, np.arange(n) * self.Z / (n - 1)))

    def cell_index(self, t):
        """Cell containing depth ``t`` (clipped to the last cell)."""
        t = np.asarray(t, dtype=float)
        if self.uniform:
            k = ((self.n_tau - 1) * t / self.Z).astype(int)
        else:
            k = np.searchsorted(self.tau, t, side="right") - 1
        return np.clip(k, 0, self.n_tau - 2)


def build_grid(n_tau: int = 60, H: float = H_DEFAULT) -> OpticalGrid:
    """Uniform grid in tau on [0, Z], Z = 1 - exp(-H), altitude = -ln(1 - tau)."""
    if n_tau < 2:
        raise ValueError("n_tau must be at least 2")
    if H <= 0:
        raise ValueError("H must be positive")
    Z = 1 - np.exp(-H)
    tau = np.arange(n_tau) * Z / (n_tau - 1)
    return OpticalGrid(tau=tau, altitude=-np.log1p(-tau))


def tau_of_altitude(z):
    """Optical depth of altitude ``z`` for density proportional to exp(-z)."""
    return -np.expm1(-np.asarray(z, dtype=float))


@dataclass(frozen=True)
class ScatteringProfile:
    a_iso: np.ndarray
    a_ray: np.ndarray


def build_scattering(
    grid: OpticalGrid,
    a_is: float = 0.0,
    a_rs: float = 0.0,
    tm1_frac: float = 0.6,
    tm2_frac: float = 0.9,
    listing_offset: bool = False,
) -> ScatteringProfile:
    """Isotropic scattering bump on (tm1, tm2) and Rayleigh ramp on (tm2, Z).

    ``listing_offset`` evaluates the profiles at i Z / n_tau, as the reference
    program does, instead of at the grid nodes.
    """
    if not (0 <= a_is < 1 and 0 <= a_rs < 1):
        raise ValueError("scattering maxima must lie in [0, 1)")
    Z = grid.Z
    tm1, tm2 = tm1_frac * Z, tm2_frac * Z
    if listing_offset:
        t = np.arange(grid.n_tau) * Z / grid.n_tau
    else:
        t = grid.tau
    a_iso = a_is * np.maximum(t - tm1, 0) * np.maximum(tm2 - t, 0) * 4 / (tm2 - tm1) ** 2
    a_ray = a_rs * np.maximum(t - tm2, 0) / (Z - tm2)
    return ScatteringProfile(a_iso=a_iso, a_ray=a_ray)


@dataclass(frozen=True)
class BoundaryConfig:
    """Ground and top boundary data.

    The solar beam Q0 * source_scale enters with weight ``alpha_bottom`` at the
    ground (attenuated by exp(-kappa Z / mu) unless ``bottom_plain``) and with
    weight ``1 - alpha_bottom`` at the top. ``earth_albedo`` reflects the
    downward thermal radiation at the ground.
    """

    earth_albedo: float = 0.3
    alpha_bottom: float = 1.0
    bottom_plain: bool = False
    T_e: float = 288.0 / 4780.0
    source_scale: float = 1.0
    albedo_levels: tuple = ()

    def __post_init__(self):
        if not 0 <= self.earth_albedo < 1:
            raise ValueError("earth_albedo must lie in [0, 1)")
        if not 0 <= self.alpha_bottom <= 1:
            raise ValueError("alpha_bottom must lie in [0, 1]")
        if self.T_e < 0:
            raise ValueError("T_e must be nonnegative")
        levels = tuple((float(t), float(a)) for t, a in self.albedo_levels)
        if sum(a for _, a in levels) + self.earth_albedo >= 1:
            raise ValueError("total albedo must stay below 1")
        object.__setattr__(self, "albedo_levels", levels)
