"""Frequency grids, absorption spectra and frequency quadrature."""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import dual as dn

KAPPA_MIN = 0.001
JMAX_MAX = 600


@dataclass(frozen=True)
class SpectralGrid:
    """Frequency nodes with per-node absorption.

    ``kappa`` may be a :class:`~stratrad.dual.Dual` array when the absorption
    depends on a sensitivity parameter.
    """

    nu: np.ndarray
    kappa: object
    scatter_iso_max: float = 0.0
    scatter_ray_max: float = 0.0

    def __post_init__(self):
        nu = np.asarray(self.nu, dtype=float)
        if nu.ndim != 1 or len(nu) < 1:
            raise ValueError("nu must be a non-empty 1-d array")
        if len(nu) > JMAX_MAX:
            raise ValueError(f"at most {JMAX_MAX} frequency nodes, got {len(nu)}")
        if np.any(nu <= 0) or np.any(np.diff(nu) <= 0):
            raise ValueError("nu must be positive and strictly increasing")
        kappa = self.kappa
        if not dn.is_dual(kappa):
            kappa = np.broadcast_to(np.asarray(kappa, dtype=float), nu.shape).copy()
        if kappa.shape != nu.shape:
            raise ValueError("kappa and nu must have the same length")
        kappa = dn.maximum(kappa, KAPPA_MIN)
        for a in (self.scatter_iso_max, self.scatter_ray_max):
            if not 0 <= a < 1:
                raise ValueError("scattering maxima must lie in [0, 1)")
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "kappa", kappa)

    @property
    def jmax(self) -> int:
        return len(self.nu)

    @property
    def dnu(self) -> np.ndarray:
        """Quadrature weights: node j >= 1 carries nu[j] - nu[j-1], node 0 none."""
        w = np.zeros_like(self.nu)
        w[1:] = np.diff(self.nu)
        return w

    @property
    def nu_mid(self) -> np.ndarray:
        """Cell midpoints (nu[j] + nu[j-1]) / 2; node 0 keeps nu[0]."""
        m = self.nu.copy()
        m[1:] = 0.5 * (self.nu[1:] + self.nu[:-1])
        return m

    def with_kappa(self, kappa) -> "SpectralGrid":
        return replace(self, kappa=kappa)

    def integrate(self, values, axis: int = 0):
        return integrate_nu(self, values, axis=axis)


def build_wavelength_uniform(jmax: int = 400, nu_min: float = 0.05, nu_max: float = 15.0, kappa=0.5) -> SpectralGrid:
    """Grid uniform in wavelength between ``nu_min`` and ``nu_max``.

    nu[j] = nu_max / (1 + (jmax - j)(nu_max - nu_min) / (nu_min jmax)), j < jmax.
    """
    if jmax < 2:
        raise ValueError("jmax must be at least 2")
    if not 0 < nu_min < nu_max:
        raise ValueError("need 0 < nu_min < nu_max")
    j = np.arange(jmax)
    nu = nu_max / (1 + (jmax - j) * (nu_max - nu_min) / nu_min / jmax)
    return SpectralGrid(nu=nu, kappa=kappa)


def kappa_grey(nu, level=0.5):
    """Frequency independent absorption."""
    nu = np.asarray(nu, dtype=float)
    return level + 0.0 * nu if dn.is_dual(level) else np.full_like(nu, level)


def kappa_banded(nu, base=0.5, step=0.5, nu_lo=0.0, nu_hi=np.inf):
    """``base + step`` on the open band (nu_lo, nu_hi), ``base`` elsewhere, floored at KAPPA_MIN.

    ``step`` may be a dual number.
    """
    nu = np.asarray(nu, dtype=float)
    band = ((nu > nu_lo) & (nu < nu_hi)).astype(float)
    return dn.maximum(base + step * band, KAPPA_MIN)


def read_kappa_file(path, column: int = 0):
    """Read a five-column absorption file; return (nu, kappa).

    Each line holds ``nu kappa0 kappa1 kappa2 unused``; ``column`` picks one of
    the three absorption columns.
    """
    if column not in (0, 1, 2):
        raise ValueError("column must be 0, 1 or 2")
    nus, kappas = [], []
    with open(Path(path)) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) < 5:
                raise ValueError(f"{path}:{lineno}: expected 5 columns, got {len(fields)}")
            try:
                row = [float(f) for f in fields[:5]]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            nus.append(row[0])
            kappas.append(row[1 + column])
            if len(nus) > JMAX_MAX:
                raise ValueError(f"{path}: more than {JMAX_MAX} frequency lines")
    if not nus:
        raise ValueError(f"{path}: no data")
    return np.array(nus), np.maximum(np.array(kappas), KAPPA_MIN)


def kappa_from_file(path, column: int = 0) -> SpectralGrid:
    nu, kappa = read_kappa_file(path, column)
    return SpectralGrid(nu=nu, kappa=kappa)


def rectangle_rule(nu, values, axis: int = 0):
    """sum_{j>=1} values[j] (nu[j] - nu[j-1]) along ``axis`` for any node array."""
    nu = np.asarray(nu, dtype=float)
    w = np.concatenate([[0.0], np.diff(nu)])
    shape = [1] * dn.asarray(values).ndim
    shape[axis] = -1
    return (values * w.reshape(shape)).sum(axis=axis)


def integrate_nu(grid: SpectralGrid, values, axis: int = 0):
    """Left-open rectangle rule sum_{j>=1} values[j] (nu[j] - nu[j-1]) along ``axis``."""
    w = grid.dnu
    shape = [1] * dn.asarray(values).ndim
    shape[axis] = -1
    return (values * w.reshape(shape)).sum(axis=axis)
