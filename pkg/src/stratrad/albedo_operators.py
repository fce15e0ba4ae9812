"""Ground reflection operators acting on angular node values.

An operator maps the outgoing intensity f(mu) = I(0, -mu) on a fixed set of
Gauss nodes mu in (0, 1) to the incoming intensity I(0, mu) on the same nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .special_functions import planck

N_NODES = 64


@dataclass(frozen=True)
class AngularFunction:
    values: np.ndarray
    mu: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != np.shape(self.mu):
            raise ValueError("values and nodes differ in shape")
        if not np.all(np.isfinite(v)):
            raise ValueError("angular values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def nodes(cls, n: int = N_NODES):
        x, w = np.polynomial.legendre.leggauss(n)
        return 0.5 * (x + 1), 0.5 * w

    @classmethod
    def from_values(cls, values, n: int | None = None) -> "AngularFunction":
        values = np.asarray(values, dtype=float)
        mu, w = cls.nodes(len(values) if n is None else n)
        return cls(values, mu, w)

    @classmethod
    def from_callable(cls, f: Callable, n: int = N_NODES) -> "AngularFunction":
        mu, w = cls.nodes(n)
        return cls(np.broadcast_to(np.asarray(f(mu), dtype=float), mu.shape).copy(), mu, w)

    def moment(self, p: float = 1.0) -> float:
        """int_0^1 mu^p f(mu) dmu."""
        return float(np.sum(self.w * self.mu**p * self.values))

    def like(self, values) -> "AngularFunction":
        return AngularFunction(values, self.mu, self.w)


@dataclass(frozen=True)
class AlbedoOperator:
    name: str
    apply_values: Callable = field(repr=False)
    frequency_dependent: bool = False

    def __call__(self, f: AngularFunction) -> AngularFunction:
        return f.like(self.apply_values(f))


def identity() -> AlbedoOperator:
    return AlbedoOperator("identity", lambda f: f.values.copy())


def specular_diffuse(alpha: float, p: float = 1.0) -> AlbedoOperator:
    """alpha f(mu) + (1 - alpha) int_0^1 mu'^p f(mu') dmu'."""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    if p <= 0:
        raise ValueError("p must be positive")
    return AlbedoOperator(
        f"specular_diffuse({alpha}, {p})",
        lambda f: alpha * f.values + (1 - alpha) * f.moment(p),
    )


def thermal_accommodation(alpha: float, T_e: float, nu: float) -> AlbedoOperator:
    """alpha f(mu) + (1 - alpha) b(nu, T_e)."""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    emitted = float(planck(nu, T_e))
    return AlbedoOperator(
        f"thermal_accommodation({alpha}, {T_e}, {nu})",
        lambda f: alpha * f.values + (1 - alpha) * emitted,
        frequency_dependent=True,
    )


def amplifying(gain: float = 1.5) -> AlbedoOperator:
    """gain * f; accretive for gain > 1."""
    return AlbedoOperator(f"amplifying({gain})", lambda f: gain * f.values)


def accretivity_defect(op: AlbedoOperator, f1: AngularFunction, f2: AngularFunction) -> float:
    """D = sum_q w_q mu_q [(f2 - f1)_+ - (A f2 - A f1)_+]."""
    d_in = np.maximum(f2.values - f1.values, 0.0)
    d_out = np.maximum(op(f2).values - op(f1).values, 0.0)
    return float(np.sum(f1.w * f1.mu * (d_in - d_out)))


@dataclass
class AccretivityReport:
    trials: int
    min_defect: float
    violations: int
    worst_pair: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0


def check_non_accretive(
    op: AlbedoOperator,
    trials: int = 10_000,
    n: int = N_NODES,
    seed: int = 0,
    tol: float = 1e-12,
) -> AccretivityReport:
    """Sample nonnegative pairs and report the smallest defect D.

    Half the samples are smooth (random low-order polynomials in mu), half
    are rough (independent uniform values per node), so both slowly varying
    and spiky intensities are covered.
    """
    rng = np.random.default_rng(seed)
    mu, w = AngularFunction.nodes(n)
    worst, worst_pair, bad = np.inf, None, 0
    for k in range(trials):
        if k % 2:
            a = rng.uniform(0, 1, size=(2, n))
        else:
            c = rng.normal(size=(2, 4))
            a = np.abs(np.polynomial.polynomial.polyval(mu, c.T))
        a *= rng.uniform(0, 2, size=(2, 1))
        f1, f2 = AngularFunction(a[0], mu, w), AngularFunction(a[1], mu, w)
        d = accretivity_defect(op, f1, f2)
        if d < -tol:
            bad += 1
        if d < worst:
            worst, worst_pair = d, (a[0].copy(), a[1].copy())
    return AccretivityReport(trials=trials, min_defect=float(worst), violations=bad, worst_pair=worst_pair)


def is_monotone(op: AlbedoOperator, trials: int = 1000, n: int = N_NODES, seed: int = 1) -> bool:
    """f1 <= f2 pointwise implies A f1 <= A f2 pointwise, on random samples."""
    rng = np.random.default_rng(seed)
    mu, w = AngularFunction.nodes(n)
    for _ in range(trials):
        f1 = rng.uniform(0, 1, n)
        f2 = f1 + rng.uniform(0, 1, n) * (rng.uniform(size=n) < 0.5)
        a1 = op(AngularFunction(f1, mu, w)).values
        a2 = op(AngularFunction(f2, mu, w)).values
        if np.any(a1 > a2 + 1e-14):
            return False
    return True
