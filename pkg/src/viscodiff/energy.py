"""Coarse-grain free energies psi with first and second derivatives.

All evaluators accept scalars or numpy arrays. Logarithms are natural.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, InvalidArgument


@dataclass(frozen=True)
class GrowthConstants:
    """Constants of the growth bounds

        -M1 + M2 |r|^p <= psi(r) <= M3 + M4 |r|^p,   |psi'(r)| <= M5 (1 + |r|^(p-1)).
    """

    p: float
    M1: float
    M2: float
    M3: float
    M4: float
    M5: float


class FreeEnergyModel:
    """Base class. Subclasses are frozen dataclasses with ``psi``, ``dpsi``, ``ddpsi``."""

    kind: str = ""
    # declared growth exponent; None for the singular model
    growth_exponent: Optional[float] = None

    @property
    def curvature_bound(self) -> Optional[float]:
        """M0 with psi'' >= -M0 everywhere, or None if psi'' is unbounded below."""
        return None


@dataclass(frozen=True)
class DoubleWell(FreeEnergyModel):
    kappa: float = 1.0
    kind: str = field(default="double_well", init=False, repr=False)
    growth_exponent: float = field(default=4.0, init=False, repr=False)

    def __post_init__(self):
        if not self.kappa > 0:
            raise InvalidArgument("kappa must be positive")

    def psi(self, r):
        r = np.asarray(r, dtype=float)
        return self.kappa * r**2 * (r - 1.0) ** 2

    def dpsi(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * self.kappa * r * (r - 1.0) * (2.0 * r - 1.0)

    def ddpsi(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * self.kappa * (6.0 * r**2 - 6.0 * r + 1.0)

    @property
    def curvature_bound(self):
        return self.kappa


@dataclass(frozen=True)
class Quadratic(FreeEnergyModel):
    stiffness: float = 1.0
    kind: str = field(default="quadratic", init=False, repr=False)
    growth_exponent: float = field(default=2.0, init=False, repr=False)

    def __post_init__(self):
        if not self.stiffness > 0:
            raise InvalidArgument("stiffness K must be positive")

    def psi(self, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * self.stiffness * r**2

    def dpsi(self, r):
        return self.stiffness * np.asarray(r, dtype=float)

    def ddpsi(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.stiffness)

    @property
    def curvature_bound(self):
        return 0.0


def _entropy(k, r):
    return k * r * np.log(r)


def _entropy_prime(k, r):
    return k * (np.log(r) + 1.0)


def _validate_mixing(k, chi):
    if not k > 0:
        raise InvalidArgument("k must be positive")
    if not chi >= 0:
        raise InvalidArgument("chi must be nonnegative")


@dataclass(frozen=True)
class RegularSolution(FreeEnergyModel):
    """k r log r + k (1-r) log(1-r) + chi r (1-r) on (0, 1), +inf elsewhere."""

    k: float = 1.0
    chi: float = 0.0
    kind: str = field(default="regular_solution", init=False, repr=False)

    def __post_init__(self):
        _validate_mixing(self.k, self.chi)

    def psi(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r > 0.0) & (r < 1.0)
        rs = np.where(inside, r, 0.5)
        val = _entropy(self.k, rs) + _entropy(self.k, 1.0 - rs) + self.chi * rs * (1.0 - rs)
        return np.where(inside, val, np.inf)

    def _require_inside(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0.0) or np.any(r >= 1.0) or np.any(np.isnan(r)):
            raise DomainError("regular-solution derivative is undefined outside (0, 1)")
        return r

    def dpsi(self, r):
        r = self._require_inside(r)
        return _entropy_prime(self.k, r) - _entropy_prime(self.k, 1.0 - r) + self.chi * (1.0 - 2.0 * r)

    def ddpsi(self, r):
        r = self._require_inside(r)
        return self.k / r + self.k / (1.0 - r) - 2.0 * self.chi


def psi_e_eps(k: float, eps: float, r):
    """Entropy k r log r continued below ``eps`` by a quadratic, C1 at the seam."""
    if not 0.0 < eps < 1.0:
        raise InvalidArgument("eps must lie in (0, 1)")
    r = np.asarray(r, dtype=float)
    upper = _entropy(k, np.maximum(r, eps))
    lower = k * r * np.log(eps) + 0.5 * k * (r**2 / eps - eps)
    return np.where(r >= eps, upper, lower)


def dpsi_e_eps(k: float, eps: float, r):
    r = np.asarray(r, dtype=float)
    return np.where(r >= eps, _entropy_prime(k, np.maximum(r, eps)), k * np.log(eps) + k * r / eps)


def ddpsi_e_eps(k: float, eps: float, r):
    r = np.asarray(r, dtype=float)
    return np.where(r >= eps, k / np.maximum(r, eps), k / eps)


def regularized_psi(k: float, chi: float, eps: float, r):
    if not 0.0 < eps < 0.5:
        raise InvalidArgument("eps must lie in (0, 1/2)")
    r = np.asarray(r, dtype=float)
    return psi_e_eps(k, eps, r) + psi_e_eps(k, eps, 1.0 - r) + chi * r * (1.0 - r)


@dataclass(frozen=True)
class RegularizedLog(FreeEnergyModel):
    """Regular-solution energy with both entropy terms regularized below ``eps``.

    Smooth on the whole line, quadratic at infinity, and psi'' >= -2 chi.
    """

    k: float = 1.0
    chi: float = 0.0
    eps: float = 1e-2
    kind: str = field(default="regularized_log", init=False, repr=False)
    growth_exponent: float = field(default=2.0, init=False, repr=False)

    def __post_init__(self):
        _validate_mixing(self.k, self.chi)
        if not 0.0 < self.eps < 0.5:
            raise InvalidArgument("eps must lie in (0, 1/2)")

    def psi(self, r):
        return regularized_psi(self.k, self.chi, self.eps, r)

    def dpsi(self, r):
        r = np.asarray(r, dtype=float)
        return (
            dpsi_e_eps(self.k, self.eps, r)
            - dpsi_e_eps(self.k, self.eps, 1.0 - r)
            + self.chi * (1.0 - 2.0 * r)
        )

    def ddpsi(self, r):
        r = np.asarray(r, dtype=float)
        return ddpsi_e_eps(self.k, self.eps, r) + ddpsi_e_eps(self.k, self.eps, 1.0 - r) - 2.0 * self.chi

    @property
    def curvature_bound(self):
        return 2.0 * self.chi


def psi(model: FreeEnergyModel, r):
    return model.psi(r)


def dpsi(model: FreeEnergyModel, r):
    return model.dpsi(r)


def ddpsi(model: FreeEnergyModel, r):
    return model.ddpsi(r)


def make_model(kind: str, **params) -> FreeEnergyModel:
    classes = {
        "double_well": DoubleWell,
        "quadratic": Quadratic,
        "regular_solution": RegularSolution,
        "regularized_log": RegularizedLog,
    }
    try:
        cls = classes[kind]
    except KeyError:
        raise InvalidArgument(f"unknown free-energy model {kind!r}") from None
    return cls(**params)


def fit_growth_constants(model: FreeEnergyModel, samples, p: Optional[float] = None) -> GrowthConstants:
    """Growth constants by maximization over ``samples``.

    M2 and M4 bracket psi/|r|^p on the outer half of the sample range, M1, M3
    and M5 are then the smallest values that make the bounds hold on the
    samples (plus a relative margin). Diagnostic only; nothing is proved.
    """
    if p is None:
        p = model.growth_exponent
    if p is None:
        raise InvalidArgument(f"{model.kind} has no polynomial growth exponent")
    r = np.asarray(samples, dtype=float)
    vals = model.psi(r)
    ar = np.abs(r)
    outer = ar >= 0.5 * ar.max()
    ratio = vals[outer] / ar[outer] ** p
    M2 = 0.5 * max(ratio.min(), 0.0)
    M4 = 1.5 * ratio.max()
    margin = 1e-9
    M1 = max(np.max(M2 * ar**p - vals), 0.0) * (1 + margin) + margin
    M3 = max(np.max(vals - M4 * ar**p), 0.0) * (1 + margin) + margin
    M5 = np.max(np.abs(model.dpsi(r)) / (1.0 + ar ** (p - 1))) * (1 + margin) + margin
    return GrowthConstants(p, M1, max(M2, margin), M3, M4, M5)


@dataclass
class GrowthReport:
    constants: GrowthConstants
    lower_violations: list = field(default_factory=list)
    upper_violations: list = field(default_factory=list)
    derivative_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.lower_violations or self.upper_violations or self.derivative_violations)


def check_growth(model: FreeEnergyModel, samples, constants: Optional[GrowthConstants] = None) -> GrowthReport:
    """Check both growth inequalities at every sample; list the violating r values.

    Without ``constants`` they are fitted on the samples themselves.
    """
    r = np.sort(np.asarray(samples, dtype=float))
    if constants is None:
        constants = fit_growth_constants(model, r)
    c = constants
    vals = model.psi(r)
    ar = np.abs(r)
    tol = 1e-12 * (1.0 + np.abs(vals))
    report = GrowthReport(c)
    report.lower_violations = r[vals < -c.M1 + c.M2 * ar**c.p - tol].tolist()
    report.upper_violations = r[vals > c.M3 + c.M4 * ar**c.p + tol].tolist()
    dv = np.abs(model.dpsi(r))
    report.derivative_violations = r[dv > c.M5 * (1.0 + ar ** (c.p - 1)) * (1 + 1e-12)].tolist()
    return report
