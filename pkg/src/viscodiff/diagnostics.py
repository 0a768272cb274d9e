"""Mass, free energy, dissipation and the energy-balance residual.

Along an exact semi-discrete solution,

    F(t) + int_0^t D ds - int_0^t P ds - F(0) = 0

with F the free energy, D = alpha sum lambda_k b_k^2 + beta sum a_k'^2 the
dissipation rate and P = h(0) mu(0) + h(L) mu(L) the boundary power. The
residual of this identity therefore measures only the time discretization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import basis
from .basis import IntervalDomain


@dataclass(frozen=True)
class DiagnosticsRecord:
    mass: float
    free_energy: float
    dissipation_rate: float
    boundary_power: float
    energy_residual: float
    relative_residual: float = 0.0
    gradient_norm: float = 0.0


CSV_FIELDS = ("mass", "free_energy", "dissipation_rate", "boundary_power", "energy_residual")


def total_mass(a, domain: IntervalDomain) -> float:
    return float(np.asarray(a, dtype=float)[0] * np.sqrt(domain.length))


def free_energy(a, model, quadrature, domain: IntervalDomain) -> float:
    a = np.asarray(a, dtype=float)
    basis.check_resolution(a.size, quadrature)
    u = basis.basis_matrix(quadrature.nodes, a.size, domain) @ a
    return quadrature.integrate(model.psi(u))


def dissipation_rate(adot, b, alpha, beta, domain: IntervalDomain) -> float:
    adot = np.asarray(adot, dtype=float)
    b = np.asarray(b, dtype=float)
    lam = IntervalDomain(domain.length, b.size).eigenvalues()
    return float(alpha * np.dot(lam, b * b) + beta * np.dot(adot, adot))


def boundary_power(t, flux, b, domain: IntervalDomain) -> float:
    b = np.asarray(b, dtype=float)
    left, right = flux(t)
    if left == 0.0 and right == 0.0:
        return 0.0
    ends = basis.basis_matrix([0.0, domain.length], b.size, domain) @ b
    return float(left * ends[0] + right * ends[1])


def gradient_norm(a, domain: IntervalDomain) -> float:
    """Squared L2 norm of the x-derivative of u_n, sum lambda_k a_k^2."""
    a = np.asarray(a, dtype=float)
    return float(np.dot(IntervalDomain(domain.length, a.size).eigenvalues(), a * a))


def cumulative_trapezoid(times, values):
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    out = np.zeros_like(values)
    if values.size > 1:
        out[1:] = np.cumsum(0.5 * np.diff(times) * (values[1:] + values[:-1]))
    return out


def energy_residual(times, free_energies, dissipation, power):
    """Residual of the energy identity at every sample, trapezoid rule in time."""
    F = np.asarray(free_energies, dtype=float)
    return F + cumulative_trapezoid(times, dissipation) - cumulative_trapezoid(times, power) - F[0]


class EnergyAccumulator:
    """Running trapezoid sums of dissipation and boundary power for one run."""

    def __init__(self, system):
        self.system = system
        self.F0 = None
        self.t = None
        self.D = 0.0
        self.P = 0.0
        self.dissipated = 0.0
        self.supplied = 0.0

    def advance(self, t, adot, b):
        s = self.system
        D = s.alpha * np.dot(s.lam, b * b) + s.beta * np.dot(adot, adot)
        left, right = s.flux(t)
        if left == 0.0 and right == 0.0:
            P = 0.0
        else:
            P = left * np.dot(s.ends[0], b) + right * np.dot(s.ends[1], b)
        if self.t is not None:
            h = t - self.t
            self.dissipated += 0.5 * h * (D + self.D)
            self.supplied += 0.5 * h * (P + self.P)
        self.t, self.D, self.P = t, float(D), float(P)

    def record(self, t, a, adot, b):
        from .galerkin import Sample

        self.advance(t, adot, b)
        s = self.system
        F = s.quadrature.integrate(s.model.psi(s.V @ a))
        if self.F0 is None:
            self.F0 = F
        res = F + self.dissipated - self.supplied - self.F0
        rec = DiagnosticsRecord(
            mass=total_mass(a, s.domain),
            free_energy=F,
            dissipation_rate=self.D,
            boundary_power=self.P,
            energy_residual=res,
            relative_residual=res / (abs(self.F0) + 1.0),
            gradient_norm=float(np.dot(s.lam, a * a)),
        )
        return Sample(t, a.copy(), b.copy(), rec)
