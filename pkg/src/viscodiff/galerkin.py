"""Galerkin reduction of the viscous diffusion problem to a coefficient ODE.

With u_n = sum a_i v_i and mu_n = sum b_i v_i, testing the weak problem with
the Neumann eigenbasis gives, for i = 1..n,

    a_i' + alpha lambda_i b_i = H_i(t),        b_i = beta a_i' + G_i(a),

which is solved for a_i':

    a_i' = (H_i(t) - alpha lambda_i G_i(a)) / (1 + alpha beta lambda_i).

G_i(a) is the integral of psi'(u_n) v_i (by quadrature) and H_i(t) the
boundary integral of h v_i, a two-point sum on an interval.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import basis
from .basis import IntervalDomain, Quadrature
from .energy import FreeEnergyModel, RegularSolution
from .errors import InvalidArgument, SingularStateError, SolverError

log = logging.getLogger(__name__)

# coefficient vectors a_1..a_n / b_1..b_n
SpectralCoeffs = np.ndarray

SINGULAR_MARGIN = 1e-6
STABILITY_LIMIT = 2.0


def singular_guard(u):
    """Reject states of the singular energy that come within SINGULAR_MARGIN of 0 or 1."""
    if np.any(u < SINGULAR_MARGIN) or np.any(u > 1.0 - SINGULAR_MARGIN) or np.any(np.isnan(u)):
        raise SingularStateError(
            f"concentration left [{SINGULAR_MARGIN:g}, 1 - {SINGULAR_MARGIN:g}] at a quadrature "
            "node or endpoint; the singular energy has no usable energy estimate there. "
            "Use model = regularized_log instead."
        )


def _zero(t):
    return 0.0


@dataclass(frozen=True)
class FluxData:
    """Outward-normal flux of mu at x = 0 and x = L as functions of time."""

    left: Callable[[float], float] = _zero
    right: Callable[[float], float] = _zero

    def __call__(self, t):
        return float(self.left(t)), float(self.right(t))


ZERO_FLUX = FluxData()


@dataclass
class SolverState:
    t: float
    a: SpectralCoeffs
    b: Optional[SpectralCoeffs] = None


class GalerkinSystem:
    """Precomputed basis tables for one (domain, quadrature, model, alpha, beta, flux).

    ``beta = 0`` is allowed here (the unregularized system) so that the effect
    of viscosity can be measured; user-facing configs require beta > 0.
    """

    def __init__(self, domain: IntervalDomain, model: FreeEnergyModel, alpha: float, beta: float,
                 flux: FluxData = ZERO_FLUX, quadrature: Optional[Quadrature] = None):
        if not alpha > 0:
            raise InvalidArgument("alpha must be positive")
        if not beta >= 0:
            raise InvalidArgument("beta must be nonnegative")
        n = domain.mode_count
        if quadrature is None:
            quadrature = basis.make_quadrature(basis.default_node_count(n), domain)
        basis.check_resolution(n, quadrature)
        self.domain = domain
        self.model = model
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.flux = flux
        self.quadrature = quadrature
        self.n = n
        self.lam = domain.eigenvalues()
        self.V = basis.basis_matrix(quadrature.nodes, n, domain)
        self.WV = (quadrature.weights[:, None] * self.V).T.copy()
        self.ends = basis.basis_matrix([0.0, domain.length], n, domain)
        self.damping = 1.0 + self.alpha * self.beta * self.lam
        self.singular = isinstance(model, RegularSolution)
        self.zero_flux = flux is ZERO_FLUX or (
            getattr(flux.left, "is_zero", False) and getattr(flux.right, "is_zero", False))
        self.zero_H = np.zeros(n)

    def nodal(self, a):
        return self.V @ a

    def guard(self, a, u):
        # the endpoints are checked too: a datum touching 0 at x = 0 or L is never seen by the nodes
        if self.singular:
            singular_guard(np.concatenate([u, self.ends @ a]))

    def G(self, a):
        u = self.V @ a
        self.guard(a, u)
        return self.WV @ self.model.dpsi(u)

    def G_jacobian(self, a):
        u = self.V @ a
        self.guard(a, u)
        return (self.WV * self.model.ddpsi(u)) @ self.V

    def H(self, t):
        if self.zero_flux:
            return self.zero_H
        left, right = self.flux(t)
        return left * self.ends[0] + right * self.ends[1]

    def rhs(self, t, a):
        return (self.H(t) - self.alpha * self.lam * self.G(a)) / self.damping

    def chemical_potential(self, a, adot):
        return self.beta * adot + self.G(a)

    def rate_and_potential(self, t, a):
        """(a', b) at (t, a) from a single evaluation of G."""
        g = self.G(a)
        adot = (self.H(t) - self.alpha * self.lam * g) / self.damping
        return adot, self.beta * adot + g

    def effective_stiffness(self, a, h=1e-6):
        """Finite-difference estimate of max psi'' over the quadrature nodes."""
        u = self.V @ a
        d2 = (self.model.dpsi(u + h) - self.model.dpsi(u - h)) / (2 * h)
        return float(np.max(d2))

    def stability_number(self, a, dt):
        k_eff = max(self.effective_stiffness(a), 0.0)
        return self.alpha * self.lam[-1] * k_eff * dt / self.damping[-1]


def assemble_G(a, model, quadrature, domain):
    a = np.asarray(a, dtype=float)
    domain = replace(domain, mode_count=a.size)
    basis.check_resolution(a.size, quadrature)
    V = basis.basis_matrix(quadrature.nodes, a.size, domain)
    u = V @ a
    if isinstance(model, RegularSolution):
        singular_guard(u)
    return (quadrature.weights * model.dpsi(u)) @ V


def assemble_H(t, flux: FluxData, domain: IntervalDomain):
    left, right = flux(t)
    ends = basis.basis_matrix([0.0, domain.length], domain.mode_count, domain)
    return left * ends[0] + right * ends[1]


def rhs(t, a, system: GalerkinSystem):
    return system.rhs(t, np.asarray(a, dtype=float))


def chemical_potential(a, adot, system: GalerkinSystem):
    return system.chemical_potential(np.asarray(a, dtype=float), np.asarray(adot, dtype=float))


def _rk4(system, t, a, dt, k1=None):
    f = system.rhs
    if k1 is None:
        k1 = f(t, a)
    k2 = f(t + 0.5 * dt, a + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, a + 0.5 * dt * k2)
    k4 = f(t + dt, a + dt * k3)
    return a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _implicit_euler(system, t, a, dt, newton_tol=1e-12, max_iter=50):
    """Newton solve of a+ - a - dt * rhs(t + dt, a+) = 0, started from a."""
    t1 = t + dt
    H = system.H(t1)
    scale = system.alpha * system.lam / system.damping
    x = a.copy()
    res = np.inf
    for _ in range(max_iter):
        F = x - a - dt * (H - system.alpha * system.lam * system.G(x)) / system.damping
        res = float(np.max(np.abs(F)))
        if res <= newton_tol * (1.0 + float(np.max(np.abs(x)))):
            return x
        J = np.eye(system.n) + dt * scale[:, None] * system.G_jacobian(x)
        x = x - np.linalg.solve(J, F)
        if not np.all(np.isfinite(x)):
            break
    raise SolverError(f"Newton iteration did not converge (residual {res:.3e})",
                      last_state=SolverState(t, a), residual=res)


SCHEMES = ("rk4", "implicit_euler")


def step(state: SolverState, dt: float, system: GalerkinSystem, scheme: str = "rk4",
         newton_tol: float = 1e-12) -> SolverState:
    """Advance one step; the returned state carries b at the new time."""
    if not dt > 0:
        raise InvalidArgument("dt must be positive")
    a = np.asarray(state.a, dtype=float)
    if scheme == "rk4":
        a_next = _rk4(system, state.t, a, dt)
    elif scheme == "implicit_euler":
        a_next = _implicit_euler(system, state.t, a, dt, newton_tol)
    else:
        raise InvalidArgument(f"unknown scheme {scheme!r}")
    if not np.all(np.isfinite(a_next)):
        raise SolverError(f"non-finite coefficients at t = {state.t + dt:g}", last_state=state)
    t_next = state.t + dt
    adot = system.rhs(t_next, a_next)
    return SolverState(t_next, a_next, system.chemical_potential(a_next, adot))


@dataclass
class Sample:
    t: float
    a: np.ndarray
    b: np.ndarray
    diagnostics: "object"


@dataclass
class Trajectory:
    samples: list = field(default_factory=list)
    failed: bool = False
    message: str = ""
    stability_warning: bool = False

    @property
    def times(self):
        return np.array([s.t for s in self.samples])

    @property
    def a(self):
        return np.array([s.a for s in self.samples])

    @property
    def b(self):
        return np.array([s.b for s in self.samples])

    def column(self, name):
        return np.array([getattr(s.diagnostics, name) for s in self.samples])

    @property
    def final(self) -> Sample:
        return self.samples[-1]


def integrate(system: GalerkinSystem, a0, T: float, dt: float, scheme: str = "rk4",
              output_every: int = 1, newton_tol: float = 1e-12) -> Trajectory:
    """Integrate from a0 at t = 0 to T with fixed steps and record diagnostics.

    Energy-balance integrals are accumulated by the trapezoid rule over every
    solver step, not only over output samples. A failure returns the partial
    trajectory with ``failed`` set.
    """
    from . import diagnostics as dg

    if not (dt > 0 and T > 0):
        raise InvalidArgument("dt and T must be positive")
    if dt > T * (1 + 1e-12):
        raise InvalidArgument("dt must not exceed T")
    nsteps = max(1, int(round(T / dt)))
    if abs(nsteps * dt - T) > 1e-9 * T:
        nsteps = int(np.ceil(T / dt - 1e-9))
    dt = T / nsteps
    output_every = max(1, int(output_every))

    traj = Trajectory()
    acc = dg.EnergyAccumulator(system)
    a = np.array(a0, dtype=float)
    t = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            adot, b = system.rate_and_potential(t, a)
            traj.samples.append(acc.record(t, a, adot, b))
            if system.stability_number(a, dt) > STABILITY_LIMIT:
                traj.stability_warning = True
            for k in range(1, nsteps + 1):
                if scheme == "rk4":
                    a_next = _rk4(system, t, a, dt, k1=adot)
                elif scheme == "implicit_euler":
                    a_next = _implicit_euler(system, t, a, dt, newton_tol)
                else:
                    raise InvalidArgument(f"unknown scheme {scheme!r}")
                t_next = k * dt
                if not np.all(np.isfinite(a_next)):
                    raise SolverError(f"non-finite coefficients at t = {t_next:g}",
                                      last_state=SolverState(t, a, b))
                adot_next, b_next = system.rate_and_potential(t_next, a_next)
                if not (np.all(np.isfinite(adot_next)) and np.all(np.isfinite(b_next))):
                    raise SolverError(f"non-finite rate at t = {t_next:g}",
                                      last_state=SolverState(t, a, b))
                a, adot, b, t = a_next, adot_next, b_next, t_next
                if k % output_every == 0 or k == nsteps:
                    traj.samples.append(acc.record(t, a, adot, b))
                    if not traj.stability_warning and system.stability_number(a, dt) > STABILITY_LIMIT:
                        traj.stability_warning = True
                else:
                    acc.advance(t, adot, b)
        except SolverError as exc:
            traj.failed = True
            traj.message = str(exc)
        except FloatingPointError as exc:
            traj.failed = True
            traj.message = f"floating-point failure: {exc}"
    if traj.stability_warning:
        log.warning("explicit stability number alpha*lambda_n*K_eff*dt/(1+alpha*beta*lambda_n) "
                    "exceeds %g; consider a smaller dt or scheme = implicit_euler", STABILITY_LIMIT)
    return traj


def run(config) -> Trajectory:
    """Run a SimulationConfig: project the initial datum, then integrate."""
    domain = IntervalDomain(config.length, config.modes)
    quad = basis.make_quadrature(config.quadrature_nodes, domain)
    system = GalerkinSystem(domain, config.build_model(), config.alpha, config.beta,
                            config.build_flux(), quad)
    a0 = basis.project(config.initial.function(config.length), config.modes, quad, domain)
    return integrate(system, a0, config.final_time, config.dt, config.scheme,
                     config.output_every, config.newton_tol)
