"""Neumann-Laplacian cosine basis on an interval, quadrature and projection.

The modes are L2-orthonormal on [0, L]:

    v_1(x) = 1/sqrt(L),   v_k(x) = sqrt(2/L) cos((k-1) pi x / L),  k >= 2,

with eigenvalues lambda_k = ((k-1) pi / L)**2 of -d2/dx2 under zero-flux ends.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgument, ResolutionError

# nodes per Gauss-Legendre panel never exceed this; more nodes means more panels
MAX_PANEL_NODES = 32
# node count needed to resolve one mode (products of modes oscillate twice as fast)
NODES_PER_MODE = 4
MIN_NODES = 32


@dataclass(frozen=True)
class IntervalDomain:
    length: float
    mode_count: int

    def __post_init__(self):
        if not (self.length > 0 and np.isfinite(self.length)):
            raise InvalidArgument(f"domain length must be positive, got {self.length}")
        if int(self.mode_count) != self.mode_count or self.mode_count < 1:
            raise InvalidArgument(f"mode count must be a positive integer, got {self.mode_count}")

    def eigenvalues(self) -> np.ndarray:
        k = np.arange(self.mode_count)
        return (k * np.pi / self.length) ** 2


@dataclass(frozen=True)
class Mode:
    """Descriptor of the k-th basis function ``amplitude * cos(wavenumber * x)``."""

    k: int
    amplitude: float
    wavenumber: float

    def __call__(self, x):
        return self.amplitude * np.cos(self.wavenumber * np.asarray(x, dtype=float))

    def derivative(self, x):
        return -self.amplitude * self.wavenumber * np.sin(self.wavenumber * np.asarray(x, dtype=float))


def _check_k(k):
    if int(k) != k or k < 1:
        raise InvalidArgument(f"mode index must be a positive integer, got {k}")


def _check_x(x, domain):
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(xa > domain.length) or not np.all(np.isfinite(xa)):
        raise InvalidArgument(f"x must lie in [0, {domain.length}]")
    return xa


def eigenpair(k: int, domain: IntervalDomain) -> tuple[float, Mode]:
    _check_k(k)
    L = domain.length
    wavenumber = (k - 1) * np.pi / L
    amplitude = 1.0 / np.sqrt(L) if k == 1 else np.sqrt(2.0 / L)
    return wavenumber**2, Mode(int(k), float(amplitude), float(wavenumber))


def evaluate_basis(k: int, x, domain: IntervalDomain):
    _check_k(k)
    xa = _check_x(x, domain)
    _, mode = eigenpair(k, domain)
    out = mode(xa)
    return float(out) if out.ndim == 0 else out


def basis_matrix(x, n: int, domain: IntervalDomain, derivative: bool = False) -> np.ndarray:
    """Values (or x-derivatives) of v_1..v_n at points ``x``, shape (len(x), n)."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.arange(n)
    wavenumber = k * np.pi / domain.length
    amplitude = np.full(n, np.sqrt(2.0 / domain.length))
    amplitude[0] = 1.0 / np.sqrt(domain.length)
    phase = np.outer(xa, wavenumber)
    if derivative:
        return -amplitude * wavenumber * np.sin(phase)
    return amplitude * np.cos(phase)


@dataclass(frozen=True)
class Quadrature:
    nodes: np.ndarray
    weights: np.ndarray
    degree: int = field(default=1)

    def __post_init__(self):
        for name in ("nodes", "weights"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def size(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def default_node_count(n: int) -> int:
    return max(NODES_PER_MODE * n, MIN_NODES)


def make_quadrature(M: int, domain: IntervalDomain) -> Quadrature:
    """Composite Gauss-Legendre rule with ``M`` nodes in total on [0, L].

    The interval is split into ceil(M / 32) equal panels whose node counts
    differ by at most one; the rule is exact for polynomials of degree
    2 * (smallest panel size) - 1.
    """
    if int(M) != M or M < 2:
        raise InvalidArgument(f"quadrature needs at least 2 nodes, got {M}")
    M = int(M)
    panels = -(-M // MAX_PANEL_NODES)
    sizes = [M // panels + (1 if i < M % panels else 0) for i in range(panels)]
    edges = np.linspace(0.0, domain.length, panels + 1)
    nodes, weights = [], []
    for (a, b), p in zip(zip(edges[:-1], edges[1:]), sizes):
        xi, wi = np.polynomial.legendre.leggauss(p)
        half = 0.5 * (b - a)
        nodes.append(a + half * (xi + 1.0))
        weights.append(half * wi)
    return Quadrature(np.concatenate(nodes), np.concatenate(weights), degree=2 * min(sizes) - 1)


def check_resolution(n: int, quadrature: Quadrature):
    if quadrature.size < NODES_PER_MODE * n:
        raise ResolutionError(
            f"{quadrature.size} quadrature nodes cannot resolve {n} modes "
            f"(need at least {NODES_PER_MODE * n})"
        )


def project(f: Callable, n: int, quadrature: Quadrature, domain: IntervalDomain) -> np.ndarray:
    """Coefficients a_i = integral of f * v_i, i = 1..n, by quadrature.

    ``f`` must accept an array of points.
    """
    check_resolution(n, quadrature)
    values = np.asarray(f(quadrature.nodes), dtype=float)
    values = np.broadcast_to(values, quadrature.nodes.shape)
    V = basis_matrix(quadrature.nodes, n, domain)
    return (quadrature.weights * values) @ V


def reconstruct(a, x, domain: IntervalDomain):
    a = np.asarray(a, dtype=float)
    xa = _check_x(x, domain)
    out = basis_matrix(xa, a.size, domain) @ a
    return float(out[0]) if xa.ndim == 0 else out
