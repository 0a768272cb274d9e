"""Spectral Galerkin solver for viscously regularized diffusion, and threshold (play) hysteresis."""
from .basis import IntervalDomain, eigenpair, evaluate_basis, make_quadrature, project, reconstruct
from .config import HysteresisConfig, SimulationConfig, parse_config, serialize_config
from .energy import DoubleWell, Quadratic, RegularizedLog, RegularSolution
from .galerkin import FluxData, GalerkinSystem, Trajectory, integrate, run

__version__ = "0.1.0"
