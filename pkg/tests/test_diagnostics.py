import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viscodiff import basis, diagnostics, galerkin
from viscodiff.basis import IntervalDomain, make_quadrature
from viscodiff.diagnostics import (boundary_power, cumulative_trapezoid, dissipation_rate, energy_residual,
                                   free_energy, total_mass)
from viscodiff.energy import DoubleWell, Quadratic, RegularizedLog
from viscodiff.galerkin import FluxData, GalerkinSystem


def make_system(n, model, beta=0.1, flux=galerkin.ZERO_FLUX, L=1.0):
    d = IntervalDomain(L, n)
    return GalerkinSystem(d, model, 1.0, beta, flux, make_quadrature(basis.default_node_count(n), d))


def test_total_mass_examples():
    assert total_mass([2.0, 5.0, -1.0], IntervalDomain(4.0, 3)) == pytest.approx(4.0)
    assert total_mass([0.0, 1.0], IntervalDomain(1.0, 2)) == 0.0
    # constant c on [0, L] has a_1 = c sqrt(L) and mass c L
    L, c = 2.5, 0.3
    assert total_mass([c * math.sqrt(L)], IntervalDomain(L, 1)) == pytest.approx(c * L)


@settings(max_examples=30, deadline=None)
@given(coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=16), K=st.floats(0.1, 5.0))
def test_quadratic_free_energy_is_parseval(coeffs, K):
    a = np.array(coeffs)
    d = IntervalDomain(1.7, a.size)
    q = make_quadrature(basis.default_node_count(a.size), d)
    expected = 0.5 * K * np.dot(a, a)
    assert free_energy(a, Quadratic(K), q, d) == pytest.approx(expected, rel=1e-12, abs=1e-13)


def test_free_energy_double_well_constant():
    d = IntervalDomain(2.0, 4)
    q = make_quadrature(32, d)
    c = 0.25
    a = np.array([c * math.sqrt(2.0), 0, 0, 0])
    assert free_energy(a, DoubleWell(1.0), q, d) == pytest.approx(2.0 * c**2 * (c - 1) ** 2, rel=1e-13)


def test_dissipation_rate_example():
    d = IntervalDomain(1.0, 2)
    D = dissipation_rate([1.0, 2.0], [1.0, 1.0], 2.0, 0.5, d)
    assert D == pytest.approx(2 * math.pi**2 + 0.5 * 5)
    assert dissipation_rate([0, 0], [0, 0], 1.0, 1.0, d) == 0.0


def test_boundary_power_examples():
    d = IntervalDomain(4.0, 3)
    b = np.array([1.5, 0.0, 0.0])
    c = 0.2
    flux = FluxData(lambda t: c, lambda t: c)
    assert boundary_power(0.0, flux, b, d) == pytest.approx(2 * c * 1.5 / 2.0)
    assert boundary_power(0.0, FluxData(), b, d) == 0.0
    # the second mode is +sqrt(2/L) at 0 and -sqrt(2/L) at L
    b = np.array([0.0, 1.0, 0.0])
    assert boundary_power(0.0, flux, b, d) == pytest.approx(0.0, abs=1e-15)
    one_sided = FluxData(lambda t: c, lambda t: 0.0)
    assert boundary_power(0.0, one_sided, b, d) == pytest.approx(c * math.sqrt(0.5))


def test_cumulative_trapezoid_examples():
    assert np.allclose(cumulative_trapezoid([0, 1, 2], [1, 1, 1]), [0, 1, 2])
    assert np.allclose(cumulative_trapezoid([0, 1, 3], [0, 2, 2]), [0, 1, 5])
    assert np.array_equal(cumulative_trapezoid([0.0], [3.0]), [0.0])


def test_energy_residual_of_exact_balance():
    # F = e^{-t}, D = e^{-t}, P = 0 satisfies the identity; only quadrature error remains
    errs = []
    for m in (100, 200):
        t = np.linspace(0, 1, m + 1)
        res = energy_residual(t, np.exp(-t), np.exp(-t), np.zeros_like(t))
        assert res[0] == 0.0
        errs.append(np.max(np.abs(res)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.01)


def _double_well_run(dt, T=0.5):
    s = make_system(16, DoubleWell(1.0))
    a0 = basis.project(lambda x: 0.5 + 0.1 * np.cos(np.pi * x) + 0.05 * np.cos(2 * np.pi * x), 16,
                       s.quadrature, s.domain)
    return galerkin.integrate(s, a0, T, dt, output_every=10)


def test_energy_residual_second_order_in_dt():
    r1 = np.max(np.abs(_double_well_run(1e-3).column("energy_residual")))
    r2 = np.max(np.abs(_double_well_run(5e-4).column("energy_residual")))
    assert r1 < 1e-6
    assert r1 / r2 == pytest.approx(4.0, rel=0.1)


def test_free_energy_non_increasing_without_flux():
    traj = _double_well_run(1e-3)
    F = traj.column("free_energy")
    assert np.all(np.diff(F) <= 1e-14)
    assert F[-1] < F[0]
    assert np.allclose(traj.column("mass"), traj.column("mass")[0], rtol=0, atol=1e-14)


def test_constant_flux_mass_slope():
    c, L = 0.15, 2.0
    s = make_system(8, RegularizedLog(1.0, 2.0, 0.05), flux=FluxData(lambda t: c, lambda t: c), L=L)
    a0 = basis.project(lambda x: 0.4 + 0.1 * np.cos(np.pi * x / L), 8, s.quadrature, s.domain)
    traj = galerkin.integrate(s, a0, 0.5, 1e-3, output_every=25)
    mass = traj.column("mass")
    slope = np.diff(mass) / np.diff(traj.times)
    assert np.allclose(slope, 2 * c, rtol=1e-10)


def test_flux_run_energy_balance_includes_boundary_power():
    c = 0.1
    s = make_system(8, DoubleWell(1.0), flux=FluxData(lambda t: c, lambda t: -0.5 * c))
    a0 = basis.project(lambda x: 0.5 + 0.1 * np.cos(np.pi * x), 8, s.quadrature, s.domain)
    traj = galerkin.integrate(s, a0, 0.3, 1e-3, output_every=10)
    assert np.any(traj.column("boundary_power") != 0.0)
    assert np.max(np.abs(traj.column("energy_residual"))) < 1e-7


def test_accumulator_matches_offline_residual_when_every_step_recorded():
    traj = galerkin.integrate(make_system(6, DoubleWell(1.0)),
                              np.array([0.5, 0.1, 0.05, 0, 0, 0]), 0.1, 1e-3, output_every=1)
    offline = energy_residual(traj.times, traj.column("free_energy"), traj.column("dissipation_rate"),
                              traj.column("boundary_power"))
    assert np.allclose(offline, traj.column("energy_residual"), rtol=0, atol=1e-15)


def test_gradient_norm():
    d = IntervalDomain(1.0, 3)
    assert diagnostics.gradient_norm([7.0, 1.0, 0.0], d) == pytest.approx(math.pi**2)
    assert diagnostics.gradient_norm([1.0, 0.0, 2.0], d) == pytest.approx(4 * 4 * math.pi**2)
