import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viscodiff import galerkin
from viscodiff.config import (FluxSpec, HysteresisConfig, InitialDatum, SimulationConfig, parse_config,
                              parse_flux, parse_initial, serialize_config)
from viscodiff.errors import ConfigError

MINIMAL = """
# smallest useful diffusion run
[simulate]
modes = 8
alpha = 1
beta = 0.1
final_time = 0.5
model = double_well
kappa = 1
initial = cosine(0.5, 0.1)
"""


def test_minimal_config_fills_defaults():
    c = parse_config(MINIMAL)
    assert isinstance(c, SimulationConfig)
    assert c.dt == pytest.approx(0.5 / 1e4)
    assert c.quadrature_nodes == 32
    assert c.output_every == 100
    assert c.scheme == "rk4"
    assert c.flux_left.is_zero and c.flux_right.is_zero
    assert c.length == 1.0
    big = parse_config(MINIMAL.replace("modes = 8", "modes = 20"))
    assert big.quadrature_nodes == 80


def test_beta_zero_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL.replace("beta = 0.1", "beta = 0"))
    assert info.value.key == "beta"
    assert info.value.line == 6


@pytest.mark.parametrize("old, new, key", [
    ("alpha = 1", "alpha = -1", "alpha"),
    ("modes = 8", "modes = 0", "modes"),
    ("final_time = 0.5", "final_time = 0.5\ndt = 1.0", "dt"),
    ("final_time = 0.5", "final_time = 0.5\nquadrature_nodes = 31", "quadrature_nodes"),
    ("final_time = 0.5", "final_time = 0.5\nscheme = euler", "scheme"),
    ("kappa = 1", "kappa = 0", "model"),
])
def test_invariant_violations_name_the_key(old, new, key):
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL.replace(old, new))
    assert info.value.key == key


def test_unknown_key_rejected_with_line():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + "colour = blue\n")
    assert info.value.key == "colour"
    assert info.value.line == 11
    assert "line 11" in str(info.value)


def test_type_mismatch_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL.replace("modes = 8", "modes = eight"))
    assert (info.value.key, info.value.line) == ("modes", 4)


@pytest.mark.parametrize("text", [
    MINIMAL.replace("initial = cosine(0.5, 0.1)\n", ""),
    MINIMAL.replace("kappa = 1\n", ""),
    MINIMAL + "modes = 4\n",
    MINIMAL + "chi = 1\n",
    MINIMAL + "[hysteresis]\n",
    MINIMAL.replace("[simulate]", "[diffuse]"),
    "modes = 3\n",
    "",
])
def test_malformed_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_hysteresis_config():
    c = parse_config("[hysteresis]\nA = 2\ngamma = 1\nK = 1\n")
    assert c == HysteresisConfig(2.0, 1.0, 1.0)
    v = parse_config("[hysteresis]\nA = 2\ngamma = 1\nK = 1\nmode = viscous\nbeta = 1\ntau = 10, 100\n")
    assert v.tau == (10.0, 100.0)
    with pytest.raises(ConfigError):
        parse_config("[hysteresis]\nA = 2\ngamma = 1\nK = 1\nmode = viscous\n")
    with pytest.raises(ConfigError) as info:
        parse_config("[hysteresis]\nA = 2\ngamma = 1\nK = 1\nsteps_per_period = 8\n")
    assert info.value.key == "steps_per_period"


def test_initial_datum_forms():
    L = 2.0
    x = np.linspace(0, L, 9)
    assert np.allclose(parse_initial("constant(0.3)").function(L)(x), 0.3)
    cos = parse_initial("cosine(0.5, 0.1, 0.2)").function(L)(x)
    assert np.allclose(cos, 0.5 + 0.1 * np.cos(np.pi * x / L) + 0.2 * np.cos(2 * np.pi * x / L))
    mode = parse_initial("mode(3, 2)").function(L)(x)
    assert np.allclose(mode, 2 * math.sqrt(2 / L) * np.cos(2 * np.pi * x / L))
    expr = parse_initial("expr(0.5 + 0.1*cos(pi*x/L))").function(L)(x)
    assert np.allclose(expr, 0.5 + 0.1 * np.cos(np.pi * x / L))


@pytest.mark.parametrize("text", ["expr(__import__('os'))", "expr(x.real)", "expr(open('f'))", "mode(1.5)",
                                  "spline(1, 2)"])
def test_unsafe_or_unknown_initial_rejected(text):
    with pytest.raises(ValueError):
        parse_initial(text)


def test_flux_forms():
    assert parse_flux("zero").is_zero
    assert parse_flux("constant(0.2)")(3.0) == 0.2
    z = parse_flux("zigzag(0.5, 2)")
    assert z(0.5) == pytest.approx(0.5)
    assert z(1.5) == pytest.approx(-0.5)
    assert parse_flux(z.to_text()) == z


def test_regular_solution_touching_zero_parses_then_aborts():
    text = """[simulate]
modes = 8
alpha = 1
beta = 0.1
final_time = 0.01
model = regular_solution
k = 1
chi = 1
initial = cosine(0.5, 0.5)
"""
    c = parse_config(text)
    traj = galerkin.run(c)
    assert traj.failed
    assert "regularized_log" in traj.message


floats = st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 40), alpha=floats, beta=floats, T=floats, frac=st.floats(1e-4, 1.0),
    kind=st.sampled_from(["double_well", "quadratic", "regular_solution", "regularized_log"]),
    p1=floats, p2=st.floats(0, 10), eps=st.floats(1e-4, 0.49),
    coeffs=st.lists(st.floats(-2, 2), min_size=1, max_size=4),
    scheme=st.sampled_from(["rk4", "implicit_euler"]),
    flux=st.sampled_from(["zero", "constant(0.25)", "zigzag(1.5, 0.3)"]),
)
def test_simulation_round_trip(n, alpha, beta, T, frac, kind, p1, p2, eps, coeffs, scheme, flux):
    params = {"double_well": (("kappa", p1),), "quadratic": (("stiffness", p1),),
              "regular_solution": (("k", p1), ("chi", p2)),
              "regularized_log": (("k", p1), ("chi", p2), ("epsilon", eps))}[kind]
    c = SimulationConfig(modes=n, alpha=alpha, beta=beta, final_time=T, model=kind, model_params=params,
                         initial=InitialDatum("cosine", tuple(coeffs)), dt=T * frac, scheme=scheme,
                         flux_left=parse_flux(flux), flux_right=FluxSpec())
    assert parse_config(serialize_config(c)) == c


@settings(max_examples=40, deadline=None)
@given(A=floats, gamma=floats, K=floats, beta=floats, taus=st.lists(floats, min_size=1, max_size=3),
       periods=st.integers(1, 5), steps=st.integers(16, 10000), viscous=st.booleans())
def test_hysteresis_round_trip(A, gamma, K, beta, taus, periods, steps, viscous):
    if viscous:
        c = HysteresisConfig(A, gamma, K, "viscous", beta, tuple(taus), periods, steps)
    else:
        c = HysteresisConfig(A, gamma, K, periods=periods, steps_per_period=steps)
    assert parse_config(serialize_config(c)) == c


def test_round_trip_of_expression_datum():
    c = parse_config(MINIMAL.replace("cosine(0.5, 0.1)", "expr(0.5 + 0.1*x**2)"))
    assert parse_config(serialize_config(c)) == c


def test_with_param():
    c = parse_config(MINIMAL)
    assert c.with_param("n", 32).modes == 32
    assert c.with_param("n", 32).quadrature_nodes == 128
    assert c.with_param("beta", 1.0).beta == 1.0
    with pytest.raises(ConfigError):
        c.with_param("epsilon", 0.1)
    h = HysteresisConfig(2.0, 1.0, 1.0)
    v = h.with_param("tau", 100)
    assert (v.mode, v.tau, v.beta) == ("viscous", (100.0,), 1.0)
