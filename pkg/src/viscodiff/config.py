"""Experiment configuration: dataclasses plus a line-oriented ``key = value`` format.

A file holds one ``[simulate]`` or ``[hysteresis]`` section; ``#`` starts a
comment. Example::

    [simulate]
    modes = 16
    alpha = 1
    beta = 0.1
    final_time = 1
    model = double_well
    kappa = 1
    initial = cosine(0.5, 0.1, 0.05)
    flux_right = zigzag(0.2, 0.5)
"""
from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np

from . import basis, energy
from .errors import ConfigError, InvalidArgument
from .hysteresis import zigzag

MODEL_PARAMS = {
    "double_well": {"kappa": "kappa"},
    "quadratic": {"stiffness": "stiffness"},
    "regular_solution": {"k": "k", "chi": "chi"},
    "regularized_log": {"k": "k", "chi": "chi", "epsilon": "eps"},
}
ALL_MODEL_KEYS = {k for params in MODEL_PARAMS.values() for k in params}


def _fmt(x: float) -> str:
    return repr(float(x))


# --- flux and initial-datum specs -----------------------------------------

@dataclass(frozen=True)
class FluxSpec:
    """Boundary flux h(t): ``zero``, ``constant(c)`` or ``zigzag(amplitude, period)``."""

    kind: str = "zero"
    value: float = 0.0
    period: float = 1.0

    def __call__(self, t):
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return self.value
        return self.value * zigzag(t / self.period)

    @property
    def is_zero(self):
        return self.kind == "zero" or (self.kind == "constant" and self.value == 0.0)

    def to_text(self) -> str:
        if self.kind == "zero":
            return "zero"
        if self.kind == "constant":
            return f"constant({_fmt(self.value)})"
        return f"zigzag({_fmt(self.value)}, {_fmt(self.period)})"


_CALL = re.compile(r"^([a-z_]+)\s*\((.*)\)$", re.S)


def _call_args(text):
    m = _CALL.match(text.strip())
    if not m:
        return None, None
    body = m.group(2).strip()
    return m.group(1), body


def _floats(body):
    if not body:
        return []
    return [_to_float(p.strip()) for p in body.split(",")]


def _to_float(text) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ValueError(f"expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise ValueError(f"expected a finite number, got {text!r}")
    return v


def parse_flux(text: str) -> FluxSpec:
    text = text.strip()
    if text == "zero":
        return FluxSpec()
    name, body = _call_args(text)
    if name is None:
        return FluxSpec("constant", _to_float(text))
    args = _floats(body)
    if name == "constant" and len(args) == 1:
        return FluxSpec("constant", args[0])
    if name == "zigzag" and len(args) == 2:
        if not args[1] > 0:
            raise ValueError("zigzag period must be positive")
        return FluxSpec("zigzag", args[0], args[1])
    raise ValueError(f"flux must be zero, a number, constant(c) or zigzag(amplitude, period); got {text!r}")


_EXPR_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
    "sqrt": np.sqrt, "tanh": np.tanh, "abs": np.abs, "cosh": np.cosh, "sinh": np.sinh,
}
_EXPR_NAMES = {"x", "L", "pi", "e"}
_EXPR_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
               ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)


def _check_expr(text):
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"bad expression {text!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _EXPR_NODES):
            raise ValueError(f"expression {text!r} uses unsupported syntax {type(node).__name__}")
        if isinstance(node, ast.Name) and node.id not in _EXPR_NAMES | set(_EXPR_FUNCS):
            raise ValueError(f"expression {text!r} uses unknown name {node.id!r}")
        if isinstance(node, ast.Call) and not (isinstance(node.func, ast.Name) and node.func.id in _EXPR_FUNCS):
            raise ValueError(f"expression {text!r} calls an unsupported function")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ValueError(f"expression {text!r} contains a non-numeric constant")
    return compile(tree, "<initial>", "eval")


class _Expression:
    def __init__(self, text, length):
        self.text = text
        self.length = length
        self.code = _check_expr(text)

    def __call__(self, x):
        ns = dict(_EXPR_FUNCS, x=np.asarray(x, dtype=float), L=self.length, pi=np.pi, e=np.e)
        return np.broadcast_to(eval(self.code, {"__builtins__": {}}, ns), np.shape(x))


class _CosineMixture:
    def __init__(self, coeffs, length):
        self.coeffs = coeffs
        self.length = length

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for j, c in enumerate(self.coeffs):
            out = out + c * np.cos(j * np.pi * x / self.length)
        return out


@dataclass(frozen=True)
class InitialDatum:
    """``constant(c)``, ``cosine(c0, c1, ...)`` = sum c_j cos(j pi x / L),
    ``mode(k, amplitude)`` = amplitude * v_k, or ``expr(<expression in x, L>)``."""

    kind: str
    params: tuple = ()
    expression: str = ""

    def function(self, length: float):
        if self.kind == "constant":
            c = self.params[0]
            return lambda x: np.full(np.shape(x), c, dtype=float)
        if self.kind == "cosine":
            return _CosineMixture(self.params, length)
        if self.kind == "mode":
            k, amp = int(self.params[0]), self.params[1]
            _, m = basis.eigenpair(k, basis.IntervalDomain(length, max(k, 1)))
            return lambda x: amp * m(x)
        return _Expression(self.expression, length)

    def to_text(self) -> str:
        if self.kind == "expr":
            return f"expr({self.expression})"
        if self.kind == "mode":
            return f"mode({int(self.params[0])}, {_fmt(self.params[1])})"
        return f"{self.kind}({', '.join(_fmt(p) for p in self.params)})"


def parse_initial(text: str) -> InitialDatum:
    name, body = _call_args(text)
    if name is None:
        return InitialDatum("constant", (_to_float(text),))
    if name == "expr":
        _check_expr(body)
        return InitialDatum("expr", (), body)
    args = _floats(body)
    if name == "constant" and len(args) == 1:
        return InitialDatum("constant", tuple(args))
    if name == "cosine" and args:
        return InitialDatum("cosine", tuple(args))
    if name == "mode" and len(args) in (1, 2):
        k = args[0]
        if k != int(k) or k < 1:
            raise ValueError("mode index must be a positive integer")
        amp = args[1] if len(args) == 2 else 1.0
        return InitialDatum("mode", (float(int(k)), amp))
    raise ValueError(f"unrecognized initial datum {text!r}")


# --- configs ----------------------------------------------------------------

@dataclass(frozen=True)
class SimulationConfig:
    modes: int
    alpha: float
    beta: float
    final_time: float
    model: str
    model_params: tuple
    initial: InitialDatum
    length: float = 1.0
    quadrature_nodes: Optional[int] = None
    dt: Optional[float] = None
    output_every: Optional[int] = None
    scheme: str = "rk4"
    newton_tol: float = 1e-12
    flux_left: FluxSpec = field(default_factory=FluxSpec)
    flux_right: FluxSpec = field(default_factory=FluxSpec)

    section = "simulate"

    def __post_init__(self):
        if self.quadrature_nodes is None:
            object.__setattr__(self, "quadrature_nodes", basis.default_node_count(self.modes))
        if self.dt is None:
            object.__setattr__(self, "dt", self.final_time / 1e4)
        if self.output_every is None:
            steps = max(1, round(self.final_time / self.dt))
            object.__setattr__(self, "output_every", max(1, steps // 100))
        self.validate()

    def validate(self):
        checks = [
            ("modes", self.modes >= 1, "must be at least 1"),
            ("length", self.length > 0, "must be positive"),
            ("alpha", self.alpha > 0, "must be strictly positive"),
            ("beta", self.beta > 0, "must be strictly positive"),
            ("final_time", self.final_time > 0, "must be positive"),
            ("dt", 0 < self.dt <= self.final_time, "must satisfy 0 < dt <= final_time"),
            ("quadrature_nodes", self.quadrature_nodes >= basis.NODES_PER_MODE * self.modes,
             f"must be at least {basis.NODES_PER_MODE} * modes"),
            ("output_every", self.output_every >= 1, "must be at least 1"),
            ("scheme", self.scheme in ("rk4", "implicit_euler"), "must be rk4 or implicit_euler"),
            ("newton_tol", self.newton_tol > 0, "must be positive"),
            ("model", self.model in MODEL_PARAMS, f"must be one of {sorted(MODEL_PARAMS)}"),
        ]
        for key, ok, msg in checks:
            if not ok:
                raise ConfigError(msg, key=key)
        try:
            self.build_model()
        except (InvalidArgument, TypeError) as exc:
            raise ConfigError(str(exc), key="model") from None

    def params_dict(self):
        return dict(self.model_params)

    def build_model(self) -> energy.FreeEnergyModel:
        names = MODEL_PARAMS[self.model]
        return energy.make_model(self.model, **{names[k]: v for k, v in self.model_params})

    def build_flux(self):
        from .galerkin import FluxData

        return FluxData(self.flux_left, self.flux_right)

    def with_param(self, name, value):
        """Copy with one parameter replaced (used by sweeps); derived defaults are recomputed."""
        if name == "n":
            return replace(self, modes=int(value),
                           quadrature_nodes=max(self.quadrature_nodes, basis.default_node_count(int(value))))
        if name in ("beta", "dt"):
            return replace(self, **{name: float(value)})
        if name == "epsilon":
            if self.model != "regularized_log":
                raise ConfigError("epsilon sweep needs model = regularized_log", key="epsilon")
            params = tuple((k, float(value) if k == "epsilon" else v) for k, v in self.model_params)
            return replace(self, model_params=params)
        raise ConfigError(f"cannot sweep {name!r} on a simulate config")


@dataclass(frozen=True)
class HysteresisConfig:
    A: float
    gamma: float
    K: float
    mode: str = "quasistatic"
    beta: Optional[float] = None
    tau: tuple = ()
    periods: int = 2
    steps_per_period: int = 4000

    section = "hysteresis"

    def __post_init__(self):
        self.validate()

    def validate(self):
        for key in ("A", "gamma", "K"):
            if not getattr(self, key) > 0:
                raise ConfigError("must be positive", key=key)
        if self.mode not in ("quasistatic", "viscous"):
            raise ConfigError("must be quasistatic or viscous", key="mode")
        if self.periods < 1:
            raise ConfigError("must be a positive integer", key="periods")
        if self.steps_per_period < 16:
            raise ConfigError("must be at least 16", key="steps_per_period")
        if self.mode == "viscous":
            if self.beta is None or not self.beta > 0:
                raise ConfigError("viscous mode needs beta > 0", key="beta")
            if not self.tau or any(not t > 0 for t in self.tau):
                raise ConfigError("viscous mode needs tau > 0", key="tau")
        elif self.beta is not None or self.tau:
            raise ConfigError("beta and tau are only used when mode = viscous", key="beta" if self.beta else "tau")

    def with_param(self, name, value):
        value = float(value)
        if name in ("A", "gamma"):
            return replace(self, **{name: value})
        if name == "tau":
            return replace(self, mode="viscous", tau=(value,), beta=self.beta if self.beta else 1.0)
        if name == "beta":
            if self.mode != "viscous":
                raise ConfigError("beta sweep needs mode = viscous", key="beta")
            return replace(self, beta=value)
        raise ConfigError(f"cannot sweep {name!r} on a hysteresis config")


# --- parsing ------------------------------------------------------------------

def _int(text):
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"expected an integer, got {text!r}") from None


_SIM_KEYS = {
    "modes": _int, "alpha": _to_float, "beta": _to_float, "final_time": _to_float,
    "length": _to_float, "quadrature_nodes": _int, "dt": _to_float, "output_every": _int,
    "scheme": str, "newton_tol": _to_float, "model": str, "initial": parse_initial,
    "flux_left": parse_flux, "flux_right": parse_flux,
}
_SIM_REQUIRED = ("modes", "alpha", "beta", "final_time", "model", "initial")


def _tau_list(text):
    vals = tuple(_to_float(p) for p in text.split(","))
    return vals


_HYS_KEYS = {
    "A": _to_float, "gamma": _to_float, "K": _to_float, "mode": str, "beta": _to_float,
    "tau": _tau_list, "periods": _int, "steps_per_period": _int,
}
_HYS_REQUIRED = ("A", "gamma", "K")


def _strip_comment(line):
    # '#' inside expr(...) is not meaningful, so a plain split is safe
    return line.split("#", 1)[0].strip()


def parse_config(text: str):
    """Parse a config file into a SimulationConfig or HysteresisConfig."""
    section = None
    values: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("malformed section header", line=lineno)
            name = line[1:-1].strip()
            if section is not None:
                raise ConfigError("only one section per file", line=lineno)
            if name not in ("simulate", "hysteresis"):
                raise ConfigError(f"unknown section [{name}]", line=lineno)
            section = name
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if section is None:
            raise ConfigError("key outside of a section", key=key, line=lineno)
        if key in values:
            raise ConfigError("duplicate key", key=key, line=lineno)
        table = _SIM_KEYS if section == "simulate" else _HYS_KEYS
        if key not in table and not (section == "simulate" and key in ALL_MODEL_KEYS):
            raise ConfigError("unknown key", key=key, line=lineno)
        conv = table.get(key, _to_float)
        try:
            values[key] = conv(value)
        except ValueError as exc:
            raise ConfigError(str(exc), key=key, line=lineno) from None
        lines[key] = lineno
    if section is None:
        raise ConfigError("no [simulate] or [hysteresis] section found")
    if section == "simulate":
        return _build_simulation(values, lines)
    return _build_hysteresis(values, lines)


def _missing(values, required):
    for key in required:
        if key not in values:
            raise ConfigError("missing required key", key=key)


def _reraise_with_line(exc, lines):
    raise ConfigError(exc.message, key=exc.key, line=lines.get(exc.key)) from None


def _build_simulation(values, lines):
    _missing(values, _SIM_REQUIRED)
    model = values.pop("model")
    if model not in MODEL_PARAMS:
        raise ConfigError(f"must be one of {sorted(MODEL_PARAMS)}", key="model", line=lines["model"])
    wanted = MODEL_PARAMS[model]
    params = []
    for key in list(values):
        if key in ALL_MODEL_KEYS:
            if key not in wanted:
                raise ConfigError(f"not a parameter of model {model}", key=key, line=lines[key])
            params.append((key, values.pop(key)))
    for key in wanted:
        if key not in dict(params):
            raise ConfigError(f"missing required key for model {model}", key=key)
    params.sort(key=lambda kv: list(wanted).index(kv[0]))
    try:
        return SimulationConfig(model=model, model_params=tuple(params), **values)
    except ConfigError as exc:
        _reraise_with_line(exc, lines)


def _build_hysteresis(values, lines):
    _missing(values, _HYS_REQUIRED)
    try:
        return HysteresisConfig(**values)
    except ConfigError as exc:
        _reraise_with_line(exc, lines)


def serialize_config(config) -> str:
    """Canonical text form; ``parse_config(serialize_config(c)) == c``."""
    out = [f"[{config.section}]"]
    if isinstance(config, SimulationConfig):
        for f in fields(config):
            v = getattr(config, f.name)
            if f.name == "model_params":
                for k, pv in v:
                    out.append(f"{k} = {_fmt(pv)}")
            elif f.name in ("initial", "flux_left", "flux_right"):
                out.append(f"{f.name} = {v.to_text()}")
            elif isinstance(v, float):
                out.append(f"{f.name} = {_fmt(v)}")
            else:
                out.append(f"{f.name} = {v}")
    else:
        for f in fields(config):
            v = getattr(config, f.name)
            if f.name == "beta" and v is None:
                continue
            if f.name == "tau":
                if v:
                    out.append("tau = " + ", ".join(_fmt(t) for t in v))
            elif isinstance(v, float):
                out.append(f"{f.name} = {_fmt(v)}")
            else:
                out.append(f"{f.name} = {v}")
    return "\n".join(out) + "\n"
