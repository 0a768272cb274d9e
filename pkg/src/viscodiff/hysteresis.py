"""Threshold dissipation driven by a zigzag potential: play operator and viscous variant.

Quasi-static law (y = K v, w = A z(s)):  w - y in [-gamma, gamma], y moves only
when the constraint is active. Its solution from y(0) = 0 is the play
operator applied to w.

Viscous law at finite period tau (spatially uniform):

    (beta / tau) u' + K u + gamma sign(u') = w,

stepped implicitly; the set-valued sign is resolved by a soft threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

BREAKPOINTS = (0.0, 0.25, 0.75)


def zigzag(s):
    """1-periodic triangle wave: 4s on [0, 1/4), 2 - 4s on [1/4, 3/4), 4s - 4 on [3/4, 1)."""
    s = np.asarray(s, dtype=float)
    f = s - np.floor(s)
    out = np.where(f < 0.25, 4.0 * f, np.where(f < 0.75, 2.0 - 4.0 * f, -4.0 + 4.0 * f))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PlayState:
    s: float
    w: float
    y: float
    gamma: float
    K: float = 1.0
    A: float = 1.0

    @property
    def v(self):
        return self.y / self.K


def clamp(y, lo, hi):
    return min(max(y, lo), hi)


def play_step(state: PlayState, w_next: float, s_next=None) -> PlayState:
    """Move y the least amount that restores |w_next - y| <= gamma."""
    y = clamp(state.y, w_next - state.gamma, w_next + state.gamma)
    s = state.s if s_next is None else s_next
    return PlayState(s, w_next, y, state.gamma, state.K, state.A)


def _check_grid(s_grid):
    s = np.asarray(s_grid, dtype=float)
    if s.ndim != 1 or s.size < 1 or s[0] != 0.0 or np.any(np.diff(s) <= 0):
        raise InvalidArgument("s grid must start at 0 and be strictly increasing")
    return s


def _check_positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise InvalidArgument(f"{k} must be positive")


def play_output(w, gamma, y0=0.0):
    """Discrete play of the input sequence ``w``: array of outputs y."""
    w = np.asarray(w, dtype=float)
    y = np.empty_like(w)
    cur = y0
    for i, wi in enumerate(w):
        cur = min(max(cur, wi - gamma), wi + gamma)
        y[i] = cur
    return y


def play_trajectory(A, gamma, K, s_grid) -> list[PlayState]:
    _check_positive(A=A, gamma=gamma, K=K)
    s = _check_grid(s_grid)
    w = A * zigzag(s)
    y = play_output(w, gamma)
    return [PlayState(float(si), float(wi), float(yi), gamma, K, A) for si, wi, yi in zip(s, w, y)]


def closed_form_play(A, gamma, K, s):
    """K v(s): 0 before s = gamma/(4A), then A z(s - gamma/(4A)) projected onto [-A+gamma, A-gamma]."""
    s = np.asarray(s, dtype=float)
    if A <= gamma:
        out = np.zeros_like(s)
    else:
        shift = gamma / (4.0 * A)
        bound = A - gamma
        proj = np.clip(A * zigzag(s - shift), -bound, bound)
        out = np.where(s < shift, 0.0, proj)
    return float(out) if out.ndim == 0 else out


def soft_threshold(x, gamma):
    return np.sign(x) * max(abs(x) - gamma, 0.0)


@dataclass(frozen=True)
class ViscousScalarState:
    s: float
    u: float
    K: float
    gamma: float
    A: float
    beta: float
    tau: float

    def __post_init__(self):
        if not (self.beta > 0 and self.tau > 0):
            raise InvalidArgument("beta and tau must be positive")
        if not (np.isfinite(self.u) and np.isfinite(self.s)):
            raise InvalidArgument("state must be finite")

    @property
    def y(self):
        return self.K * self.u


def viscous_scalar_step(state: ViscousScalarState, ds: float, w_next: float) -> ViscousScalarState:
    """Implicit step of (beta/tau) u' + K u + gamma sign(u') = w.

    Sticks exactly when |w_next - K u| <= gamma.
    """
    if not ds > 0:
        raise InvalidArgument("ds must be positive")
    st = state
    drive = soft_threshold(w_next - st.K * st.u, st.gamma)
    u = st.u + ds * drive / (st.beta / st.tau + st.K * ds)
    return ViscousScalarState(st.s + ds, float(u), st.K, st.gamma, st.A, st.beta, st.tau)


def viscous_trajectory(A, gamma, K, beta, tau, s_grid) -> list[ViscousScalarState]:
    _check_positive(A=A, K=K)
    if not gamma >= 0:
        raise InvalidArgument("gamma must be nonnegative")
    s = _check_grid(s_grid)
    w = A * zigzag(s)
    state = ViscousScalarState(0.0, 0.0, K, gamma, A, beta, tau)
    out = [state]
    for i in range(1, s.size):
        u = viscous_scalar_step(state, s[i] - s[i - 1], w[i]).u
        # pin s to the grid value rather than the accumulated sum of increments
        state = ViscousScalarState(float(s[i]), u, K, gamma, A, beta, tau)
        out.append(state)
    return out


def breakpoint_grid(periods: int, steps_per_period: int = 4000) -> np.ndarray:
    """Uniform grid on [0, periods] that contains every kink of the zigzag."""
    if periods < 1 or steps_per_period < 1:
        raise InvalidArgument("periods and steps_per_period must be positive")
    base = np.arange(steps_per_period + 1) / steps_per_period
    cell = np.union1d(base, BREAKPOINTS + (1.0,))
    grid = np.concatenate([cell[:-1] + p for p in range(periods)] + [[float(periods)]])
    return grid


def staggered_grid(periods: int, steps_per_period: int) -> np.ndarray:
    """0 followed by cell midpoints (k + 1/2)/N; with N divisible by 4 it misses every zigzag extremum."""
    n = periods * steps_per_period
    return np.concatenate([[0.0], (np.arange(n) + 0.5) / steps_per_period])


@dataclass(frozen=True)
class Loop:
    w: np.ndarray
    y: np.ndarray
    area: float

    @property
    def pairs(self):
        return list(zip(self.w.tolist(), self.y.tolist()))


def shoelace_area(x, y) -> float:
    """Signed area of the closed polygon through (x, y); positive counterclockwise."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def hysteresis_loop(trajectory) -> Loop:
    """(w, y) pairs of a play or viscous trajectory, with the area of its last full period."""
    s = np.array([st.s for st in trajectory])
    if isinstance(trajectory[0], ViscousScalarState):
        w = np.array([st.A for st in trajectory]) * zigzag(s)
    else:
        w = np.array([st.w for st in trajectory])
    y = np.array([st.y for st in trajectory])
    last = np.floor(s[-1])
    if last >= 1:
        mask = (s >= last - 1.0) & (s <= last)
    else:
        mask = np.ones_like(s, dtype=bool)
    area = shoelace_area(w[mask], y[mask])
    return Loop(w, y, area)


def loop_area_closed_form(A, gamma, K=1.0) -> float:
    """Area of the steady play loop in the (w, y) plane: a parallelogram 2 gamma wide, 2 (A - gamma) tall."""
    return 4.0 * gamma * max(A - gamma, 0.0)
