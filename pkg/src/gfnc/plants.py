"""Simulated plants: generic n-th order nonlinear system, joint-space robot
model with pluggable mass/velocity/gravity maps, and the decoupled-joint
surrogate standing in for a parallel manipulator.

All plants advance with a classical fixed-step 4th-order Runge-Kutta
integrator holding the input constant over the step, so identical initial
state and input sequence give a bit-identical trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class DivergenceError(RuntimeError):
    """State became non-finite during integration."""

    def __init__(self, t: float, state):
        self.t = t
        self.state = np.asarray(state)
        super().__init__(f"non-finite state at t={t}: {self.state}")


class SingularMassMatrixError(RuntimeError):
    """Mass matrix is singular or not symmetric positive-definite."""

    def __init__(self, theta, detail: str):
        self.theta = np.asarray(theta)
        super().__init__(f"mass matrix not SPD at theta={self.theta.tolist()}: {detail}")


def _zero_map(*_args) -> float:
    return 0.0


@dataclass
class NonlinearPlant:
    """n-th order system x^(n) = f_n(X, u) + h*u + delta_f(X, u) + d(t).

    The state vector is X = [x, x', ..., x^(n-1)].  delta_f and d make the
    lumped perturbation; stability-asserting scenarios must keep its bound
    below the supervisor's hitting gain.
    """

    n: int
    f_n: Callable[[np.ndarray, float], float]
    h: float
    delta_f: Callable[[np.ndarray, float], float] = _zero_map
    disturbance: Callable[[float], float] = _zero_map
    state: np.ndarray = None

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError(f"order n must be positive, got {self.n}")
        if self.state is None:
            self.state = np.zeros(self.n)
        self.state = np.asarray(self.state, dtype=float).copy()
        if self.state.shape != (self.n,):
            raise ValueError(f"state must have shape ({self.n},), got {self.state.shape}")


def plant_derivative(plant: NonlinearPlant, t: float, u: float) -> np.ndarray:
    """State derivative [x', ..., x^(n)] with the top entry from the split
    f_n + h*u + delta_f + d(t)."""
    x = plant.state
    top = plant.f_n(x, u) + plant.h * u + plant.delta_f(x, u) + plant.disturbance(t)
    out = np.empty(plant.n)
    out[:-1] = x[1:]
    out[-1] = top
    return out


@dataclass
class RobotJointModel:
    """Joint-space robot tau = M(theta)*theta'' + V(theta, theta') + G(theta).

    M, V, G are pluggable maps so a full manipulator model can replace the
    surrogate without touching the controller.  state stacks [theta, theta'].
    An optional disturbance map adds a per-joint torque d(t) during
    integration only; the forward-dynamics solve itself is exactly the
    equation of motion.
    """

    dof: int
    M: Callable[[np.ndarray], np.ndarray]
    V: Callable[[np.ndarray, np.ndarray], np.ndarray]
    G: Callable[[np.ndarray], np.ndarray]
    state: np.ndarray = None
    disturbance: Callable[[float], np.ndarray] | None = None

    def __post_init__(self):
        if self.dof <= 0:
            raise ValueError(f"dof must be positive, got {self.dof}")
        if self.state is None:
            self.state = np.zeros(2 * self.dof)
        self.state = np.asarray(self.state, dtype=float).copy()
        if self.state.shape != (2 * self.dof,):
            raise ValueError(
                f"state must stack [theta, theta'] with shape ({2 * self.dof},), "
                f"got {self.state.shape}"
            )

    @property
    def theta(self) -> np.ndarray:
        return self.state[: self.dof]

    @property
    def theta_dot(self) -> np.ndarray:
        return self.state[self.dof :]


def _mvg_accel(model: RobotJointModel, theta, theta_dot, tau) -> np.ndarray:
    mass = np.asarray(model.M(theta), dtype=float)
    if mass.shape != (model.dof, model.dof):
        raise ValueError(f"M(theta) must be {model.dof}x{model.dof}, got {mass.shape}")
    if not np.allclose(mass, mass.T, rtol=1e-9, atol=1e-12):
        raise SingularMassMatrixError(theta, "not symmetric")
    try:
        chol = np.linalg.cholesky(mass)
    except np.linalg.LinAlgError as exc:
        raise SingularMassMatrixError(theta, str(exc)) from exc
    rhs = tau - np.asarray(model.V(theta, theta_dot)) - np.asarray(model.G(theta))
    y = np.linalg.solve(chol, rhs)
    return np.linalg.solve(chol.T, y)


def robot_forward_dynamics(model: RobotJointModel, tau) -> np.ndarray:
    """Joint accelerations theta'' = M(theta)^-1 (tau - V - G).

    Raises SingularMassMatrixError when M is singular or not symmetric
    positive-definite at the current configuration.
    """
    tau = np.asarray(tau, dtype=float)
    return _mvg_accel(model, model.theta, model.theta_dot, tau)


@dataclass
class DecoupledJoints:
    """Surrogate parallel-robot plant: decoupled joints
    m_j q'' + b_j q' + g_j sin(q) = tau_j + d_j(t).

    Each joint's mass is SPD by construction (m_j > 0).  Parameters are
    tunable configuration, not claims about a physical machine.
    """

    m: np.ndarray
    b: np.ndarray
    g: np.ndarray
    state: np.ndarray = None
    disturbance: Callable[[float], np.ndarray] | None = None

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        if not (self.m.shape == self.b.shape == self.g.shape) or self.m.ndim != 1:
            raise ValueError("m, b, g must be 1-D vectors of equal length")
        if not np.all(self.m > 0):
            raise ValueError(f"joint masses must be > 0, got {self.m}")
        if self.state is None:
            self.state = np.zeros(2 * self.dof)
        self.state = np.asarray(self.state, dtype=float).copy()
        if self.state.shape != (2 * self.dof,):
            raise ValueError(
                f"state must stack [q, q'] with shape ({2 * self.dof},), got {self.state.shape}"
            )

    @property
    def dof(self) -> int:
        return self.m.size

    @property
    def theta(self) -> np.ndarray:
        return self.state[: self.dof]

    @property
    def theta_dot(self) -> np.ndarray:
        return self.state[self.dof :]

    def accel(self, q: np.ndarray, qd: np.ndarray, tau: np.ndarray, t: float) -> np.ndarray:
        d = self.disturbance(t) if self.disturbance is not None else 0.0
        return (tau + d - self.b * qd - self.g * np.sin(q)) / self.m

    def as_robot_model(self) -> RobotJointModel:
        """The same dynamics expressed through the generic M/V/G interface."""
        m, b, g = self.m, self.b, self.g
        return RobotJointModel(
            dof=self.dof,
            M=lambda theta: np.diag(m),
            V=lambda theta, theta_dot: b * theta_dot,
            G=lambda theta: g * np.sin(theta),
            state=self.state.copy(),
            disturbance=self.disturbance,
        )


def surrogate_3joint(
    m=(1.0, 1.0, 1.0),
    b=(0.2, 0.2, 0.2),
    g=(1.0, 1.0, 1.0),
    q0=None,
    qd0=None,
    disturbance=None,
) -> DecoupledJoints:
    """Default three-joint surrogate with viscous damping and a gravity-like
    sine term."""
    m = np.asarray(m, dtype=float)
    dof = m.size
    q0 = np.zeros(dof) if q0 is None else np.asarray(q0, dtype=float)
    qd0 = np.zeros(dof) if qd0 is None else np.asarray(qd0, dtype=float)
    return DecoupledJoints(
        m=m, b=np.asarray(b, dtype=float), g=np.asarray(g, dtype=float),
        state=np.concatenate([q0, qd0]), disturbance=disturbance,
    )


# --- fixed-step integration --------------------------------------------------


def _rk4(deriv, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = deriv(t, y)
    k2 = deriv(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = deriv(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = deriv(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_step(plant, t: float, u, dt: float) -> np.ndarray:
    """Advance any plant one RK4 step with the input held constant.

    Accepts NonlinearPlant (scalar input u), DecoupledJoints or
    RobotJointModel (torque vector).  The plant's state is updated in place
    and the next state returned.  A non-finite result raises DivergenceError.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")

    if isinstance(plant, NonlinearPlant):
        u = float(u)

        def deriv(tt, y):
            top = plant.f_n(y, u) + plant.h * u + plant.delta_f(y, u) + plant.disturbance(tt)
            out = np.empty(plant.n)
            out[:-1] = y[1:]
            out[-1] = top
            return out

    elif isinstance(plant, DecoupledJoints):
        tau = np.asarray(u, dtype=float)
        dof = plant.dof

        def deriv(tt, y):
            out = np.empty(2 * dof)
            out[:dof] = y[dof:]
            out[dof:] = plant.accel(y[:dof], y[dof:], tau, tt)
            return out

    elif isinstance(plant, RobotJointModel):
        tau = np.asarray(u, dtype=float)
        dof = plant.dof

        def deriv(tt, y):
            tau_eff = tau if plant.disturbance is None else tau + plant.disturbance(tt)
            out = np.empty(2 * dof)
            out[:dof] = y[dof:]
            out[dof:] = _mvg_accel(plant, y[:dof], y[dof:], tau_eff)
            return out

    else:
        raise TypeError(f"unsupported plant type {type(plant).__name__}")

    nxt = _rk4(deriv, t, plant.state, dt)
    if not np.all(np.isfinite(nxt)):
        raise DivergenceError(t + dt, nxt)
    plant.state = nxt
    return nxt


# --- disturbance library ------------------------------------------------------


def step_disturbance(amplitude: float, t_start: float = 0.0):
    """d(t) = amplitude for t >= t_start, else 0."""

    def d(t: float) -> float:
        return amplitude if t >= t_start else 0.0

    return d


def sine_disturbance(amplitude: float, omega: float, phase: float = 0.0):
    """d(t) = amplitude * sin(omega*t + phase); bound is |amplitude|."""

    def d(t: float) -> float:
        return amplitude * math.sin(omega * t + phase)

    return d


def band_limited_noise(
    amplitude: float, cutoff_hz: float, dt: float, duration: float, seed: int
):
    """Seeded low-pass filtered noise, held constant between samples.

    The sample sequence is normalized so max |d| == amplitude, keeping the
    declared disturbance bound exact.  Identical seeds give identical maps.
    """
    if dt <= 0 or duration <= 0:
        raise ValueError("dt and duration must be > 0")
    n = int(math.ceil(duration / dt)) + 2
    rng = np.random.default_rng(seed)
    white = rng.standard_normal(n)
    alpha = math.exp(-2.0 * math.pi * cutoff_hz * dt)
    samples = np.empty(n)
    acc = 0.0
    for i in range(n):
        acc = alpha * acc + (1.0 - alpha) * white[i]
        samples[i] = acc
    peak = np.max(np.abs(samples))
    if peak > 0:
        samples *= amplitude / peak

    def d(t: float) -> float:
        idx = int(t / dt)
        if idx < 0:
            idx = 0
        elif idx >= n:
            idx = n - 1
        return float(samples[idx])

    return d


def stack_disturbances(maps):
    """Sum several scalar disturbance maps into one."""
    maps = list(maps)

    def d(t: float) -> float:
        return sum(m(t) for m in maps)

    return d


def joint_disturbances(maps):
    """Bundle per-joint scalar disturbance maps into one vector map."""
    maps = list(maps)

    def d(t: float) -> np.ndarray:
        return np.array([m(t) if m is not None else 0.0 for m in maps])

    return d
