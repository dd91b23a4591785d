"""Sliding-mode supervision: surface value, control terms, stability monitor.

For an n-th order error state the sliding value is

    s = e^(n-1) + k_1 e^(n-2) + ... + k_{n-1} e + k_n * integral(e)

and the model-based terms are

    u_E = (1/h) * (-f_n + x_c^(n) + k_1 e^(n-1) + ... + k_n e)
    u_H = D_1 * sgn(s)

with sgn(0) = 0 so no torque is injected at exact surface crossings.  A
boundary-layer gate (off by default) suppresses the hitting term inside
|s| <= boundary, for chattering experiments.  The Lyapunov monitor tracks
V = s^2/2 and its discrete rate of change.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass
class SlidingConfig:
    """Surface gains, hitting gain, nominal-model handle and input gain.

    k[j-1] holds the gain k_j of the surface definition; the last entry
    weights the error integral.  f_n, when present, evaluates the nominal
    plant model (X, u_prev) -> real for the equivalent controller.
    """

    k: np.ndarray
    D1: float
    h: float
    boundary: float = 0.0
    f_n: Callable[[np.ndarray, float], float] | None = None

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=float)
        if self.k.ndim != 1 or self.k.size == 0:
            raise ValueError("k must be a non-empty 1-D gain vector")
        if self.D1 <= 0:
            raise ValueError(f"D1 must be > 0, got {self.D1}")
        if self.h == 0:
            raise ValueError("input gain h must be nonzero")
        if self.boundary < 0:
            raise ValueError(f"boundary must be >= 0, got {self.boundary}")

    @property
    def n(self) -> int:
        return self.k.size


@dataclass
class ErrorState:
    """Tracking error derivatives e, e', ..., e^(n-1) plus the running integral."""

    derivs: np.ndarray
    integral: float = 0.0

    def __post_init__(self):
        self.derivs = np.asarray(self.derivs, dtype=float)
        if self.derivs.ndim != 1 or self.derivs.size == 0:
            raise ValueError("derivs must be a non-empty 1-D vector")

    @property
    def n(self) -> int:
        return self.derivs.size


class ErrorTracker:
    """Causal error-state accumulator owned by one per-joint control loop.

    The integral uses the left rectangle rule, so it is 0 at t = 0 and the
    current sample is folded in only after the state for this step has been
    produced.  In estimated mode the derivatives come from backward finite
    differences of the sampled error, seeded with the first sample so the
    first step reports zero rates.
    """

    def __init__(self, n: int, dt: float):
        if n <= 0:
            raise ValueError(f"order n must be positive, got {n}")
        if dt <= 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        self.n = n
        self.dt = dt
        self._integral = 0.0
        self._prev: np.ndarray | None = None

    def update(self, e: float, exact_derivs=None) -> ErrorState:
        """Fold in this step's error sample and return the step's ErrorState.

        exact_derivs, when given, supplies all n derivatives directly (the
        simulator knows the state rates); otherwise they are estimated by
        backward differences.
        """
        if exact_derivs is not None:
            derivs = np.asarray(exact_derivs, dtype=float).copy()
            if derivs.size != self.n:
                raise ValueError(f"exact_derivs has length {derivs.size}, expected {self.n}")
        else:
            derivs = np.zeros(self.n)
            derivs[0] = e
            prev = self._prev if self._prev is not None else derivs.copy()
            for i in range(1, self.n):
                derivs[i] = (derivs[i - 1] - prev[i - 1]) / self.dt
        self._prev = derivs
        state = ErrorState(derivs.copy(), self._integral)
        self._integral += e * self.dt
        return state


def sliding_value(err: ErrorState, cfg: SlidingConfig) -> float:
    """Sliding value s for the error state, linear in (derivs, integral)."""
    n = cfg.n
    if err.n != n:
        raise ValueError(f"error state has order {err.n}, gains expect {n}")
    s = float(err.derivs[n - 1])
    for j in range(1, n):
        s += cfg.k[j - 1] * err.derivs[n - 1 - j]
    s += cfg.k[n - 1] * err.integral
    return s


def hitting_control(s: float, cfg: SlidingConfig) -> float:
    """Discontinuous reaching term D1 * sgn(s), gated inside the boundary layer."""
    if cfg.boundary > 0.0 and abs(s) <= cfg.boundary:
        return 0.0
    if s > 0.0:
        return cfg.D1
    if s < 0.0:
        return -cfg.D1
    return 0.0


def equivalent_control(
    err: ErrorState, x_c_derivs, f_n_value: float, cfg: SlidingConfig
) -> float:
    """Model-based term keeping the state on the surface absent disturbances.

    x_c_derivs holds the reference derivatives up to order n (the last entry
    is x_c^(n)); f_n_value is the nominal-model evaluation supplied by the
    plant.  The gain ordering mirrors the surface derivative: k_1 weights
    e^(n-1) down to k_n weighting e.
    """
    if cfg.h == 0:
        raise ValueError("input gain h must be nonzero")
    n = cfg.n
    if err.n != n:
        raise ValueError(f"error state has order {err.n}, gains expect {n}")
    x_c_derivs = np.asarray(x_c_derivs, dtype=float)
    if x_c_derivs.size < n + 1:
        raise ValueError(
            f"reference derivatives must reach order {n}, got {x_c_derivs.size - 1}"
        )
    bracket = -f_n_value + float(x_c_derivs[n])
    for j in range(1, n + 1):
        bracket += cfg.k[j - 1] * err.derivs[n - j]
    return bracket / cfg.h


def lyapunov_check(
    s: float, s_prev: float, dt: float, tol_scale: float = 1e-9
) -> tuple[float, float, bool]:
    """Discrete Lyapunov monitor for V = s^2 / 2.

    Returns (V, V_dot_est, ok) where V_dot_est is the one-step backward
    difference of V and ok flags a non-increase up to the slack
    tol_scale * max(1, V).
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    v = 0.5 * s * s
    v_prev = 0.5 * s_prev * s_prev
    v_dot_est = (v - v_prev) / dt
    ok = v_dot_est <= tol_scale * max(1.0, v)
    return v, v_dot_est, ok
