"""Per-step gradient-descent adaptation of consequent weights and centers.

The continuous-time laws

    d(xi_k)/dt  = eta_xi * s * Gamma_k
    d(m_ik)/dt  = eta_m  * s * xi_k * Gamma_k * 2*(z_i - m_ik) / sigma_ik^2

are discretized by explicit Euler with step update_dt (the control period).
The widths are deliberately frozen: adapting them buys little and a fixed
width is assigned whenever a node is created.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import FnnNetwork


@dataclass(frozen=True)
class AdaptConfig:
    """Learning rates and Euler step; max_delta optionally clamps |update|."""

    eta_xi: float
    eta_m: float
    update_dt: float
    max_delta: float | None = None

    def __post_init__(self):
        if self.eta_xi <= 0:
            raise ValueError(f"eta_xi must be > 0, got {self.eta_xi}")
        if self.eta_m <= 0:
            raise ValueError(f"eta_m must be > 0, got {self.eta_m}")
        if self.update_dt <= 0:
            raise ValueError(f"update_dt must be > 0, got {self.update_dt}")
        if self.max_delta is not None and self.max_delta <= 0:
            raise ValueError(f"max_delta must be > 0 when set, got {self.max_delta}")


def adapt_step(network: FnnNetwork, z, s: float, gamma, cfg: AdaptConfig) -> float:
    """One simultaneous gradient step on all consequent weights and centers.

    gamma must be the firing strengths computed from (network, z) this step.
    Weights update first, but the center update uses the pre-update weights,
    so both gradients are evaluated at the same operating point.  Returns
    max |delta xi| over the nodes (0 for an empty network), for trace logging.
    """
    z = np.asarray(z, dtype=float)
    if z.size != network.n:
        raise ValueError(f"input has length {z.size}, network expects {network.n}")
    if len(gamma) != network.R:
        raise ValueError(f"gamma has length {len(gamma)}, network has {network.R} nodes")

    max_dxi = 0.0
    for k, node in enumerate(network.nodes):
        g = float(gamma[k])
        d_xi = cfg.update_dt * cfg.eta_xi * s * g
        d_m = cfg.update_dt * cfg.eta_m * s * node.xi * g * 2.0 * (z - node.m) / node.sigma**2
        if cfg.max_delta is not None:
            d_xi = float(np.clip(d_xi, -cfg.max_delta, cfg.max_delta))
            d_m = np.clip(d_m, -cfg.max_delta, cfg.max_delta)
        node.xi += d_xi
        node.m += d_m
        max_dxi = max(max_dxi, abs(d_xi))
    return max_dxi
