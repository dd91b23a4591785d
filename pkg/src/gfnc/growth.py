"""Online structure learning: the multiplicative node-adding score.

Each control step a score C_add = C_R * C_t * C_e * C_Gamma is computed from
the current node count, the measured loop time, the tracking-error magnitude
and the best firing strength over the existing rules.  A node is appended
when the score exceeds a threshold; there is no pruning, so the node count is
monotone non-decreasing and capped at R_max.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import FnnNetwork, FuzzyNode


@dataclass(frozen=True)
class GrowthConfig:
    """Thresholds and caps of the node-adding rule.

    R_max = 0 disables growth entirely (degenerate configs run the loop with
    an empty network).  clamp_error optionally saturates the error factor at
    1; the default leaves it unclamped.
    """

    R_max: int
    t_max: float
    E_th: float
    Gamma_th: float
    C_th: float
    sigma_c: float
    clamp_error: bool = False

    def __post_init__(self):
        if int(self.R_max) != self.R_max or self.R_max < 0:
            raise ValueError(f"R_max must be a non-negative integer, got {self.R_max}")
        object.__setattr__(self, "R_max", int(self.R_max))
        if self.t_max <= 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if self.E_th <= 0:
            raise ValueError(f"E_th must be > 0, got {self.E_th}")
        if not 0.0 < self.Gamma_th < 1.0:
            raise ValueError(f"Gamma_th must be in (0, 1), got {self.Gamma_th}")
        if not 0.0 <= self.C_th <= 1.0:
            raise ValueError(f"C_th must be in [0, 1], got {self.C_th}")
        if self.sigma_c <= 0:
            raise ValueError(f"sigma_c must be > 0, got {self.sigma_c}")


@dataclass(frozen=True)
class GrowthObservation:
    """Per-step inputs of the node-adding score.

    gamma_max is 0 when the network is empty: no rule covers anything, which
    forces bootstrap growth from an empty network.
    """

    R_cur: int
    dt: float
    err: float
    gamma_max: float

    def __post_init__(self):
        if self.R_cur < 0:
            raise ValueError(f"R_cur must be >= 0, got {self.R_cur}")
        if self.dt < 0:
            raise ValueError(f"dt must be >= 0, got {self.dt}")
        if self.err < 0:
            raise ValueError(f"err must be >= 0, got {self.err}")
        if not 0.0 <= self.gamma_max <= 1.0:
            raise ValueError(f"gamma_max must be in [0, 1], got {self.gamma_max}")


def add_score(
    obs: GrowthObservation, cfg: GrowthConfig
) -> tuple[float, tuple[float, float, float, float]]:
    """Node-adding score and its four factors (C_R, C_t, C_e, C_Gamma).

    C_R and C_t are clamped below at 0 so overshooting the caps cannot flip
    the sign of the score; C_e has no upper clamp unless cfg.clamp_error is
    set.  Pure function: identical observations give identical scores.
    """
    if cfg.R_max == 0:
        c_r = 0.0
    else:
        c_r = max(0.0, 1.0 - obs.R_cur / cfg.R_max)
    c_t = max(0.0, 1.0 - obs.dt / cfg.t_max)
    c_e = obs.err / cfg.E_th
    if cfg.clamp_error:
        c_e = min(1.0, c_e)
    c_gamma = 1.0 if obs.gamma_max < cfg.Gamma_th else 0.0
    parts = (c_r, c_t, c_e, c_gamma)
    return c_r * c_t * c_e * c_gamma, parts


def maybe_grow(
    network: FnnNetwork, z, obs: GrowthObservation, cfg: GrowthConfig
) -> bool:
    """Append one freshly initialized node when the score crosses the threshold.

    The new node is centered at the triggering input with width sigma_c and
    zero consequent weight, so the network output at that instant is
    unchanged.  At most one node is added per call; the cap R_max is never
    exceeded.
    """
    if obs.R_cur != network.R:
        raise ValueError(
            f"observation counts {obs.R_cur} nodes, network has {network.R}"
        )
    score, _ = add_score(obs, cfg)
    if score > cfg.C_th and network.R < cfg.R_max:
        z = np.asarray(z, dtype=float)
        network.add_node(FuzzyNode(z.copy(), np.full(network.n, cfg.sigma_c), 0.0))
        return True
    return False
