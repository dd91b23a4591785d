"""Reference trajectories and the tool-to-joint mapping.

Tool-space kinds (circle, helix) are sampled in Cartesian coordinates and
mapped to joint references through a pluggable inverse-kinematics hook; the
built-in hook is an affine surrogate, so joint-space derivatives follow from
the tool-space ones exactly.  Joint-space kinds (joint_sinusoid, joint_step)
bypass the hook entirely and drive each joint directly.  All built-in kinds
have closed-form derivatives of every order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("circle", "helix", "joint_sinusoid", "joint_step")
TOOL_KINDS = ("circle", "helix")


class WorkspaceError(ValueError):
    """Pose outside the inverse-kinematics hook's declared workspace."""


@dataclass(frozen=True)
class ToolTrajectory:
    """One reference curve with its geometric parameters.

    center/radius/angular_rate describe the curve; for joint kinds the
    center holds per-joint offsets and radius the shared amplitude.  pitch
    is the helix advance per full revolution.
    """

    kind: str
    center: np.ndarray
    radius: float
    angular_rate: float
    duration: float
    pitch: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}, expected one of {KINDS}")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.center.ndim != 1 or self.center.size != 3:
            raise ValueError(f"center must be a 3-vector, got shape {self.center.shape}")
        if self.radius <= 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")
        if self.angular_rate == 0:
            raise ValueError("angular_rate must be nonzero")
        if self.duration <= 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")


def _check_time(traj: ToolTrajectory, t: float) -> None:
    if not 0.0 <= t <= traj.duration:
        raise ValueError(f"t={t} outside [0, {traj.duration}]")


def sample_tool(traj: ToolTrajectory, t: float) -> np.ndarray:
    """Reference point at time t (3-vector, tool pose parameters)."""
    _check_time(traj, t)
    w = traj.angular_rate
    if traj.kind == "circle" or traj.kind == "helix":
        p = traj.center + traj.radius * np.array([math.cos(w * t), math.sin(w * t), 0.0])
        if traj.kind == "helix":
            p[2] += traj.pitch * w * t / (2.0 * math.pi)
        return p
    if traj.kind == "joint_sinusoid":
        return traj.center + traj.radius * math.sin(w * t)
    # joint_step: constant offset from t = 0 on
    return traj.center + traj.radius


def reference_derivatives(traj: ToolTrajectory, t: float, order: int) -> np.ndarray:
    """Closed-form derivatives of the reference, rows 0..order."""
    _check_time(traj, t)
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    w = traj.angular_rate
    out = np.zeros((order + 1, 3))
    out[0] = sample_tool(traj, t)
    if traj.kind in TOOL_KINDS:
        for d in range(1, order + 1):
            shift = d * math.pi / 2.0
            out[d, 0] = traj.radius * w**d * math.cos(w * t + shift)
            out[d, 1] = traj.radius * w**d * math.sin(w * t + shift)
        if traj.kind == "helix" and order >= 1:
            out[1, 2] = traj.pitch * w / (2.0 * math.pi)
    elif traj.kind == "joint_sinusoid":
        for d in range(1, order + 1):
            out[d] = traj.radius * w**d * math.sin(w * t + d * math.pi / 2.0)
    # joint_step: all higher derivatives stay 0
    return out


@dataclass
class AffineIk:
    """Affine surrogate inverse kinematics q = A @ pose + c with a box workspace.

    The true closed-chain kinematics live outside this toolkit; any
    user-supplied pose -> joint map can replace this hook.  The affine form
    lets joint-space reference derivatives follow exactly: d^k q = A d^k p.
    """

    matrix: np.ndarray
    offset: np.ndarray
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        self.offset = np.asarray(self.offset, dtype=float)
        if self.matrix.ndim != 2 or self.matrix.shape[1] != 3:
            raise ValueError(f"matrix must be (dof, 3), got {self.matrix.shape}")
        if self.offset.shape != (self.matrix.shape[0],):
            raise ValueError("offset length must match the matrix row count")
        if self.lo is not None:
            self.lo = np.asarray(self.lo, dtype=float)
        if self.hi is not None:
            self.hi = np.asarray(self.hi, dtype=float)

    @property
    def dof(self) -> int:
        return self.matrix.shape[0]

    def in_workspace(self, pose) -> bool:
        pose = np.asarray(pose, dtype=float)
        if self.lo is not None and np.any(pose < self.lo):
            return False
        if self.hi is not None and np.any(pose > self.hi):
            return False
        return True

    def __call__(self, pose) -> np.ndarray:
        pose = np.asarray(pose, dtype=float)
        if not self.in_workspace(pose):
            raise WorkspaceError(
                f"pose {pose.tolist()} outside workspace "
                f"[{None if self.lo is None else self.lo.tolist()}, "
                f"{None if self.hi is None else self.hi.tolist()}]"
            )
        return self.matrix @ pose + self.offset


def default_affine_ik(dof: int = 3, reach: float = 10.0) -> AffineIk:
    """Three legs 120 degrees apart: each joint takes the full height plus a
    tilt share from the in-plane position.  Configuration surrogate only."""
    rows = []
    for j in range(dof):
        phi = 2.0 * math.pi * j / max(dof, 1)
        rows.append([0.5 * math.cos(phi), 0.5 * math.sin(phi), 1.0])
    return AffineIk(
        matrix=np.array(rows),
        offset=np.zeros(dof),
        lo=-reach * np.ones(3),
        hi=reach * np.ones(3),
    )


def tool_to_joint(pose, ik) -> np.ndarray:
    """Map a tool pose to joint positions through the hook."""
    return np.asarray(ik(pose), dtype=float)


@dataclass
class JointReference:
    """Per-joint desired positions and their derivatives up to the loop order.

    derivs has shape (dof, order+1); column d is the d-th derivative, so
    q_c == derivs[:, 0].
    """

    q_c: np.ndarray
    derivs: np.ndarray


def joint_reference(
    traj: ToolTrajectory, t: float, order: int, ik: AffineIk | None = None, dof: int | None = None
) -> JointReference:
    """Joint-space reference at time t with derivatives up to `order`.

    Tool kinds require an affine hook (derivatives propagate through its
    linear part); joint kinds broadcast the scalar curve over `dof` joints
    using the center entries as per-joint offsets.
    """
    tool = reference_derivatives(traj, t, order)
    if traj.kind in TOOL_KINDS:
        if ik is None:
            raise ValueError(f"trajectory kind {traj.kind!r} needs an inverse-kinematics hook")
        q0 = tool_to_joint(tool[0], ik)
        derivs = np.empty((q0.size, order + 1))
        derivs[:, 0] = q0
        for d in range(1, order + 1):
            derivs[:, d] = ik.matrix @ tool[d]
        return JointReference(q_c=q0, derivs=derivs)
    dof = 3 if dof is None else dof
    if dof > 3:
        raise ValueError("joint-space kinds carry at most 3 joints (center entries)")
    derivs = np.empty((dof, order + 1))
    for d in range(order + 1):
        derivs[:, d] = tool[d][:dof]
    return JointReference(q_c=derivs[:, 0].copy(), derivs=derivs)
