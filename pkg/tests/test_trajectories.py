"""Reference curves, analytic derivatives, and the joint-space mapping."""

import math

import numpy as np
import pytest

from gfnc.trajectories import (
    AffineIk,
    ToolTrajectory,
    WorkspaceError,
    default_affine_ik,
    joint_reference,
    reference_derivatives,
    sample_tool,
    tool_to_joint,
)


def _circle(radius=0.8, omega=2.0, center=(1.0, -0.5, 0.3), duration=20.0):
    return ToolTrajectory(
        kind="circle", center=np.array(center), radius=radius, angular_rate=omega,
        duration=duration,
    )


def _helix(pitch=0.4, **kw):
    base = _circle(**kw)
    return ToolTrajectory(
        kind="helix", center=base.center, radius=base.radius,
        angular_rate=base.angular_rate, duration=base.duration, pitch=pitch,
    )


class TestSampling:
    def test_circle_start(self):
        traj = _circle()
        p = sample_tool(traj, 0.0)
        assert np.allclose(p, [1.8, -0.5, 0.3], rtol=1e-15)

    def test_circle_closes(self):
        traj = _circle()
        period = 2 * math.pi / traj.angular_rate
        assert np.linalg.norm(sample_tool(traj, 0.0) - sample_tool(traj, period)) < 1e-12

    def test_helix_advances_by_pitch(self):
        traj = _helix(pitch=0.4)
        period = 2 * math.pi / traj.angular_rate
        p0 = sample_tool(traj, 0.0)
        p1 = sample_tool(traj, period)
        assert abs((p1[2] - p0[2]) - 0.4) < 1e-12
        assert np.allclose(p1[:2], p0[:2], atol=1e-12)

    def test_helix_z_slope(self):
        traj = _helix(pitch=0.4, omega=2.0)
        dz = reference_derivatives(traj, 1.3, 1)[1, 2]
        assert dz == pytest.approx(0.4 * 2.0 / (2 * math.pi), rel=1e-14)

    def test_joint_sinusoid(self):
        traj = ToolTrajectory(
            kind="joint_sinusoid", center=np.array([0.1, 0.2, 0.3]),
            radius=0.5, angular_rate=3.0, duration=10.0,
        )
        p = sample_tool(traj, 0.7)
        expect = np.array([0.1, 0.2, 0.3]) + 0.5 * math.sin(2.1)
        assert np.allclose(p, expect, rtol=1e-14)

    def test_joint_step_constant(self):
        traj = ToolTrajectory(
            kind="joint_step", center=np.array([0.1, 0.2, 0.3]),
            radius=0.5, angular_rate=1.0, duration=10.0,
        )
        assert np.allclose(sample_tool(traj, 0.0), [0.6, 0.7, 0.8], rtol=1e-15)
        assert np.array_equal(sample_tool(traj, 0.0), sample_tool(traj, 9.9))

    def test_time_range_enforced(self):
        traj = _circle(duration=5.0)
        with pytest.raises(ValueError):
            sample_tool(traj, -0.1)
        with pytest.raises(ValueError):
            sample_tool(traj, 5.1)

    def test_validation(self):
        with pytest.raises(ValueError):
            _circle(radius=0.0)
        with pytest.raises(ValueError):
            _circle(omega=0.0)
        with pytest.raises(ValueError):
            _circle(duration=0.0)
        with pytest.raises(ValueError):
            ToolTrajectory(
                kind="spiral", center=np.zeros(3), radius=1.0, angular_rate=1.0,
                duration=1.0,
            )
        with pytest.raises(ValueError):
            ToolTrajectory(
                kind="circle", center=np.zeros(2), radius=1.0, angular_rate=1.0,
                duration=1.0,
            )


class TestDerivatives:
    def test_circle_first_derivative_at_start(self):
        traj = _circle(radius=0.8, omega=2.0)
        d = reference_derivatives(traj, 0.0, 1)
        assert np.allclose(d[1], [0.0, 1.6, 0.0], atol=1e-12)

    def test_order_zero_equals_sample(self):
        traj = _helix()
        d = reference_derivatives(traj, 0.9, 0)
        assert np.array_equal(d[0], sample_tool(traj, 0.9))

    def test_joint_step_all_derivatives_zero(self):
        traj = ToolTrajectory(
            kind="joint_step", center=np.zeros(3), radius=0.5, angular_rate=1.0,
            duration=10.0,
        )
        d = reference_derivatives(traj, 3.0, 4)
        assert np.array_equal(d[1:], np.zeros((4, 3)))

    def test_all_kinds_match_finite_differences(self):
        rng = np.random.default_rng(61)
        trajs = [
            _circle(),
            _helix(),
            ToolTrajectory(
                kind="joint_sinusoid", center=np.array([0.1, -0.2, 0.4]),
                radius=0.7, angular_rate=2.5, duration=20.0,
            ),
            ToolTrajectory(
                kind="joint_step", center=np.array([0.1, -0.2, 0.4]),
                radius=0.7, angular_rate=2.5, duration=20.0,
            ),
        ]
        eps = 1e-6
        for traj in trajs:
            for _ in range(100):
                t = float(rng.uniform(eps, traj.duration - eps))
                d = reference_derivatives(traj, t, 2)
                fd1 = (sample_tool(traj, t + eps) - sample_tool(traj, t - eps)) / (2 * eps)
                assert np.allclose(d[1], fd1, rtol=1e-6, atol=1e-6)
                fd2 = (
                    reference_derivatives(traj, t + eps, 1)[1]
                    - reference_derivatives(traj, t - eps, 1)[1]
                ) / (2 * eps)
                assert np.allclose(d[2], fd2, rtol=1e-6, atol=1e-6)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            reference_derivatives(_circle(), 0.0, -1)


class TestAffineIk:
    def test_hand_multiplied_instance(self):
        ik = AffineIk(
            matrix=np.array([[1.0, 0.0, 2.0], [0.0, -1.0, 0.5]]),
            offset=np.array([0.1, -0.2]),
        )
        q = ik(np.array([0.3, 0.4, 0.5]))
        # rows dotted with the pose, plus the offset
        assert q[0] == pytest.approx(0.3 + 1.0 + 0.1, rel=1e-15)
        assert q[1] == pytest.approx(-0.4 + 0.25 - 0.2, rel=1e-15)

    def test_origin_maps_to_offset(self):
        ik = AffineIk(matrix=np.zeros((3, 3)), offset=np.array([1.0, 2.0, 3.0]))
        assert np.array_equal(ik(np.zeros(3)), [1.0, 2.0, 3.0])

    def test_height_only_coupling(self):
        ik = AffineIk(matrix=np.array([[0.0, 0.0, 1.0]]), offset=np.zeros(1))
        q1 = ik(np.array([5.0, -3.0, 0.7]))
        q2 = ik(np.array([-2.0, 8.0, 0.7]))
        assert q1[0] == q2[0]

    def test_workspace_enforced(self):
        ik = AffineIk(
            matrix=np.eye(3), offset=np.zeros(3),
            lo=-np.ones(3), hi=np.ones(3),
        )
        assert ik.in_workspace([0.5, 0.5, 0.5])
        assert not ik.in_workspace([1.5, 0.0, 0.0])
        with pytest.raises(WorkspaceError):
            ik(np.array([0.0, -2.0, 0.0]))

    def test_default_hook_shape(self):
        ik = default_affine_ik()
        assert ik.dof == 3
        assert ik.matrix.shape == (3, 3)
        # legs sit 120 degrees apart; every joint shares the full height
        assert np.allclose(ik.matrix[:, 2], 1.0)
        assert np.allclose(np.sum(ik.matrix[:, :2], axis=0), 0.0, atol=1e-12)
        assert ik.in_workspace([9.0, 9.0, 9.0])
        assert not ik.in_workspace([11.0, 0.0, 0.0])

    def test_tool_to_joint_passthrough(self):
        ik = default_affine_ik()
        pose = np.array([0.2, 0.4, 0.6])
        assert np.array_equal(tool_to_joint(pose, ik), ik(pose))

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            AffineIk(matrix=np.zeros((3, 2)), offset=np.zeros(3))
        with pytest.raises(ValueError):
            AffineIk(matrix=np.zeros((3, 3)), offset=np.zeros(2))


class TestJointReference:
    def test_tool_kind_propagates_through_matrix(self):
        traj = _circle(radius=0.5, omega=3.0, center=(0.0, 0.0, 1.0))
        ik = default_affine_ik()
        ref = joint_reference(traj, 0.4, order=2, ik=ik)
        tool = reference_derivatives(traj, 0.4, 2)
        assert np.allclose(ref.q_c, ik(tool[0]), rtol=1e-14)
        for d in (1, 2):
            assert np.allclose(ref.derivs[:, d], ik.matrix @ tool[d], rtol=1e-14)

    def test_tool_kind_requires_hook(self):
        with pytest.raises(ValueError):
            joint_reference(_circle(), 0.0, order=2, ik=None)

    def test_joint_kind_uses_center_entries(self):
        traj = ToolTrajectory(
            kind="joint_sinusoid", center=np.array([0.1, 0.2, 0.3]),
            radius=0.5, angular_rate=2.0, duration=10.0,
        )
        ref = joint_reference(traj, 0.25, order=2, dof=3)
        assert ref.derivs.shape == (3, 3)
        expect = 0.1 + 0.5 * math.sin(0.5)
        assert ref.q_c[0] == pytest.approx(expect, rel=1e-14)
        # all joints share the sinusoid, offsets differ
        assert np.allclose(np.diff(ref.q_c), [0.1, 0.1], rtol=1e-12)
        assert ref.derivs[0, 1] == pytest.approx(0.5 * 2.0 * math.cos(0.5), rel=1e-13)

    def test_joint_kind_single_joint(self):
        traj = ToolTrajectory(
            kind="joint_step", center=np.array([2.5, 0.0, 0.0]),
            radius=0.5, angular_rate=1.0, duration=5.0,
        )
        ref = joint_reference(traj, 1.0, order=2, dof=1)
        assert ref.derivs.shape == (1, 3)
        assert ref.q_c[0] == 3.0
        assert np.array_equal(ref.derivs[0, 1:], np.zeros(2))

    def test_joint_kind_dof_cap(self):
        traj = ToolTrajectory(
            kind="joint_step", center=np.zeros(3), radius=0.5, angular_rate=1.0,
            duration=5.0,
        )
        with pytest.raises(ValueError):
            joint_reference(traj, 0.0, order=2, dof=4)
