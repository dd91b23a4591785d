"""Closed-loop control simulation for a dynamically growing fuzzy-neural
controller supervised by a sliding-mode law.

The package splits along the loop's responsibilities: `network` evaluates
the Gaussian rule base, `growth` decides when it gains nodes, `adapt` trains
its parameters, `sliding` supplies the supervisory terms, `plants` and
`trajectories` simulate the world, and `harness` runs the loop and records
the trace.
"""

from .adapt import AdaptConfig, adapt_step
from .growth import GrowthConfig, GrowthObservation, add_score, maybe_grow
from .harness import (
    GrowthEvent,
    SimTrace,
    SimulationDiverged,
    emit_trace,
    read_trace,
    run_scenario,
    save_networks,
    summarize_trace,
    warm_start,
)
from .network import (
    FnnNetwork,
    FuzzyNode,
    NetworkFormatError,
    deserialize_network,
    load_network,
    node_activation,
    save_network,
    serialize_network,
)
from .plants import (
    DecoupledJoints,
    DivergenceError,
    NonlinearPlant,
    RobotJointModel,
    SingularMassMatrixError,
    band_limited_noise,
    integrate_step,
    joint_disturbances,
    plant_derivative,
    robot_forward_dynamics,
    sine_disturbance,
    stack_disturbances,
    step_disturbance,
    surrogate_3joint,
)
from .scenario import ConfigError, ScenarioConfig, build_plant, load_scenario, parse_scenario
from .sliding import (
    ErrorState,
    ErrorTracker,
    SlidingConfig,
    equivalent_control,
    hitting_control,
    lyapunov_check,
    sliding_value,
)
from .trajectories import (
    AffineIk,
    JointReference,
    ToolTrajectory,
    WorkspaceError,
    default_affine_ik,
    joint_reference,
    reference_derivatives,
    sample_tool,
    tool_to_joint,
)

__all__ = [
    "AdaptConfig",
    "AffineIk",
    "ConfigError",
    "DecoupledJoints",
    "DivergenceError",
    "ErrorState",
    "ErrorTracker",
    "FnnNetwork",
    "FuzzyNode",
    "GrowthConfig",
    "GrowthEvent",
    "GrowthObservation",
    "JointReference",
    "NetworkFormatError",
    "NonlinearPlant",
    "RobotJointModel",
    "ScenarioConfig",
    "SimTrace",
    "SimulationDiverged",
    "SingularMassMatrixError",
    "SlidingConfig",
    "ToolTrajectory",
    "WorkspaceError",
    "adapt_step",
    "add_score",
    "band_limited_noise",
    "build_plant",
    "default_affine_ik",
    "deserialize_network",
    "emit_trace",
    "equivalent_control",
    "hitting_control",
    "integrate_step",
    "joint_disturbances",
    "joint_reference",
    "load_network",
    "load_scenario",
    "lyapunov_check",
    "maybe_grow",
    "node_activation",
    "parse_scenario",
    "plant_derivative",
    "read_trace",
    "reference_derivatives",
    "robot_forward_dynamics",
    "run_scenario",
    "sample_tool",
    "save_network",
    "save_networks",
    "serialize_network",
    "sine_disturbance",
    "sliding_value",
    "stack_disturbances",
    "step_disturbance",
    "summarize_trace",
    "surrogate_3joint",
    "tool_to_joint",
    "warm_start",
]

__version__ = "0.1.0"
