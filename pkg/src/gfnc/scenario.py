"""Scenario configuration: parsing, validation, defaults, plant builders.

A scenario file is YAML (JSON works too, being a YAML subset) whose keys are
exactly the ScenarioConfig field names.  Unknown keys raise ConfigError so
typos cannot silently fall back to defaults.  The config object holds parsed
specs, not live plant state; run_scenario builds fresh mutable objects from
it every time, which is what makes repeated runs reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import yaml

from .adapt import AdaptConfig
from .growth import GrowthConfig
from .plants import (
    DecoupledJoints,
    NonlinearPlant,
    band_limited_noise,
    sine_disturbance,
    stack_disturbances,
    step_disturbance,
    surrogate_3joint,
)
from .sliding import SlidingConfig
from .trajectories import KINDS, TOOL_KINDS, AffineIk, ToolTrajectory, default_affine_ik


class ConfigError(ValueError):
    """Malformed scenario configuration."""


SUPERVISORY_MODES = ("hitting_only", "full_smc", "off")
ERROR_DERIV_MODES = ("exact", "estimated")
DT_MODES = ("synthetic", "measured")
PLANT_KINDS = ("surrogate_3psp", "nonlinear2")

# Defaults for the growth/adaptation constants; any subset can be
# overridden per scenario.  Both learning rates share one default.
DEFAULT_GROWTH = dict(
    R_max=25, t_max=0.9e-3, E_th=1e-5, Gamma_th=0.1, C_th=0.02, sigma_c=2.0, clamp_error=False
)
DEFAULT_ADAPT = dict(eta_xi=0.015, eta_m=0.015, max_delta=None)
DEFAULT_SLIDING = dict(k=[1.0, 1.0], D1=1.0, h=1.0, boundary=0.0)


def _require_mapping(value, context: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{context} must be a mapping, got {type(value).__name__}")
    return value


def _take(raw: dict, allowed, context: str) -> dict:
    """Copy raw, verifying every key is known."""
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {context}: {', '.join(unknown)}")
    return dict(raw)


def _numeric(spec: dict, keys, context: str) -> None:
    """Coerce the listed entries to float in place.

    YAML 1.1 reads a dotless exponent literal such as 1e-6 as a string, so
    numeric fields must be converted explicitly before they reach the typed
    config objects."""
    for key in keys:
        if key in spec and spec[key] is not None:
            try:
                spec[key] = float(spec[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(
                    f"{context}.{key} must be a number, got {spec[key]!r}"
                ) from exc


def _parse_disturbance_spec(raw, context: str) -> dict | list | None:
    """Validate a disturbance spec (or list of specs) without building it;
    noise needs run-level dt/duration, so construction is deferred."""
    if raw is None:
        return None
    if isinstance(raw, list):
        return [_parse_disturbance_spec(item, f"{context}[{i}]") for i, item in enumerate(raw)]
    raw = _require_mapping(raw, context)
    kind = raw.get("kind")
    if kind == "step":
        spec = _take(raw, ("kind", "amplitude", "t_start"), context)
        spec.setdefault("t_start", 0.0)
    elif kind == "sine":
        spec = _take(raw, ("kind", "amplitude", "omega", "phase"), context)
        spec.setdefault("phase", 0.0)
        if "omega" not in spec:
            raise ConfigError(f"{context}: sine disturbance needs omega")
    elif kind == "noise":
        spec = _take(raw, ("kind", "amplitude", "cutoff_hz", "seed"), context)
        if "cutoff_hz" not in spec:
            raise ConfigError(f"{context}: noise disturbance needs cutoff_hz")
    else:
        raise ConfigError(f"{context}: disturbance kind must be step, sine or noise, got {kind!r}")
    if "amplitude" not in spec:
        raise ConfigError(f"{context}: disturbance needs amplitude")
    spec["amplitude"] = float(spec["amplitude"])
    return spec


def build_disturbance(spec, plant_dt: float, duration: float, default_seed: int):
    """Turn a validated disturbance spec into a time map."""
    if spec is None:
        return None
    if isinstance(spec, list):
        return stack_disturbances(
            [build_disturbance(s, plant_dt, duration, default_seed) for s in spec]
        )
    kind = spec["kind"]
    if kind == "step":
        return step_disturbance(spec["amplitude"], float(spec["t_start"]))
    if kind == "sine":
        return sine_disturbance(spec["amplitude"], float(spec["omega"]), float(spec["phase"]))
    seed = int(spec.get("seed", default_seed))
    # table covers one extra control-period's worth of lookups past the end
    return band_limited_noise(
        spec["amplitude"], float(spec["cutoff_hz"]), plant_dt, duration + 1e-2, seed
    )


def _parse_plant(raw, context: str = "plant") -> dict:
    raw = _require_mapping(raw, context)
    kind = raw.get("kind")
    if kind == "surrogate_3psp":
        spec = _take(raw, ("kind", "m", "b", "g", "q0", "qd0", "disturbance"), context)
        m = np.asarray(spec.get("m", (1.0, 1.0, 1.0)), dtype=float)
        if m.ndim == 0:
            m = m.reshape(1)
        dof = m.size
        spec["m"] = m.tolist()
        for name, default in (("b", 0.2), ("g", 1.0)):
            v = np.asarray(spec.get(name, default), dtype=float)
            if v.ndim == 0:
                v = np.full(dof, float(v))
            if v.size != dof:
                raise ConfigError(f"{context}.{name} must have {dof} entries")
            spec[name] = v.tolist()
        for name in ("q0", "qd0"):
            v = np.asarray(spec.get(name, np.zeros(dof)), dtype=float)
            if v.ndim == 0:
                v = np.full(dof, float(v))
            if v.size != dof:
                raise ConfigError(f"{context}.{name} must have {dof} entries")
            spec[name] = v.tolist()
        spec["disturbance"] = _parse_disturbance_spec(
            spec.get("disturbance"), f"{context}.disturbance"
        )
        spec["dof"] = dof
        return spec
    if kind == "nonlinear2":
        spec = _take(
            raw,
            ("kind", "coeff_pos", "coeff_vel", "coeff_sin", "const", "h", "x0", "disturbance"),
            context,
        )
        for name, default in (
            ("coeff_pos", 0.0),
            ("coeff_vel", 0.0),
            ("coeff_sin", 0.0),
            ("const", 0.0),
            ("h", 1.0),
        ):
            spec[name] = float(spec.get(name, default))
        if spec["h"] == 0:
            raise ConfigError(f"{context}.h must be nonzero")
        x0 = np.asarray(spec.get("x0", (0.0, 0.0)), dtype=float)
        if x0.shape != (2,):
            raise ConfigError(f"{context}.x0 must be [position, velocity]")
        spec["x0"] = x0.tolist()
        spec["disturbance"] = _parse_disturbance_spec(
            spec.get("disturbance"), f"{context}.disturbance"
        )
        spec["dof"] = 1
        return spec
    raise ConfigError(f"{context}.kind must be one of {PLANT_KINDS}, got {kind!r}")


def _parse_trajectory(raw, duration: float, context: str = "trajectory"):
    raw = _require_mapping(raw, context)
    spec = _take(
        raw,
        ("kind", "center", "radius", "angular_rate", "pitch", "duration", "ik", "reach"),
        context,
    )
    kind = spec.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"{context}.kind must be one of {KINDS}, got {kind!r}")
    traj_duration = float(spec.get("duration", duration))
    if traj_duration < duration:
        raise ConfigError(
            f"{context}.duration {traj_duration} is shorter than the run duration {duration}"
        )
    try:
        traj = ToolTrajectory(
            kind=kind,
            center=np.asarray(spec.get("center", (0.0, 0.0, 0.0)), dtype=float),
            radius=float(spec.get("radius", 1.0)),
            angular_rate=float(spec.get("angular_rate", 1.0)),
            duration=traj_duration,
            pitch=float(spec.get("pitch", 0.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from exc
    ik = None
    if kind in TOOL_KINDS:
        ik_name = spec.get("ik", "affine_surrogate")
        if ik_name != "affine_surrogate":
            raise ConfigError(f"{context}.ik: only 'affine_surrogate' is built in, got {ik_name!r}")
        ik = default_affine_ik(reach=float(spec.get("reach", 10.0)))
    elif "ik" in spec or "reach" in spec:
        raise ConfigError(f"{context}: ik/reach apply only to tool-space kinds")
    return traj, ik


def _parse_sliding_one(raw, context: str) -> SlidingConfig:
    raw = _require_mapping(raw, context)
    spec = _take(raw, ("k", "D1", "h", "boundary"), context)
    merged = dict(DEFAULT_SLIDING)
    merged.update(spec)
    try:
        return SlidingConfig(
            k=np.asarray(merged["k"], dtype=float),
            D1=float(merged["D1"]),
            h=float(merged["h"]),
            boundary=float(merged["boundary"]),
        )
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from exc


@dataclass
class ScenarioConfig:
    """Fully parsed scenario: specs only, no live simulation state."""

    plant: dict
    trajectory: ToolTrajectory
    ik: AffineIk | None
    growth: GrowthConfig
    adapt: AdaptConfig
    sliding: list[SlidingConfig]
    duration: float
    control_period: float = 1e-3
    plant_dt: float = 1e-4
    dt_mode: str = "synthetic"
    synthetic_dt: float = 0.0
    seed: int = 0
    warm_start: list[str] | None = None
    supervisory: str = "hitting_only"
    error_derivs: str = "exact"

    def __post_init__(self):
        if self.duration <= 0:
            raise ConfigError(f"duration must be > 0, got {self.duration}")
        if self.control_period <= 0 or self.plant_dt <= 0:
            raise ConfigError("control_period and plant_dt must be > 0")
        sub = self.control_period / self.plant_dt
        if abs(sub - round(sub)) > 1e-9 or round(sub) < 1:
            raise ConfigError(
                f"plant_dt {self.plant_dt} must divide control_period {self.control_period}"
            )
        if self.dt_mode not in DT_MODES:
            raise ConfigError(f"dt_mode must be one of {DT_MODES}, got {self.dt_mode!r}")
        if self.synthetic_dt < 0:
            raise ConfigError(f"synthetic dt value must be >= 0, got {self.synthetic_dt}")
        if self.supervisory not in SUPERVISORY_MODES:
            raise ConfigError(
                f"supervisory must be one of {SUPERVISORY_MODES}, got {self.supervisory!r}"
            )
        if self.error_derivs not in ERROR_DERIV_MODES:
            raise ConfigError(
                f"error_derivs must be one of {ERROR_DERIV_MODES}, got {self.error_derivs!r}"
            )
        dof = self.plant["dof"]
        if len(self.sliding) != dof:
            raise ConfigError(
                f"need one sliding spec per joint ({dof}), got {len(self.sliding)}"
            )
        for j, sc in enumerate(self.sliding):
            # built-in plants are second order: k = [k_1, k_2]
            if sc.n != 2:
                raise ConfigError(
                    f"sliding[{j}]: gain vector k needs exactly 2 entries for the "
                    f"built-in second-order plants, got {sc.n}"
                )
        if self.trajectory.kind in TOOL_KINDS and dof != 3:
            raise ConfigError(
                f"tool-space trajectories need the 3-joint surrogate plant, got dof {dof}"
            )
        if self.warm_start is not None and len(self.warm_start) != dof:
            raise ConfigError(
                f"warm_start needs one file per joint ({dof}), got {len(self.warm_start)}"
            )

    @property
    def dof(self) -> int:
        return self.plant["dof"]

    @property
    def substeps(self) -> int:
        return int(round(self.control_period / self.plant_dt))

    @property
    def num_steps(self) -> int:
        return int(round(self.duration / self.control_period))


TOP_LEVEL_KEYS = (
    "plant",
    "trajectory",
    "growth",
    "adapt",
    "sliding",
    "control_period",
    "plant_dt",
    "duration",
    "dt_mode",
    "seed",
    "warm_start",
    "supervisory",
    "error_derivs",
)


def parse_scenario(data: dict) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a plain mapping."""
    data = _require_mapping(data, "scenario")
    data = _take(data, TOP_LEVEL_KEYS, "scenario")
    for key in ("plant", "trajectory", "duration"):
        if key not in data:
            raise ConfigError(f"scenario is missing required key {key!r}")

    duration = float(data["duration"])
    control_period = float(data.get("control_period", 1e-3))
    plant = _parse_plant(data["plant"])
    trajectory, ik = _parse_trajectory(data["trajectory"], duration)

    growth_raw = _require_mapping(data.get("growth", {}), "growth")
    growth_spec = dict(DEFAULT_GROWTH)
    growth_spec.update(_take(growth_raw, DEFAULT_GROWTH.keys(), "growth"))
    _numeric(growth_spec, ("R_max", "t_max", "E_th", "Gamma_th", "C_th", "sigma_c"), "growth")
    if not isinstance(growth_spec["clamp_error"], bool):
        raise ConfigError(
            f"growth.clamp_error must be a boolean, got {growth_spec['clamp_error']!r}"
        )
    try:
        growth = GrowthConfig(**growth_spec)
    except ValueError as exc:
        raise ConfigError(f"growth: {exc}") from exc

    adapt_raw = _require_mapping(data.get("adapt", {}), "adapt")
    adapt_spec = dict(DEFAULT_ADAPT)
    adapt_spec.update(_take(adapt_raw, DEFAULT_ADAPT.keys(), "adapt"))
    _numeric(adapt_spec, ("eta_xi", "eta_m", "max_delta"), "adapt")
    try:
        adapt = AdaptConfig(update_dt=control_period, **adapt_spec)
    except ValueError as exc:
        raise ConfigError(f"adapt: {exc}") from exc

    sliding_raw = data.get("sliding", {})
    dof = plant["dof"]
    if isinstance(sliding_raw, list):
        sliding = [
            _parse_sliding_one(item, f"sliding[{i}]") for i, item in enumerate(sliding_raw)
        ]
    else:
        one = _parse_sliding_one(sliding_raw, "sliding")
        sliding = [one] * dof

    dt_mode_raw = data.get("dt_mode", "synthetic")
    if isinstance(dt_mode_raw, dict):
        dt_spec = _take(dt_mode_raw, ("mode", "value"), "dt_mode")
        dt_mode = dt_spec.get("mode", "synthetic")
        synthetic_dt = float(dt_spec.get("value", 0.0))
    else:
        dt_mode = dt_mode_raw
        synthetic_dt = 0.0

    warm_start = data.get("warm_start")
    if warm_start is not None:
        if isinstance(warm_start, str):
            warm_start = [warm_start] * dof
        elif isinstance(warm_start, list) and all(isinstance(p, str) for p in warm_start):
            warm_start = list(warm_start)
        else:
            raise ConfigError("warm_start must be a path or a list of per-joint paths")

    return ScenarioConfig(
        plant=plant,
        trajectory=trajectory,
        ik=ik,
        growth=growth,
        adapt=adapt,
        sliding=sliding,
        duration=duration,
        control_period=control_period,
        plant_dt=float(data.get("plant_dt", 1e-4)),
        dt_mode=dt_mode,
        synthetic_dt=synthetic_dt,
        seed=int(data.get("seed", 0)),
        warm_start=warm_start,
        supervisory=data.get("supervisory", "hitting_only"),
        error_derivs=data.get("error_derivs", "exact"),
    )


def load_scenario(path) -> ScenarioConfig:
    """Parse a scenario file: .json via the json module, anything else as YAML.

    The split matters for exponent literals: YAML 1.1 reads 1e-6 as a string,
    while JSON reads it as a number."""
    with open(path, "r", encoding="utf-8") as fh:
        if str(path).endswith(".json"):
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
        else:
            try:
                data = yaml.safe_load(fh)
            except yaml.YAMLError as exc:
                raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    if data is None:
        raise ConfigError(f"{path}: empty scenario file")
    try:
        return parse_scenario(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def build_plant(cfg: ScenarioConfig):
    """Fresh plant instance from the parsed plant mapping; never reuses run state."""
    spec = cfg.plant
    disturbance = build_disturbance(
        spec.get("disturbance"), cfg.plant_dt, cfg.duration, cfg.seed
    )
    if spec["kind"] == "surrogate_3psp":
        return surrogate_3joint(
            m=spec["m"], b=spec["b"], g=spec["g"],
            q0=spec["q0"], qd0=spec["qd0"], disturbance=disturbance,
        )
    cp, cv, cs, c0 = spec["coeff_pos"], spec["coeff_vel"], spec["coeff_sin"], spec["const"]

    def f_n(X, u):
        return cp * X[0] + cv * X[1] + cs * np.sin(X[0]) + c0

    kwargs = {} if disturbance is None else {"disturbance": disturbance}
    return NonlinearPlant(
        n=2, f_n=f_n, h=spec["h"], state=np.asarray(spec["x0"], dtype=float), **kwargs
    )


def nominal_joint_dynamics(cfg: ScenarioConfig, joint: int):
    """Per-joint nominal model (f_n callable, input gain) for the
    equivalent controller; exact for both built-in plants."""
    spec = cfg.plant
    if spec["kind"] == "surrogate_3psp":
        m = spec["m"][joint]
        b = spec["b"][joint]
        g = spec["g"][joint]

        def f_n(X, u):
            return (-b * X[1] - g * np.sin(X[0])) / m

        return f_n, 1.0 / m
    cp, cv, cs, c0 = spec["coeff_pos"], spec["coeff_vel"], spec["coeff_sin"], spec["const"]

    def f_n(X, u):
        return cp * X[0] + cv * X[1] + cs * np.sin(X[0]) + c0

    return f_n, spec["h"]
