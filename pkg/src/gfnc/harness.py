"""Closed-loop simulation: reference in, trace out.

One run owns all mutable state (plant, per-joint networks, error trackers)
and executes a fixed step order per control period:

  1. sample reference and its derivatives
  2. update the error state
  3. compute the sliding value s
  4. evaluate the network -> (u_fnn, firing strengths)
  5. growth check
  6. re-evaluate firing strengths if a node was added
  7. supervisory term
  8. u_total = u_fnn + u_sup
  9. advance the plant one control period via fixed RK4 sub-steps
  10. parameter adaptation

Steps 1-8 run per joint before the single shared plant advance; adaptation
follows the advance so the growth check of the same step saw the network the
adaptation will train.  In synthetic-dt mode the whole trace is a pure
function of the config, byte for byte.
"""

from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .adapt import adapt_step
from .growth import GrowthObservation, add_score, maybe_grow
from .network import FnnNetwork, load_network, save_network
from .plants import DecoupledJoints, DivergenceError, NonlinearPlant, integrate_step
from .scenario import ConfigError, ScenarioConfig, build_plant, nominal_joint_dynamics
from .sliding import ErrorTracker, equivalent_control, hitting_control, lyapunov_check, sliding_value
from .trajectories import joint_reference

PER_JOINT_COLUMNS = (
    "q_c", "q", "e", "s", "u_fnn", "u_sup", "u_total", "R", "C_add", "V", "V_dot_est",
)


def trace_columns(dof: int) -> list[str]:
    cols = ["t"]
    for j in range(1, dof + 1):
        cols.extend(f"{name}_{j}" for name in PER_JOINT_COLUMNS)
    return cols


@dataclass(frozen=True)
class GrowthEvent:
    """One node addition: when, which joint, the score that triggered it."""

    step: int
    t: float
    joint: int
    C_add: float
    C_R: float
    C_t: float
    C_e: float
    C_Gamma: float
    R_after: int


@dataclass
class SimTrace:
    """Complete run record: per-step rows, growth log, summary, final nets."""

    columns: list[str]
    rows: np.ndarray
    growth_events: list[GrowthEvent]
    summary: dict
    networks: list[FnnNetwork] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise KeyError(f"no column {name!r} in trace") from None
        return self.rows[:, idx]


class SimulationDiverged(RuntimeError):
    """Plant state went non-finite; carries the rows recorded so far."""

    def __init__(self, step: int, t: float, trace: SimTrace):
        super().__init__(f"state diverged at step {step} (t = {t:.6g} s)")
        self.step = step
        self.t = t
        self.trace = trace


def warm_start(cfg: ScenarioConfig, paths) -> list[FnnNetwork]:
    """Load per-joint networks for a warm start, enforcing input-dimension fit."""
    networks = []
    for j, path in enumerate(paths):
        net = load_network(path)
        expected = cfg.sliding[j].n
        if net.n != expected:
            raise ConfigError(
                f"warm-start network for joint {j + 1} has input dimension "
                f"{net.n}, controller expects {expected}"
            )
        networks.append(net)
    return networks


def _joint_states(plant):
    """Per-joint (position, velocity) vectors at the current plant state."""
    if isinstance(plant, NonlinearPlant):
        return plant.state[0:1].copy(), plant.state[1:2].copy()
    return plant.theta.copy(), plant.theta_dot.copy()


def run_scenario(cfg: ScenarioConfig, networks: list[FnnNetwork] | None = None) -> SimTrace:
    """Execute one scenario and return its trace.

    networks, when given, override any warm_start paths in the config (the
    list is used as-is, one per joint).  Fresh plant and tracker state are
    built here every call, so re-running the same config reproduces the
    trace exactly in synthetic-dt mode.
    """
    dof = cfg.dof
    plant = build_plant(cfg)
    if networks is not None:
        if len(networks) != dof:
            raise ConfigError(f"need {dof} networks, got {len(networks)}")
        networks = list(networks)
    elif cfg.warm_start is not None:
        networks = warm_start(cfg, cfg.warm_start)
    else:
        networks = [FnnNetwork(n=cfg.sliding[j].n) for j in range(dof)]

    sliding_cfgs = list(cfg.sliding)
    if cfg.supervisory == "full_smc":
        # wire each joint's nominal model into its equivalent controller
        nominal = [nominal_joint_dynamics(cfg, j) for j in range(dof)]
        sliding_cfgs = [
            replace(sc, f_n=nominal[j][0]) for j, sc in enumerate(sliding_cfgs)
        ]

    trackers = [ErrorTracker(sc.n, cfg.control_period) for sc in sliding_cfgs]
    order = max(sc.n for sc in sliding_cfgs)

    num_steps = cfg.num_steps
    substeps = cfg.substeps
    columns = trace_columns(dof)
    rows = np.empty((num_steps, len(columns)))
    growth_events: list[GrowthEvent] = []
    lyap_violations = 0

    s_prev = np.zeros(dof)
    u_prev = np.zeros(dof)
    loop_started = None  # wall-clock stamp of the previous loop, measured mode

    for step in range(num_steps):
        t = step * cfg.control_period
        if cfg.dt_mode == "measured":
            now = time.perf_counter()
            growth_dt = 0.0 if loop_started is None else now - loop_started
            loop_started = now
        else:
            growth_dt = cfg.synthetic_dt

        ref = joint_reference(cfg.trajectory, t, order, ik=cfg.ik, dof=dof)
        q, qd = _joint_states(plant)

        u_total = np.empty(dof)
        row = rows[step]
        row[0] = t
        adapt_args = []

        for j in range(dof):
            sc = sliding_cfgs[j]
            e = float(ref.derivs[j, 0] - q[j])
            if cfg.error_derivs == "exact":
                exact = ref.derivs[j, : sc.n].copy()
                exact[0] -= q[j]
                exact[1] -= qd[j]
                err = trackers[j].update(e, exact_derivs=exact)
            else:
                err = trackers[j].update(e)
            s = sliding_value(err, sc)

            net = networks[j]
            u_fnn, gamma = net.evaluate(err.derivs)
            obs = GrowthObservation(
                R_cur=net.R,
                dt=growth_dt,
                err=abs(e),
                gamma_max=float(gamma.max()) if net.R else 0.0,
            )
            score, parts = add_score(obs, cfg.growth)
            if maybe_grow(net, err.derivs, obs, cfg.growth):
                growth_events.append(
                    GrowthEvent(
                        step=step, t=t, joint=j + 1, C_add=score,
                        C_R=parts[0], C_t=parts[1], C_e=parts[2], C_Gamma=parts[3],
                        R_after=net.R,
                    )
                )
                u_fnn, gamma = net.evaluate(err.derivs)

            if cfg.supervisory == "off":
                u_sup = 0.0
            elif cfg.supervisory == "hitting_only":
                u_sup = hitting_control(s, sc)
            else:
                f_value = sc.f_n(np.array([q[j], qd[j]]), u_prev[j])
                u_sup = equivalent_control(err, ref.derivs[j], f_value, sc) + hitting_control(
                    s, sc
                )
            u_total[j] = u_fnn + u_sup

            if step == 0:
                v = 0.5 * s * s
                v_dot = 0.0
            else:
                v, v_dot, ok = lyapunov_check(s, s_prev[j], cfg.control_period)
                if not ok:
                    lyap_violations += 1
            s_prev[j] = s

            base = 1 + j * len(PER_JOINT_COLUMNS)
            row[base : base + len(PER_JOINT_COLUMNS)] = (
                ref.derivs[j, 0], q[j], e, s, u_fnn, u_sup, u_total[j],
                net.R, score, v, v_dot,
            )
            adapt_args.append((net, err.derivs, s, gamma))

        u_in = float(u_total[0]) if isinstance(plant, NonlinearPlant) else u_total
        try:
            for sub in range(substeps):
                integrate_step(plant, t + sub * cfg.plant_dt, u_in, cfg.plant_dt)
        except DivergenceError as exc:
            partial = SimTrace(
                columns=columns,
                rows=rows[: step + 1].copy(),
                growth_events=growth_events,
                summary={},
                networks=networks,
            )
            raise SimulationDiverged(step, exc.t, partial) from exc

        for net, z, s, gamma in adapt_args:
            adapt_step(net, z, s, gamma, cfg.adapt)
        u_prev = u_total

    summary = _summarize(columns, rows, networks, lyap_violations, cfg)
    return SimTrace(
        columns=columns, rows=rows, growth_events=growth_events,
        summary=summary, networks=networks,
    )


def _summarize(columns, rows, networks, lyap_violations, cfg) -> dict:
    """Per-joint tracking statistics plus the stability-monitor count."""
    summary: dict = {}
    t = rows[:, 0]
    early = t < 0.5
    if not early.any():
        early = np.ones(len(rows), dtype=bool)
    for j in range(len(networks)):
        e = rows[:, columns.index(f"e_{j + 1}")]
        summary[f"rmse_{j + 1}"] = float(np.sqrt(np.mean(e * e)))
        summary[f"final_R_{j + 1}"] = networks[j].R
        summary[f"max_abs_e_{j + 1}"] = float(np.max(np.abs(e)))
        summary[f"undershoot_peak_{j + 1}"] = float(np.max(np.abs(e[early])))
    summary["lyapunov_violations"] = lyap_violations
    return summary


# --- artifacts ---------------------------------------------------------------


def _fmt(x: float) -> str:
    return "%.17g" % x


def emit_trace(trace: SimTrace, out_dir) -> None:
    """Write trace.csv, growth_events.csv and summary.txt under out_dir.

    Reals carry 17 significant digits, enough to round-trip float64 exactly;
    identical traces therefore produce byte-identical files.
    """
    os.makedirs(out_dir, exist_ok=True)
    trace_path = os.path.join(out_dir, "trace.csv")
    with open(trace_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(trace.columns) + "\n")
        for row in trace.rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")

    events_path = os.path.join(out_dir, "growth_events.csv")
    with open(events_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("step,t,joint,C_add,C_R,C_t,C_e,C_Gamma,R_after\n")
        for ev in trace.growth_events:
            fh.write(
                f"{ev.step},{_fmt(ev.t)},{ev.joint},{_fmt(ev.C_add)},{_fmt(ev.C_R)},"
                f"{_fmt(ev.C_t)},{_fmt(ev.C_e)},{_fmt(ev.C_Gamma)},{ev.R_after}\n"
            )

    summary_path = os.path.join(out_dir, "summary.txt")
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        for key, value in trace.summary.items():
            fh.write(f"{key} = {value if isinstance(value, int) else _fmt(value)}\n")


def save_networks(trace: SimTrace, out_dir) -> list[str]:
    """Snapshot each joint's final network as a warm-start file."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for j, net in enumerate(trace.networks):
        path = os.path.join(out_dir, f"net_joint_{j + 1}.json")
        save_network(net, path)
        paths.append(path)
    return paths


def read_trace(csv_path) -> SimTrace:
    """Load a trace.csv back into a SimTrace (rows and columns only)."""
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            columns = next(reader)
        except StopIteration:
            raise ValueError(f"{csv_path}: empty trace file") from None
        data = [[float(x) for x in row] for row in reader if row]
    rows = np.asarray(data, dtype=float).reshape(len(data), len(columns))
    return SimTrace(columns=columns, rows=rows, growth_events=[], summary={})


def summarize_trace(trace: SimTrace) -> dict:
    """Recompute the summary statistics from trace rows alone (no growth log,
    no Lyapunov count; used by the inspect command on re-read traces)."""
    dof = (len(trace.columns) - 1) // len(PER_JOINT_COLUMNS)
    summary: dict = {}
    t = trace.rows[:, 0]
    early = t < 0.5
    if not early.any():
        early = np.ones(len(trace.rows), dtype=bool)
    for j in range(1, dof + 1):
        e = trace.column(f"e_{j}")
        summary[f"rmse_{j}"] = float(np.sqrt(np.mean(e * e)))
        summary[f"final_R_{j}"] = int(trace.column(f"R_{j}")[-1])
        summary[f"max_abs_e_{j}"] = float(np.max(np.abs(e)))
        summary[f"undershoot_peak_{j}"] = float(np.max(np.abs(e[early])))
    return summary
