"""Render figures from a recorded trace.

Plots are produced offline from the CSV files, never during the simulation
loop; the Agg backend keeps this usable on headless machines.  Each figure
goes to its own PNG so reports can embed them selectively.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be fixed first)

from .harness import PER_JOINT_COLUMNS, SimTrace, read_trace


def _dof(trace: SimTrace) -> int:
    return (len(trace.columns) - 1) // len(PER_JOINT_COLUMNS)


def _save(fig, out_dir, name, written):
    path = os.path.join(out_dir, name)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)


def render_report(trace: SimTrace, out_dir) -> list[str]:
    """Write the standard figure set for one trace; returns the file paths."""
    os.makedirs(out_dir, exist_ok=True)
    dof = _dof(trace)
    t = trace.rows[:, 0]
    written: list[str] = []

    fig, axes = plt.subplots(dof, 1, figsize=(8, 2.4 * dof), sharex=True, squeeze=False)
    for j in range(1, dof + 1):
        ax = axes[j - 1, 0]
        ax.plot(t, trace.column(f"q_c_{j}"), label="desired", lw=1.2)
        ax.plot(t, trace.column(f"q_{j}"), label="actual", lw=0.9)
        ax.set_ylabel(f"joint {j}")
        ax.legend(loc="upper right", fontsize=8)
    axes[-1, 0].set_xlabel("t [s]")
    fig.suptitle("Desired vs actual joint positions")
    _save(fig, out_dir, "tracking.png", written)

    fig, ax = plt.subplots(figsize=(8, 3))
    for j in range(1, dof + 1):
        ax.plot(t, trace.column(f"e_{j}"), lw=0.9, label=f"joint {j}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("tracking error")
    ax.legend(fontsize=8)
    fig.suptitle("Tracking error")
    _save(fig, out_dir, "error.png", written)

    fig, ax = plt.subplots(figsize=(8, 3))
    for j in range(1, dof + 1):
        ax.step(t, trace.column(f"R_{j}"), where="post", lw=1.0, label=f"joint {j}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("node count R")
    ax.legend(fontsize=8)
    fig.suptitle("Hidden-node count over the run")
    _save(fig, out_dir, "node_count.png", written)

    fig, ax = plt.subplots(figsize=(8, 3))
    for j in range(1, dof + 1):
        ax.plot(t, trace.column(f"s_{j}"), lw=0.9, label=f"joint {j}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("sliding value s")
    ax.legend(fontsize=8)
    fig.suptitle("Sliding value")
    _save(fig, out_dir, "sliding.png", written)

    fig, axes = plt.subplots(dof, 1, figsize=(8, 2.4 * dof), sharex=True, squeeze=False)
    for j in range(1, dof + 1):
        ax = axes[j - 1, 0]
        ax.plot(t, trace.column(f"u_fnn_{j}"), lw=0.9, label="network")
        ax.plot(t, trace.column(f"u_sup_{j}"), lw=0.9, label="supervisory")
        ax.plot(t, trace.column(f"u_total_{j}"), lw=0.7, ls="--", label="total")
        ax.set_ylabel(f"joint {j}")
        ax.legend(loc="upper right", fontsize=8)
    axes[-1, 0].set_xlabel("t [s]")
    fig.suptitle("Control components")
    _save(fig, out_dir, "control.png", written)

    return written


def render_report_from_csv(csv_path, out_dir) -> list[str]:
    return render_report(read_trace(csv_path), out_dir)
