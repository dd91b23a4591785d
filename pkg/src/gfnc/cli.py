"""Command-line front end.

run        simulate one scenario file, write trace/growth/summary artifacts
batch      simulate every scenario file in a directory
inspect    print the summary statistics of a recorded trace.csv
save-net   simulate a scenario and keep only the trained network snapshots
load-net   validate a network file and print its shape
report     render the standard figure set from a recorded trace.csv
"""

from __future__ import annotations

import argparse
import os
import sys

from .harness import (
    SimulationDiverged,
    emit_trace,
    read_trace,
    run_scenario,
    save_networks,
    summarize_trace,
)
from .network import NetworkFormatError, load_network
from .scenario import ConfigError, load_scenario


def _run_one(config_path, out_dir, save_nets: bool, plots: bool) -> int:
    cfg = load_scenario(config_path)
    try:
        trace = run_scenario(cfg)
    except SimulationDiverged as exc:
        emit_trace(exc.trace, out_dir)
        print(f"error: {exc} (partial trace written to {out_dir})", file=sys.stderr)
        return 1
    emit_trace(trace, out_dir)
    if save_nets:
        save_networks(trace, out_dir)
    if plots:
        from .report import render_report

        render_report(trace, out_dir)
    for key, value in trace.summary.items():
        print(f"{key} = {value}")
    print(f"wrote {os.path.join(out_dir, 'trace.csv')}")
    return 0


def _cmd_run(args) -> int:
    return _run_one(args.config, args.out, args.save_nets, args.plots)


def _cmd_batch(args) -> int:
    names = sorted(
        f for f in os.listdir(args.configs) if f.endswith((".yaml", ".yml", ".json"))
    )
    if not names:
        print(f"error: no scenario files in {args.configs}", file=sys.stderr)
        return 1
    status = 0
    for name in names:
        stem = os.path.splitext(name)[0]
        out_dir = os.path.join(args.out, stem)
        print(f"== {name} -> {out_dir}")
        code = _run_one(os.path.join(args.configs, name), out_dir, args.save_nets, args.plots)
        status = status or code
    return status


def _cmd_inspect(args) -> int:
    trace = read_trace(args.trace)
    for key, value in summarize_trace(trace).items():
        print(f"{key} = {value}")
    return 0


def _cmd_save_net(args) -> int:
    cfg = load_scenario(args.config)
    trace = run_scenario(cfg)
    for path in save_networks(trace, args.out):
        print(f"wrote {path}")
    return 0


def _cmd_load_net(args) -> int:
    net = load_network(args.net)
    print(f"input dimension n = {net.n}")
    print(f"nodes R = {net.R}")
    for k, node in enumerate(net.nodes):
        print(f"node {k}: m = {node.m.tolist()}, sigma = {node.sigma.tolist()}, xi = {node.xi}")
    return 0


def _cmd_report(args) -> int:
    from .report import render_report_from_csv

    for path in render_report_from_csv(args.trace, args.out):
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gfnc",
        description="Closed-loop simulation of a growing fuzzy-neural controller",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario")
    p.add_argument("--config", required=True, help="scenario file (YAML or JSON)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--save-nets", action="store_true", help="also write network snapshots")
    p.add_argument("--plots", action="store_true", help="also render the figure set")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("batch", help="simulate every scenario in a directory")
    p.add_argument("--configs", required=True, help="directory of scenario files")
    p.add_argument("--out", required=True, help="output root (one subdirectory per scenario)")
    p.add_argument("--save-nets", action="store_true")
    p.add_argument("--plots", action="store_true")
    p.set_defaults(func=_cmd_batch)

    p = sub.add_parser("inspect", help="print summary statistics of a trace")
    p.add_argument("--trace", required=True, help="trace.csv path")
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("save-net", help="run a scenario, keep only trained networks")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_save_net)

    p = sub.add_parser("load-net", help="validate and describe a network file")
    p.add_argument("--net", required=True, help="network JSON path")
    p.set_defaults(func=_cmd_load_net)

    p = sub.add_parser("report", help="render figures from a recorded trace")
    p.add_argument("--trace", required=True, help="trace.csv path")
    p.add_argument("--out", required=True, help="directory for the PNG files")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, NetworkFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
