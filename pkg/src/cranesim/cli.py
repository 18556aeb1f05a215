"""Command-line front end: `simulate`, `verify` and `stability` subcommands.

Exit codes:
    0  success
    1  invalid configuration / grid specification
    2  simulation aborted (model validity violated mid-run)
    3  closed-form dynamics disagree with the Lagrangian oracle
    4  stability sweep found non-stable grid points

Set CRANESIM_LOG=debug|info|warning|error to control verbosity.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

log = logging.getLogger("cranesim")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cranesim",
        description="Boom-crane simulation, verification and stability analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write CSV telemetry")
    sim.add_argument("--config", required=True, help="scenario JSON file")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--no-plots", action="store_true",
                     help="skip figure rendering (per-series CSVs are still written)")

    ver = sub.add_parser("verify", help="check the closed-form dynamics "
                                        "against the Lagrangian oracle")
    ver.add_argument("--states", type=int, default=100, help="number of random states")
    ver.add_argument("--seed", type=int, default=42, help="RNG seed for the state set")
    ver.add_argument("--tolerance", type=float, default=1e-6,
                     help="max allowed relative deviation")
    ver.add_argument("--out", default="verify_out", help="report output directory")
    ver.add_argument("--mutate", default=None,
                     help="fault-injection hook, e.g. flip-sign:row=2,term=gravity")

    st = sub.add_parser("stability", help="sweep the sway linearization "
                                          "over a (beta, d) grid")
    st.add_argument("--config", required=True,
                    help="scenario JSON file providing crane parameters and gains")
    st.add_argument("--grid", required=True,
                    help="grid spec, e.g. beta=0.05:1.5:51,d=0.5:20:51")
    st.add_argument("--out", default="stability_out", help="output directory")
    st.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("CRANESIM_LOG", "warning").lower()
    level = {"debug": logging.DEBUG, "info": logging.INFO,
             "warning": logging.WARNING, "error": logging.ERROR}.get(
        level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s",
                        force=True)


def _cmd_simulate(args) -> int:
    from .config import ConfigError, load_scenario
    from .engine import SimulationAbort, metrics, run
    from .plots import write_trajectory_report

    try:
        scenario = load_scenario(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    log.info("running scenario %r (%.1f s at dt=%g)", scenario.name,
             scenario.sim.duration, scenario.sim.dt)
    try:
        traj = run(scenario.sim, scenario.controller(), scenario.params)
    except SimulationAbort as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return 2

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    traj.write_csv(outdir / "trajectory.csv")
    m = metrics(traj, scenario.reference)
    m.write_csv(outdir / "metrics.csv")
    write_trajectory_report(traj, scenario.reference, outdir / "plots",
                            render=not args.no_plots)
    for name, value in m.rows():
        print(f"{name} = {value:.6g}")
    log.info("artifacts written to %s", outdir)
    return 0


def _cmd_verify(args) -> int:
    from .dynamics import forward_dynamics
    from .oracle import (MutationSpec, OracleConfig, oracle_accelerations,
                         sample_states, term_diff_report)

    mutation = None
    if args.mutate is not None:
        try:
            mutation = MutationSpec.parse(args.mutate)
        except ValueError as exc:
            print(f"invalid mutation spec: {exc}", file=sys.stderr)
            return 1
    if args.states < 1:
        print("--states must be at least 1", file=sys.stderr)
        return 1

    from .config import default_parameters
    params = default_parameters()
    cfg = OracleConfig()
    states, inputs = sample_states(args.states, seed=args.seed)

    worst = 0.0
    for state, u in zip(states, inputs):
        qdd_oracle = oracle_accelerations(state, u, params, cfg)
        if mutation is None:
            qdd_closed = forward_dynamics(state, u, None, params)
        else:
            from . import _kernels
            M, C, G = _kernels.eval_matrices(state.q, state.qdot, params.packed())
            M, C, G = mutation.apply(M, C, G)
            from .dynamics import INPUT_MATRIX
            qdd_closed = np.linalg.solve(M, INPUT_MATRIX @ u - C @ state.qdot - G)
        rel = np.max(np.abs(qdd_closed - qdd_oracle)
                     / np.maximum(1.0, np.abs(qdd_oracle)))
        worst = max(worst, float(rel))

    report = term_diff_report(states, params, inputs, cfg, mutation=mutation)
    outdir = Path(args.out)
    report.write_csv(outdir / "term_diff.csv")

    by_row = report.max_rel_by_row()
    print(f"states: {args.states}  seed: {args.seed}")
    print(f"max relative acceleration deviation: {worst:.3e} "
          f"(tolerance {args.tolerance:.1e})")
    for i, name in enumerate(["slew", "luff", "rope", "sway_tangential", "sway_radial"]):
        print(f"row {i} ({name}): max relative residual {by_row[i]:.3e}")
    print(f"report: {outdir / 'term_diff.csv'}")
    if worst >= args.tolerance:
        print("VERDICT: closed form and oracle DISAGREE", file=sys.stderr)
        return 3
    print("VERDICT: closed form matches the oracle")
    return 0


def _parse_grid(spec: str):
    """Parse 'beta=lo:hi:n,d=lo:hi:n' into two linspaces."""
    axes = {}
    for part in spec.split(","):
        name, _, rng = part.partition("=")
        name = name.strip()
        if name not in ("beta", "d"):
            raise ValueError(f"unknown grid axis {name!r} (expected beta and d)")
        pieces = rng.split(":")
        if len(pieces) != 3:
            raise ValueError(f"axis {name!r} must be lo:hi:count, got {rng!r}")
        lo, hi, count = float(pieces[0]), float(pieces[1]), int(pieces[2])
        if count < 1:
            raise ValueError(f"axis {name!r} needs at least one point")
        if name == "d" and lo <= 0.0:
            raise ValueError("rope length grid must stay positive")
        axes[name] = np.linspace(lo, hi, count)
    if set(axes) != {"beta", "d"}:
        raise ValueError("grid spec must define both beta and d")
    return axes["beta"], axes["d"]


def _cmd_stability(args) -> int:
    from .config import ConfigError, load_scenario
    from .plots import write_stability_report
    from .stability import Verdict, stability_map

    try:
        scenario = load_scenario(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        betas, ds = _parse_grid(args.grid)
    except ValueError as exc:
        print(f"invalid grid spec: {exc}", file=sys.stderr)
        return 1

    points = stability_map(scenario.params, scenario.gains, betas, ds)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "stability_map.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "d", "verdict", "max_real_eigenvalue"])
        for pt in points:
            w.writerow([f"{pt.beta:.17g}", f"{pt.d:.17g}", str(pt.verdict),
                        f"{pt.max_real_eigenvalue:.17g}"])
    write_stability_report(points, outdir, render=not args.no_plots)

    counts = {v: 0 for v in Verdict}
    for pt in points:
        counts[pt.verdict] += 1
    print(f"grid points: {len(points)}  stable: {counts[Verdict.STABLE]}  "
          f"marginal: {counts[Verdict.MARGINAL]}  unstable: {counts[Verdict.UNSTABLE]}")
    print(f"map: {outdir / 'stability_map.csv'}")
    if counts[Verdict.MARGINAL] or counts[Verdict.UNSTABLE]:
        return 4
    return 0


def main(argv=None) -> int:
    _configure_logging()
    args = _build_parser().parse_args(argv)
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "verify":
        return _cmd_verify(args)
    return _cmd_stability(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
