"""Command-line scenario runner.

    gravgas run <config>             run_mode from the config
    gravgas collapse-time <config>   analytic collapse time only
    gravgas perturbation <config>    linear perturbation growth

Exit status: 0 on success, 2 when collapse or crossing happens before a
requested output time (the event time is written to summary.txt), 1 on a
configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from gravgas import slab, spherical
from gravgas.config import load_config
from gravgas.errors import BreakdownEvent, ConfigError, GravGasError, ShellCrossing
from gravgas.fields import SlabState, SphericalState
from gravgas.io import emit_snapshot, fmt, write_rows
from gravgas.lagrange_series import invert_series
from gravgas.oracles.perturbation import perturbation_growth
from gravgas.oracles.sheets import SheetSystem, sheet_density, sheet_integrate
from gravgas.oracles.shells import ShellSystem, shell_density, shell_integrate
from gravgas.profiles import cumulative_mass, planar_g

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EVENT = 2

DEFAULT_SHEETS = 1000


@dataclass
class Outcome:
    """What a run produced; ``lines`` become summary.txt."""

    status: int = EXIT_OK
    lines: list = field(default_factory=list)

    def add(self, key, value):
        self.lines.append(f"{key}: {fmt(value)}")

    def event(self, kind, time, requested):
        self.status = EXIT_EVENT
        self.add("status", kind)
        self.add("event_time", float(time) if time is not None else "unknown")
        self.add("requested_time", float(requested))


def _event_kind(exc):
    return "crossing" if "Crossing" in type(exc).__name__ else "collapse"


# -- analytic ---------------------------------------------------------------


def analytic_state(cfg, t, grid):
    """Exact state at ``t`` on ``grid``; raises a BreakdownEvent past collapse or crossing."""
    if cfg.geometry == "spherical":
        if cfg.density_kind == "constant":
            return spherical.homogeneous_state(float(cfg.density.values[0]), cfg.gamma, t, grid,
                                               guard=cfg.solver.kepler_guard, tol=cfg.solver.tol)
        return spherical.cold_collapse_state(cumulative_mass(cfg.density), cfg.gamma, t, grid,
                                             tol=cfg.solver.tol, guard=cfg.solver.kepler_guard)
    return slab.slab_state(cfg.density, cfg.velocity, cfg.gamma, t, grid, guard=cfg.solver.collapse_guard)


def analytic_collapse_time(cfg, grid=None):
    if cfg.geometry == "spherical":
        if cfg.density_kind == "constant":
            value = float(cfg.density.values[0])
            return spherical.homogeneous_collapse_time(value, cfg.gamma) if value > 0 else math.inf
        labels = cfg.grid() if grid is None else grid
        return spherical.collapse_time(cumulative_mass(cfg.density), cfg.gamma, labels)
    t_c = slab.collapse_time(cfg.density, cfg.velocity, cfg.gamma)
    return math.inf if t_c is None else t_c


def _series_check(cfg, state, out):
    order = cfg.solver.series_order
    if not order or cfg.geometry != "slab" or state.t == 0.0:
        return
    g = planar_g(cfg.density)
    handle = slab.SlabDisplacement(g, cfg.velocity, cfg.gamma, state.t)
    results = [invert_series(handle, x, order) for x in state.coord]
    dev = np.array([abs(r.value - f) for r, f in zip(results, state.labels)])
    n_conv = sum(r.converged for r in results)
    out.add(f"series_t={fmt(state.t)}", f"order {order}, converged {n_conv}/{len(results)}, "
                                         f"max |f_series - f_root| = {fmt(float(dev.max()))}")


def run_analytic(cfg, out_dir, out):
    grid = cfg.grid()
    for i, t in enumerate(cfg.times):
        try:
            state = analytic_state(cfg, t, grid)
        except BreakdownEvent as exc:
            out.event(_event_kind(exc), exc.time, t)
            out.add("snapshots_written", i)
            return
        emit_snapshot(state, out_dir / f"snapshot_{i}.csv")
        _series_check(cfg, state, out)
    out.add("status", "ok")
    out.add("snapshots_written", len(cfg.times))


# -- oracle -----------------------------------------------------------------


def _shell_labels(cfg):
    if cfg.oracle.n is None:
        return cfg.grid()
    lo, hi = cfg.grid_range
    pts = np.linspace(lo, hi, cfg.oracle.n + 1)
    return pts[1:] if lo == 0.0 else np.linspace(lo, hi, cfg.oracle.n)


def oracle_snapshots(cfg):
    """Oracle snapshots at the requested times.

    Returns ``(snapshots, event)`` where ``event`` is ``(kind, time, requested)``
    for the first requested time at or past a breakdown, else None.
    """
    times = cfg.times
    t_end = max(times)
    snaps = []
    if cfg.geometry == "spherical":
        m = cumulative_mass(cfg.density)
        system = ShellSystem.from_profile(m, cfg.gamma, _shell_labels(cfg))
        traj = shell_integrate(system, t_end, rtol=cfg.oracle.rtol, guard=cfg.oracle.guard)
        t_col = float(np.nanmin(traj.collapse_times)) if np.any(np.isfinite(traj.collapse_times)) else math.inf
        for t in times:
            if t >= traj.crossing_time:
                return snaps, ("crossing", traj.crossing_time, t)
            if t >= t_col:
                return snaps, ("collapse", t_col, t)
            try:
                r, v = traj.state(t)
            except ShellCrossing as exc:
                return snaps, ("crossing", exc.time, t)
            snaps.append(SphericalState(t, r, shell_density(r, system.masses), v, system.masses,
                                        labels=system.labels))
        return snaps, None

    n = cfg.oracle.n or DEFAULT_SHEETS
    system = SheetSystem.from_profile(cfg.density, cfg.velocity, cfg.gamma, n)
    run = sheet_integrate(system, t_end, output_times=times)
    first = run.events[0].time if run.events else math.inf
    total = float(np.sum(system.masses))
    below = np.concatenate([[0.0], np.cumsum(system.masses)[:-1]])
    g = below + 0.5 * system.masses - 0.5 * total
    for t, x, u in zip(run.times, run.positions, run.velocities):
        if t >= first:
            return snaps, ("crossing", first, t)
        snaps.append(SlabState(t, x, sheet_density(x, system.masses), u, g, labels=system.positions))
    return snaps, None


def run_oracle(cfg, out_dir, out):
    snaps, event = oracle_snapshots(cfg)
    for i, s in enumerate(snaps):
        emit_snapshot(s, out_dir / f"snapshot_{i}.csv")
    if event is not None:
        out.event(*event)
    else:
        out.add("status", "ok")
    out.add("snapshots_written", len(snaps))


# -- compare ----------------------------------------------------------------


def _deviation(oracle, exact):
    ok = np.isfinite(oracle) & np.isfinite(exact)
    o, e = oracle[ok], exact[ok]
    if o.size == 0:
        return math.nan, math.nan
    diff = o - e
    scale_max = float(np.max(np.abs(e)))
    scale_l2 = float(np.linalg.norm(e))
    max_dev = float(np.max(np.abs(diff)))
    l2_dev = float(np.linalg.norm(diff))
    return (max_dev / scale_max if scale_max > 0 else max_dev,
            l2_dev / scale_l2 if scale_l2 > 0 else l2_dev)


def compare_rows(cfg, snaps):
    """Per-time, per-field relative deviations of the oracle from the analytic solution."""
    tols = {"density": cfg.compare.density_tol, "velocity": cfg.compare.velocity_tol,
            "cumulative": cfg.compare.cumulative_tol}
    rows = []
    for s in snaps:
        pos = s.coord
        keep = np.isfinite(pos) & ((pos > 0) if cfg.geometry == "spherical" else True)
        exact = analytic_state(cfg, s.t, pos[keep])
        for name in ("density", "velocity", "cumulative"):
            mx, l2 = _deviation(getattr(s, name)[keep], getattr(exact, name))
            passed = bool(mx <= tols[name]) if math.isfinite(mx) else True
            rows.append((s.t, name, mx, l2, tols[name], passed))
    return rows


def run_compare(cfg, out_dir, out):
    grid = cfg.grid()
    requested_event = None
    for i, t in enumerate(cfg.times):
        try:
            emit_snapshot(analytic_state(cfg, t, grid), out_dir / f"snapshot_{i}.csv")
        except BreakdownEvent as exc:
            requested_event = (_event_kind(exc), exc.time, t)
            break
    snaps, oracle_event = oracle_snapshots(cfg)
    n_ok = len(cfg.times) if requested_event is None else cfg.times.index(requested_event[2])
    rows = compare_rows(cfg, snaps[:n_ok])
    write_rows(out_dir / "report.csv", ("t", "field", "max_rel_dev", "l2_rel_dev", "tolerance", "pass"), rows)
    passed = all(r[-1] for r in rows)
    if requested_event is not None:
        out.event(*requested_event)
    else:
        out.add("status", "ok")
    out.add("analytic_collapse_time", analytic_collapse_time(cfg))
    out.add("oracle_event", "none" if oracle_event is None else f"{oracle_event[0]} at {fmt(oracle_event[1])}")
    out.add("comparison_pass", passed)


# -- collapse time and perturbation -------------------------------------------


def run_collapse_time(cfg, out_dir, out):
    t_c = analytic_collapse_time(cfg)
    out.add("status", "ok")
    out.add("collapse_time", t_c if math.isfinite(t_c) else "none")
    if cfg.geometry == "spherical" and cfg.density_kind != "constant" and math.isfinite(t_c):
        m = cumulative_mass(cfg.density)
        t_x = spherical.shell_crossing_time(m, cfg.gamma, cfg.grid(), t_c * (1.0 - 1e-9))
        out.add("shell_crossing_before_collapse", t_x < t_c * (1.0 - 1e-6))


def _background_density(cfg):
    if cfg.perturbation.rho0 is not None:
        return cfg.perturbation.rho0
    return float(np.max(cfg.density.values))


def run_perturbation(cfg, out_dir, out):
    p = cfg.perturbation
    rho0 = _background_density(cfg)
    run = perturbation_growth(rho0, cfg.gamma, mode=p.mode, t_end=p.t_end, amplitude=p.amplitude,
                              rate=p.rate, sound_speed=p.sound_speed, wavenumber=p.wavenumber)
    write_rows(out_dir / "perturbation.csv", ("t", "rho", "rate"), zip(run.t, run.rho, run.rate))
    out.add("status", "ok")
    out.add("mode", p.mode)
    out.add("rho0", rho0)
    out.add("fitted_exponent", run.exponent)
    if p.mode == "gravitating":
        out.add("predicted_exponent", run.sigma)
        out.add("relative_error", abs(run.exponent - run.sigma) / run.sigma)


MODES = {
    "analytic": run_analytic,
    "oracle": run_oracle,
    "compare": run_compare,
    "collapse-time": run_collapse_time,
    "perturbation": run_perturbation,
}


def execute(cfg, mode=None):
    """Run a parsed scenario and write its outputs; returns the exit status."""
    mode = mode or cfg.run_mode
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = Outcome()
    out.add("geometry", cfg.geometry)
    out.add("run_mode", mode)
    out.add("gamma", cfg.gamma)
    MODES[mode](cfg, out_dir, out)
    (out_dir / "summary.txt").write_text("\n".join(out.lines) + "\n", encoding="ascii")
    return out.status


def build_parser():
    parser = argparse.ArgumentParser(prog="gravgas", description="Exact and oracle runs for self-gravitating cold gas.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "run the scenario's run_mode"),
                       ("collapse-time", "report the analytic collapse time"),
                       ("perturbation", "integrate linear perturbation growth")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="path to the scenario config file")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"gravgas: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    mode = {"run": None, "collapse-time": "collapse-time", "perturbation": "perturbation"}[args.command]
    try:
        status = execute(cfg, mode)
    except GravGasError as exc:
        print(f"gravgas: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for line in (Path(cfg.output_dir) / "summary.txt").read_text().splitlines():
        print(line)
    return status


if __name__ == "__main__":
    sys.exit(main())
