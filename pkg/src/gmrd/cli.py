"""Command-line harness: scenario runs, tcut sweeps, and file output.

Verbs: ``mesh`` (generate/inspect a disk mesh), ``run`` (one scenario),
``sweep`` (activation-time sweep), ``analyze`` (post-process an output
directory), ``fixedpoints`` (phase-plane report), ``scale`` (unit
conversion). All figures are emitted as plot-ready CSV. The environment
variable ``RD_THREADS`` caps sweep parallelism.

Exit codes: 0 success, 2 configuration error, 3 mesh error, 4 solver or
simulation failure, 1 anything else.
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import (
    decay_rate_fit,
    radial_phase_curve,
    radial_profile,
    summary_report,
    wavefront_radius,
)
from .assembly import annulus_source
from .config import parse_config
from .errors import ConfigError, GmrdError, MeshError, SimulationError, SolverError
from .kinetics import fixed_points, regime_type
from .mesh import build_disk_mesh, load_mesh, mesh_quality, save_mesh
from .presets import get_preset
from .scaling import PhysicalParams, dimensionalize, nondimensionalize
from .simulate import (
    ZERO_SOURCE_F,
    Schedule,
    default_snapshots,
    init_state,
    run,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MESH = 3
EXIT_SOLVER = 4
EXIT_OTHER = 1

ZERO_STATE = "zero_state"
NONZERO_STATE = "nonzero_state"

#: Terminal L2 cutoff separating the two attractors in a sweep.
ZERO_STATE_CUTOFF = 1e-3

#: Columns of the time-series CSV, in order.
SERIES_COLUMNS = ("t", "u_min", "u_max", "v_min", "v_max",
                  "l2_u", "l2_v", "ut_l2", "vt_l2", "grad_l2", "asymmetry")

FAILURE_MARKER = "FAILED"


def _threads():
    raw = os.environ.get("RD_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return max(1, n) if n > 0 else min(4, os.cpu_count() or 1)


def _fmt(x):
    return repr(float(x))


def _write_csv(path, header, rows, comments=()):
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _spec_from_args(args):
    """Resolve config file and/or preset plus CLI overrides into a spec."""
    if getattr(args, "config", None):
        spec = parse_config(Path(args.config).read_text())
    elif getattr(args, "preset", None):
        spec = parse_config(f"preset = {args.preset}")
    else:
        raise ConfigError("either --config or --preset is required")
    if getattr(args, "preset", None) and args.config:
        raise ConfigError("--config and --preset are mutually exclusive")
    return spec.with_overrides(
        dt=getattr(args, "dt", None),
        target_h=getattr(args, "h", None),
        t_end=getattr(args, "t_end", None),
        integrator=getattr(args, "integrator", None),
        out_dir=getattr(args, "out", None),
        tcut=getattr(args, "tcut", None),
    )


def _build_run(spec, mesh=None):
    """Materialize mesh, state and schedule for a spec."""
    if mesh is None:
        mesh = build_disk_mesh(spec.radius, spec.target_h)
    source = (annulus_source(spec.source_level, spec.source_radius)
              if spec.source_level > 0 else None)
    state = init_state(mesh, spec.params, spec.u0, spec.v0, source_f=source)
    events = ()
    if spec.tcut is not None:
        events = ((spec.tcut, ZERO_SOURCE_F),)
    schedule = Schedule(
        dt=spec.dt, t_end=spec.t_end,
        snapshot_times=default_snapshots(spec.t_end, n=spec.snapshots),
        events=events,
    )
    return mesh, state, schedule


def write_outputs(out_dir, spec, mesh, traj, n_bins):
    """Write mesh, snapshots, time series, profiles and summary to disk."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_mesh(mesh, out / "mesh.txt")

    for t, u, v in traj.snapshots:
        name = f"snapshot_t{t:.6f}.csv".replace("-", "m")
        rows = [(i, mesh.nodes[i, 0], mesh.nodes[i, 1], u[i], v[i])
                for i in range(mesh.n_nodes)]
        _write_csv(out / name, ("node", "x", "y", "u", "v"), rows,
                   comments=[f"t={t!r} preset={spec.preset or 'custom'}"])

    series_rows = zip(*(traj.series[c] for c in SERIES_COLUMNS))
    _write_csv(out / "timeseries.csv", SERIES_COLUMNS, series_rows)

    t_fin, u_fin, v_fin = traj.final()
    pu = radial_profile(mesh, u_fin, n_bins)
    pv = radial_profile(mesh, v_fin, n_bins)
    _write_csv(out / "profile_final.csv",
               ("r", "u_mean", "u_spread", "v_mean", "v_spread"),
               zip(pu.r_centers, pu.means, pu.spread, pv.means, pv.spread),
               comments=[f"t={t_fin!r}"])
    phase = radial_phase_curve(mesh, u_fin, v_fin, n_bins)
    _write_csv(out / "phase_final.csv", ("u", "v"), phase,
               comments=["ordered boundary -> center"])

    report = summary_report(mesh, spec.params, traj, n_bins=n_bins)
    (out / "summary.txt").write_text(report)
    return report


def run_scenario(spec, mesh=None):
    """Run one scenario and write all outputs; returns (trajectory, report).

    On failure a marker file is left in the output directory so partial
    outputs are recognizable.
    """
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    marker = out / FAILURE_MARKER
    try:
        mesh, state, schedule = _build_run(spec, mesh)
        traj = run(state, schedule, integrator=spec.integrator,
                   diagnostics_every=spec.diagnostics_every,
                   n_bins=spec.n_bins)
        report = write_outputs(out, spec, mesh, traj, spec.n_bins)
    except Exception as exc:
        marker.write_text(f"{type(exc).__name__}: {exc}\n")
        raise
    if marker.exists():
        marker.unlink()
    return traj, report


@dataclass(frozen=True)
class SweepEntry:
    tcut: float
    classification: str
    terminal_l2: float
    error: str = ""


@dataclass(frozen=True)
class SweepResult:
    """Per-tcut terminal classification plus the threshold bracket."""

    entries: tuple
    bracket: tuple    # (lo, hi) tightest adjacent pair with a flip, or None
    cutoff: float = ZERO_STATE_CUTOFF


def tcut_sweep(spec, tcut_list, mesh=None):
    """Run one scenario per activation time tcut, concurrently.

    Classification: terminal ||u||_2 < cutoff -> zero_state. A failed run
    voids only its own entry. The bracket is the tightest adjacent pair of
    successful runs whose classifications differ.
    """
    tcuts = [float(t) for t in tcut_list]
    if sorted(tcuts) != tcuts:
        raise ConfigError("tcut_list must be sorted")
    for t in tcuts:
        if not 0.0 <= t <= spec.t_end:
            raise ConfigError(f"tcut {t} outside [0, t_end]")
    if mesh is None:
        mesh = build_disk_mesh(spec.radius, spec.target_h)

    def one(tcut):
        sub = spec.with_overrides(
            tcut=tcut, out_dir=str(Path(spec.out_dir) / f"tcut_{tcut:g}")
        )
        try:
            traj, _ = run_scenario(sub, mesh=mesh)
        except GmrdError as exc:
            return SweepEntry(tcut, "", float("nan"), error=str(exc))
        l2 = float(traj.series["l2_u"][-1])
        cls = ZERO_STATE if l2 < ZERO_STATE_CUTOFF else NONZERO_STATE
        return SweepEntry(tcut, cls, l2)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        entries = tuple(pool.map(one, tcuts))

    bracket = None
    ok = [e for e in entries if not e.error]
    for lo, hi in zip(ok, ok[1:]):
        if lo.classification != hi.classification:
            if bracket is None or hi.tcut - lo.tcut < bracket[1] - bracket[0]:
                bracket = (lo.tcut, hi.tcut)
    return SweepResult(entries=entries, bracket=bracket)


def _cmd_mesh(args):
    mesh = build_disk_mesh(args.radius, args.h)
    q = mesh_quality(mesh)
    print(f"nodes={mesh.n_nodes} triangles={mesh.n_triangles} "
          f"boundary_edges={len(mesh.boundary_edges)}")
    print(f"h_max={q.h_max:.6g} h_min={q.h_min:.6g} "
          f"min_angle_deg={q.min_angle:.4f}")
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        save_mesh(mesh, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_run(args):
    spec = _spec_from_args(args)
    traj, report = run_scenario(spec)
    print(report, end="")
    return EXIT_OK


def _cmd_sweep(args):
    spec = _spec_from_args(args)
    tcuts = [float(s) for s in args.tcuts.split(",")]
    result = tcut_sweep(spec, tcuts)
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [(e.tcut, e.terminal_l2) for e in result.entries if not e.error]
    _write_csv(out / "sweep.csv", ("tcut", "terminal_l2_u"), rows,
               comments=[f"zero_state cutoff {result.cutoff!r}"])
    for e in result.entries:
        status = e.error or f"{e.classification} terminal_l2={e.terminal_l2:.6g}"
        print(f"tcut={e.tcut:g}: {status}")
    if result.bracket:
        print(f"threshold bracket: [{result.bracket[0]:g}, {result.bracket[1]:g}]")
    else:
        print("threshold bracket: none (no classification change)")
    return EXIT_OK


def _cmd_analyze(args):
    out = Path(args.dir)
    mesh = load_mesh(out / "mesh.txt")
    snaps = sorted(out.glob("snapshot_t*.csv"))
    if not snaps:
        raise ConfigError(f"no snapshots found in {out}")
    print("t,wavefront_r_half,u_argmax_r,u_center,u_peak")
    for path in snaps:
        data = np.loadtxt(path, delimiter=",", skiprows=2)
        t = float(path.stem.split("_t")[1].replace("m", "-"))
        u = data[:, 3]
        prof = radial_profile(mesh, u, args.n_bins)
        wf = wavefront_radius(prof, 0.5)
        wf_txt = "" if wf is None else f"{wf:.6g}"
        print(f"{t:.6f},{wf_txt},{prof.argmax_radius:.6g},"
              f"{prof.center_value:.6g},{prof.means.max():.6g}")
    series_path = out / "timeseries.csv"
    if series_path.exists():
        data = np.loadtxt(series_path, delimiter=",", skiprows=1)
        t, ut, vt = data[:, 0], data[:, 7], data[:, 8]
        try:
            fit = decay_rate_fit(t, ut**2 + vt**2,
                                 (max(t[-1] - 1.0, t[0]), t[-1]))
            print(f"# decay_rate={fit.rate:.6g} r_squared={fit.r_squared:.4f}")
        except ValueError:
            print("# decay_rate: degenerate signal")
    return EXIT_OK


def _cmd_fixedpoints(args):
    if args.preset:
        params = get_preset(args.preset).params
    else:
        spec = _spec_from_args(args)
        params = spec.params
    print(f"regime: {regime_type(params)}")
    for fp in fixed_points(params):
        print(f"u={fp.u:.10g} v={fp.v:.10g} kind={fp.kind} "
              f"trace={fp.trace:.10g} det={fp.det:.10g}")
    return EXIT_OK


def _cmd_scale(args):
    if args.direction == "nondim":
        needed = ("mu_a", "mu_i", "lambda_a", "lambda_i", "k_a", "k_i")
        missing = [n for n in needed if getattr(args, n) is None]
        if missing:
            raise ConfigError(
                "scale nondim requires --" + ", --".join(m.replace("_", "-")
                                                         for m in missing)
            )
        phys = PhysicalParams(
            mu_a=args.mu_a, mu_i=args.mu_i,
            lambda_a=args.lambda_a, lambda_i=args.lambda_i,
            k_a=args.k_a, k_i=args.k_i,
            H_a=args.H_a, H_i=args.H_i,
            L=args.L, tau=args.tau, u_bar=args.u_bar,
        )
        k = nondimensionalize(phys)
        for name in ("a", "b", "c", "d", "mu_u", "mu_v", "h_u", "h_v", "u_bar"):
            print(f"{name} = {getattr(k, name):.10g}")
    else:
        if not args.preset:
            raise ConfigError("scale dim requires --preset")
        params = get_preset(args.preset).params
        phys = dimensionalize(params, L=args.L, tau=args.tau)
        for name in ("mu_a", "mu_i", "lambda_a", "lambda_i", "k_a", "k_i",
                     "H_a", "H_i", "L", "tau", "u_bar"):
            print(f"{name} = {getattr(phys, name):.10g}")
    return EXIT_OK


def _add_run_flags(p, with_tcut=False):
    p.add_argument("--config", help="config file path")
    p.add_argument("--preset", help="named preset (bmp4, wnt, nodal, instability)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--dt", type=float, help="time step (days)")
    p.add_argument("--h", type=float, help="mesh target edge length")
    p.add_argument("--t-end", dest="t_end", type=float, help="final time (days)")
    p.add_argument("--integrator", choices=("explicit", "imex"))
    if with_tcut:
        p.add_argument("--tcut", type=float, help="source switch-off time")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gmrd",
        description="Activator-inhibitor reaction-diffusion toolkit on disks.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("mesh", help="generate or inspect a disk mesh")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.02)
    p.add_argument("--out", help="write the mesh to this path")
    p.set_defaults(fn=_cmd_mesh)

    p = sub.add_parser("run", help="run one scenario")
    _add_run_flags(p, with_tcut=True)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", help="source activation-time sweep")
    _add_run_flags(p)
    p.add_argument("--tcuts", required=True,
                   help="comma-separated switch-off times, sorted")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("analyze", help="post-process an output directory")
    p.add_argument("dir", help="directory written by 'run'")
    p.add_argument("--n-bins", dest="n_bins", type=int, default=30)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("fixedpoints", help="phase-plane fixed point report")
    p.add_argument("--config", help="config file path")
    p.add_argument("--preset", help="named preset")
    p.set_defaults(fn=_cmd_fixedpoints)

    p = sub.add_parser("scale", help="convert physical <-> dimensionless units")
    p.add_argument("direction", choices=("nondim", "dim"))
    p.add_argument("--preset", help="preset to dimensionalize (direction=dim)")
    p.add_argument("--mu-a", dest="mu_a", type=float)
    p.add_argument("--mu-i", dest="mu_i", type=float)
    p.add_argument("--lambda-a", dest="lambda_a", type=float)
    p.add_argument("--lambda-i", dest="lambda_i", type=float)
    p.add_argument("--k-a", dest="k_a", type=float)
    p.add_argument("--k-i", dest="k_i", type=float)
    p.add_argument("--H-a", dest="H_a", type=float, default=0.0)
    p.add_argument("--H-i", dest="H_i", type=float, default=0.0)
    p.add_argument("--L", type=float, default=500.0)
    p.add_argument("--tau", type=float, default=86400.0)
    p.add_argument("--u-bar", dest="u_bar", type=float, default=0.0)
    p.set_defaults(fn=_cmd_scale)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MeshError as exc:
        print(f"mesh error: {exc}", file=sys.stderr)
        return EXIT_MESH
    except (SolverError, SimulationError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except GmrdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
