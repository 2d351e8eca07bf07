"""Session-scoped fixtures: desk-scale runs are expensive (~1 min each),
so every test that needs a settled trajectory shares these."""

import numpy as np
import pytest

from gmrd.analysis import attraction_test, solve_steady_newton
from gmrd.assembly import annulus_source
from gmrd.kinetics import KineticsParams
from gmrd.mesh import build_disk_mesh
from gmrd.presets import get_preset
from gmrd.simulate import (
    DIRICHLET,
    Schedule,
    default_snapshots,
    init_state,
    run,
)

DESK_H = 0.02
DESK_DT = 1e-4
DESK_T_END = 3.0


@pytest.fixture(scope="session")
def desk_mesh():
    return build_disk_mesh(1.0, DESK_H)


@pytest.fixture(scope="session")
def coarse_mesh():
    return build_disk_mesh(1.0, 0.1)


def run_preset(mesh, name, t_end=DESK_T_END, dt=DESK_DT, params=None,
               extra_snapshots=()):
    """One preset run; returns (state, trajectory). The state is left at
    its final fields, ready for Newton refinement."""
    preset = get_preset(name)
    p = params or preset.params
    source = (annulus_source(preset.source_level, preset.source_radius)
              if preset.source_level > 0 else None)
    state = init_state(mesh, p, preset.u0, preset.v0, source_f=source)
    snaps = tuple(sorted(set(default_snapshots(t_end)) | set(extra_snapshots)))
    traj = run(state, Schedule(dt=dt, t_end=t_end, snapshot_times=snaps),
               diagnostics_every=10)
    return state, traj


@pytest.fixture(scope="session")
def preset_runs(desk_mesh):
    """Desk-scale (h=0.02, dt=1e-4, t_end=3) runs of all four presets."""
    return {
        name: run_preset(desk_mesh, name)
        for name in ("bmp4", "wnt", "nodal", "instability")
    }


@pytest.fixture(scope="session")
def mu_variant_runs(desk_mesh, preset_runs):
    """BMP4 kinetics at mu_u in {1.9, 3.8, 7.6}; sup norms settle well
    before t=1, so the variants run on the shorter horizon."""
    base = get_preset("bmp4").params
    out = {3.8: preset_runs["bmp4"]}
    for mu in (1.9, 7.6):
        p = KineticsParams(a=base.a, b=base.b, c=base.c, d=base.d,
                           mu_u=mu, mu_v=base.mu_v,
                           h_u=base.h_u, h_v=base.h_v, u_bar=base.u_bar)
        out[mu] = run_preset(desk_mesh, "bmp4", t_end=1.0, params=p)
    return out


@pytest.fixture(scope="session")
def newton_steady(preset_runs):
    """Newton-refined steady states seeded by the time-marched fields."""
    out = {}
    for name in ("bmp4", "wnt", "nodal"):
        state, _ = preset_runs[name]
        out[name] = solve_steady_newton(state)
    return out


def dirichlet_decay_params():
    base = get_preset("bmp4").params
    return KineticsParams(a=base.a, b=base.b, c=base.c, d=base.d,
                          mu_u=3.8, mu_v=3.8)


@pytest.fixture(scope="session")
def dirichlet_decay_run(desk_mesh):
    """Homogeneous-Dirichlet run with equal diffusion, activation source,
    zero initial data (the stability-theorem setting)."""
    params = dirichlet_decay_params()
    state = init_state(desk_mesh, params, 0.0, 0.0,
                       boundary_mode=DIRICHLET, u_b=0.0, v_b=0.0,
                       source_f=annulus_source(670.0, 0.85))
    traj = run(state, Schedule(dt=DESK_DT, t_end=2.0), diagnostics_every=10)
    return state, traj


@pytest.fixture(scope="session")
def attraction_result(desk_mesh):
    """Two Dirichlet runs from distinct initial data, marched in lockstep."""
    params = dirichlet_decay_params()
    r = desk_mesh.node_radii()
    bump = 0.3 * np.exp(-(((r - 0.4) / 0.15) ** 2))
    bump[desk_mesh.boundary_nodes] = 0.0
    state_a = init_state(desk_mesh, params, 3.0, 0.0,
                         boundary_mode=DIRICHLET, u_b=3.0, v_b=0.0)
    state_b = init_state(desk_mesh, params, 3.0 + bump, 0.0,
                         boundary_mode=DIRICHLET, u_b=3.0, v_b=0.0)
    return attraction_test(state_a, state_b, DESK_DT, 2.0, record_every=10)
