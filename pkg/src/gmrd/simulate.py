"""Time integration of the coupled semi-discrete activator-inhibitor system.

Two boundary modes (Robin with backgrounds u_bar / 0, or Dirichlet with
pinned boundary values) and two integrators: semi-implicit IMEX (diffusion
and Robin terms implicit, reaction explicit; the default) and the forward
Euler fidelity mode with the classical dt <= h^2 restriction.
"""

from dataclasses import dataclass, field
import warnings

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import (
    assemble_boundary_mass,
    assemble_mass,
    assemble_stiffness,
    project_source,
)
from .errors import SimulationError, SolverError
from .kinetics import reaction_rates
from .radial import asymmetry_index, ring_structure

ROBIN = "robin"
DIRICHLET = "dirichlet"

ZERO_SOURCE_F = "zero_source_f"

#: Round-off allowance on discrete nonnegativity.
POSITIVITY_SLACK = 1e-12

TIMESERIES_COLUMNS = (
    "t", "u_min", "u_max", "v_min", "v_max",
    "l2_u", "l2_v", "ut_l2", "vt_l2", "grad_l2", "asymmetry", "max_change",
)


@dataclass
class Operators:
    """Assembled P1 operators shared by both species."""

    K: sp.csr_matrix
    M: np.ndarray            # lumped mass diagonal
    B: np.ndarray            # lumped Robin boundary mass diagonal
    ell: np.ndarray          # boundary load vector


@dataclass
class Schedule:
    dt: float
    t_end: float
    snapshot_times: tuple = ()
    events: tuple = ()       # (time, action) pairs, action in {zero_source_f}

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        self.snapshot_times = tuple(sorted(float(s) for s in self.snapshot_times))
        self.events = tuple((float(t), a) for t, a in self.events)
        for s in self.snapshot_times:
            if not 0.0 <= s <= self.t_end + 1e-12:
                raise ValueError(f"snapshot time {s} outside [0, t_end]")
        for t, action in self.events:
            if not 0.0 <= t <= self.t_end + 1e-12:
                raise ValueError(f"event time {t} outside [0, t_end]")
            if action != ZERO_SOURCE_F:
                raise ValueError(f"unknown event action {action!r}")


def default_snapshots(t_end, n=16, t_first=0.01):
    """Log-spaced snapshot times (plus t=0 and t_end)."""
    if t_end <= t_first:
        return (0.0, t_end)
    return (0.0,) + tuple(np.geomspace(t_first, t_end, n))


@dataclass
class SimState:
    mesh: object
    params: object
    u: np.ndarray
    v: np.ndarray
    t: float
    boundary_mode: str
    f: np.ndarray                    # activator source (nodal)
    g: np.ndarray                    # inhibitor source (nodal)
    ops: Operators
    u_b: np.ndarray = None           # Dirichlet data at boundary nodes
    v_b: np.ndarray = None
    _solver_cache: dict = field(default_factory=dict, repr=False)


def init_state(mesh, params, u0, v0, boundary_mode=ROBIN,
               u_b=None, v_b=None, source_f=None, source_g=None):
    """Assemble operators once and validate the initial data.

    ``u0, v0`` may be constants or nodal arrays; they must be nonnegative.
    In Dirichlet mode ``u_b, v_b`` (constants or per-boundary-node arrays)
    are required and must be compatible with the initial data at t=0.
    """
    u = np.full(mesh.n_nodes, float(u0)) if np.isscalar(u0) else np.array(u0, dtype=float)
    v = np.full(mesh.n_nodes, float(v0)) if np.isscalar(v0) else np.array(v0, dtype=float)
    if u.shape != (mesh.n_nodes,) or v.shape != (mesh.n_nodes,):
        raise ValueError("initial fields must have one value per node")
    if u.min() < 0 or v.min() < 0:
        raise ValueError("initial data must be nonnegative")

    f = np.zeros(mesh.n_nodes) if source_f is None else project_source(mesh, source_f).values
    g = np.zeros(mesh.n_nodes) if source_g is None else project_source(mesh, source_g).values

    K = assemble_stiffness(mesh)
    M = assemble_mass(mesh, lumped=True).diagonal()
    Bmat, ell = assemble_boundary_mass(mesh, lumped=True)
    ops = Operators(K=K, M=M, B=Bmat.diagonal(), ell=ell)

    if boundary_mode == DIRICHLET:
        nb = len(mesh.boundary_nodes)
        if u_b is None or v_b is None:
            raise ValueError("Dirichlet mode requires u_b and v_b")
        u_b = np.broadcast_to(np.asarray(u_b, dtype=float), (nb,)).copy()
        v_b = np.broadcast_to(np.asarray(v_b, dtype=float), (nb,)).copy()
        if (np.max(np.abs(u[mesh.boundary_nodes] - u_b)) > 1e-10
                or np.max(np.abs(v[mesh.boundary_nodes] - v_b)) > 1e-10):
            raise ValueError(
                "Dirichlet boundary values incompatible with initial data at t=0"
            )
    elif boundary_mode == ROBIN:
        u_b = v_b = None
    else:
        raise ValueError(f"unknown boundary mode {boundary_mode!r}")

    return SimState(mesh=mesh, params=params, u=u, v=v, t=0.0,
                    boundary_mode=boundary_mode, f=f, g=g, ops=ops,
                    u_b=u_b, v_b=v_b)


def _check_finite(state, arr, label):
    if not np.all(np.isfinite(arr)):
        bad = np.abs(arr[np.isfinite(arr)])
        norm = float(bad.max()) if len(bad) else float("inf")
        raise SimulationError(
            f"integration failure in {label} at t={state.t:.6g}",
            t=state.t, norm=norm,
        )


def _reaction(state):
    try:
        r_u, r_v = reaction_rates(state.u, state.v, state.params)
    except ValueError as exc:
        # the division guard firing mid-march means the step blew up
        raise SimulationError(
            f"integration failure at t={state.t:.6g}: {exc}", t=state.t
        ) from exc
    return r_u + state.f, r_v + state.g


def _robin_system(state, species, dt):
    """(M + dt*(mu*K + h*B)) as CSC, for the implicit solve.

    The Robin term uses the flux convention mu*du/dn = h*(background - u),
    so the boundary mass enters with coefficient h alone.
    """
    p = state.params
    mu, h = (p.mu_u, p.h_u) if species == "u" else (p.mu_v, p.h_v)
    ops = state.ops
    A = sp.diags(ops.M) + dt * (mu * ops.K + sp.diags(h * ops.B))
    return A.tocsc()


def _dirichlet_system(state, species, dt):
    p = state.params
    mu = p.mu_u if species == "u" else p.mu_v
    ops = state.ops
    A = (sp.diags(ops.M) + dt * mu * ops.K).tocsr()
    bn = state.mesh.boundary_nodes
    n = state.mesh.n_nodes
    gfull = np.zeros(n)
    gfull[bn] = state.u_b if species == "u" else state.v_b
    colcorr = A @ gfull
    mask = np.ones(n)
    mask[bn] = 0.0
    keep = sp.diags(mask)
    A_c = keep @ A @ keep + sp.diags(1.0 - mask)
    return A_c.tocsc(), colcorr, gfull


def _imex_factors(state, dt, solver):
    key = (dt, state.boundary_mode, solver)
    cached = state._solver_cache.get(key)
    if cached is not None:
        return cached
    factors = {}
    for species in ("u", "v"):
        if state.boundary_mode == ROBIN:
            A = _robin_system(state, species, dt)
            colcorr = gfull = None
        else:
            A, colcorr, gfull = _dirichlet_system(state, species, dt)
        if solver == "direct":
            solve = spla.splu(A).solve
        else:
            solve = _make_cg_solver(A)
        factors[species] = (solve, colcorr, gfull)
    state._solver_cache[key] = factors
    return factors


def _make_cg_solver(A, rtol=1e-10, maxiter=2000):
    precond = spla.LinearOperator(A.shape, matvec=lambda x: x / A.diagonal())

    def solve(rhs):
        history = []
        x, info = spla.cg(
            A, rhs, rtol=rtol, atol=0.0, maxiter=maxiter, M=precond,
            callback=lambda xk: history.append(
                float(np.linalg.norm(rhs - A @ xk))
            ),
        )
        if info != 0:
            raise SolverError(
                f"conjugate gradients failed to converge (info={info})",
                residual_history=history,
            )
        return x

    return solve


def step_imex(state, dt, solver="direct"):
    """Semi-implicit step: diffusion (and Robin flux) implicit, reaction
    explicit. Unconditionally diffusion-stable; the reaction still bounds
    dt by the reciprocal reaction stiffness."""
    p = state.params
    ops = state.ops
    factors = _imex_factors(state, dt, solver)
    r_u, r_v = _reaction(state)

    rhs_u = ops.M * state.u + dt * ops.M * r_u
    rhs_v = ops.M * state.v + dt * ops.M * r_v
    if state.boundary_mode == ROBIN:
        rhs_u += dt * p.h_u * p.u_bar * ops.ell
        # inhibitor background is zero: no boundary load term
        for species, rhs in (("u", rhs_u), ("v", rhs_v)):
            solve, _, _ = factors[species]
            new = solve(rhs)
            _check_finite(state, new, species)
            if species == "u":
                state.u = new
            else:
                state.v = new
    else:
        bn = state.mesh.boundary_nodes
        for species, rhs, bc in (("u", rhs_u, state.u_b), ("v", rhs_v, state.v_b)):
            solve, colcorr, _ = factors[species]
            rhs = rhs - colcorr
            rhs[bn] = bc
            new = solve(rhs)
            _check_finite(state, new, species)
            if species == "u":
                state.u = new
            else:
                state.v = new
    state.t += dt
    return state


def step_explicit(state, dt):
    """Forward Euler step (fidelity mode; requires dt ~ h^2 for stability)."""
    p = state.params
    ops = state.ops
    r_u, r_v = _reaction(state)
    du = -(p.mu_u * (ops.K @ state.u)
           + p.h_u * (ops.B * state.u - p.u_bar * ops.ell))
    dv = -(p.mu_v * (ops.K @ state.v) + p.h_v * ops.B * state.v)
    u_new = state.u + dt * (du / ops.M + r_u)
    v_new = state.v + dt * (dv / ops.M + r_v)
    if state.boundary_mode == DIRICHLET:
        bn = state.mesh.boundary_nodes
        u_new[bn] = state.u_b
        v_new[bn] = state.v_b
    _check_finite(state, u_new, "u")
    _check_finite(state, v_new, "v")
    state.u, state.v = u_new, v_new
    state.t += dt
    return state


def apply_event(state, action):
    """Apply a schedule event; currently only BMP-source inhibition."""
    if action != ZERO_SOURCE_F:
        raise ValueError(f"unknown event action {action!r}")
    state.f = np.zeros_like(state.f)
    return state


def rhs_rates(state):
    """Semi-discrete right-hand sides u_t, v_t of the current state."""
    p = state.params
    ops = state.ops
    r_u, r_v = _reaction(state)
    if state.boundary_mode == ROBIN:
        u_t = (-(p.mu_u * (ops.K @ state.u)
                 + p.h_u * (ops.B * state.u - p.u_bar * ops.ell))) / ops.M + r_u
        v_t = (-(p.mu_v * (ops.K @ state.v)
                 + p.h_v * ops.B * state.v)) / ops.M + r_v
    else:
        u_t = (-p.mu_u * (ops.K @ state.u)) / ops.M + r_u
        v_t = (-p.mu_v * (ops.K @ state.v)) / ops.M + r_v
        u_t[state.mesh.boundary_nodes] = 0.0
        v_t[state.mesh.boundary_nodes] = 0.0
    return u_t, v_t


@dataclass
class Trajectory:
    """Snapshots plus per-interval diagnostics of one integration run."""

    snapshots: list                  # (t, u, v) tuples
    series: dict                     # column name -> array
    steady_state_time: float = None
    dt: float = None

    @property
    def times(self):
        return self.series["t"]

    def final(self):
        return self.snapshots[-1]


def run(state, schedule, integrator="imex", diagnostics_every=10,
        solver="direct", n_bins=None):
    """Integrate to t_end, honoring snapshots and events.

    Diagnostics (norms, extrema, asymmetry, max per-step change) are
    recorded every ``diagnostics_every`` steps; the per-step max nodal
    change is aggregated over each diagnostic interval so steady-state
    detection sees every step.
    """
    dt = schedule.dt
    n_steps = int(round(schedule.t_end / dt))
    if abs(n_steps * dt - schedule.t_end) > 1e-9 * max(1.0, schedule.t_end):
        warnings.warn("dt does not divide t_end; final time snapped to grid")

    snap_steps = {int(round(s / dt)) for s in schedule.snapshot_times}
    event_steps = sorted(
        (int(round(t / dt)), action) for t, action in schedule.events
    )
    rings = ring_structure(state.mesh, weights=state.ops.M)

    step_fn = {"imex": lambda s: step_imex(s, dt, solver=solver),
               "explicit": lambda s: step_explicit(s, dt)}[integrator]

    cols = {name: [] for name in TIMESERIES_COLUMNS}
    snapshots = []

    def record_diag(max_change):
        u, v, ops = state.u, state.v, state.ops
        u_t, v_t = rhs_rates(state)
        cols["t"].append(state.t)
        cols["u_min"].append(float(u.min()))
        cols["u_max"].append(float(u.max()))
        cols["v_min"].append(float(v.min()))
        cols["v_max"].append(float(v.max()))
        cols["l2_u"].append(float(np.sqrt(u @ (ops.M * u))))
        cols["l2_v"].append(float(np.sqrt(v @ (ops.M * v))))
        cols["ut_l2"].append(float(np.sqrt(u_t @ (ops.M * u_t))))
        cols["vt_l2"].append(float(np.sqrt(v_t @ (ops.M * v_t))))
        cols["grad_l2"].append(
            float(np.sqrt(max(u @ (ops.K @ u) + v @ (ops.K @ v), 0.0)))
        )
        cols["asymmetry"].append(asymmetry_index(state.mesh, u, rings=rings))
        cols["max_change"].append(max_change)

    if 0 in snap_steps:
        snapshots.append((0.0, state.u.copy(), state.v.copy()))
    record_diag(np.inf)

    interval_change = 0.0
    event_idx = 0
    for k in range(n_steps):
        while event_idx < len(event_steps) and event_steps[event_idx][0] <= k:
            apply_event(state, event_steps[event_idx][1])
            event_idx += 1
        u_prev, v_prev = state.u, state.v
        step_fn(state)
        change = max(
            float(np.abs(state.u - u_prev).max()),
            float(np.abs(state.v - v_prev).max()),
        )
        interval_change = max(interval_change, change)
        done = k + 1
        if done % diagnostics_every == 0 or done == n_steps:
            record_diag(interval_change)
            interval_change = 0.0
        if done in snap_steps:
            snapshots.append((state.t, state.u.copy(), state.v.copy()))

    if not snapshots or snapshots[-1][0] < state.t - dt / 2:
        snapshots.append((state.t, state.u.copy(), state.v.copy()))

    series = {name: np.array(vals) for name, vals in cols.items()}
    traj = Trajectory(snapshots=snapshots, series=series, dt=dt)
    traj.steady_state_time = detect_steady(traj)
    return traj


def detect_steady(traj, threshold=1e-6, window=1.0):
    """Earliest t* with max per-step nodal change below ``threshold`` over
    [t*, t*+window]; None if the run never settles (or is too short)."""
    t = traj.series["t"]
    chg = traj.series["max_change"]
    if len(t) < 2 or t[-1] < window:
        return None
    # interval i covers (t[i-1], t[i]]
    starts = np.concatenate([[t[0]], t[:-1]])
    quiet = chg < threshold
    for i in range(1, len(t)):
        if not quiet[i]:
            continue
        t_star = starts[i]
        j = np.searchsorted(t, t_star + window)
        if j >= len(t):
            if t[-1] >= t_star + window - 1e-9:
                j = len(t) - 1
            else:
                continue
        if np.all(quiet[i:j + 1]):
            return float(t_star)
    return None
