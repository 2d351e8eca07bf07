"""Post-processing and steady-state diagnostics.

Radial profiles and phase curves, wavefront tracking, asymmetry, L2/H1
norms, time-derivative norms with exponential decay fitting, the first
Dirichlet eigenvalue of the Laplacian (Poincare constant), steady-state
attraction tests, and a Newton solver for the stationary system.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import assemble_mass, assemble_stiffness
from .errors import SolverError
from .kinetics import jacobian_entries, reaction_rates
from .radial import (  # noqa: F401  (re-exported post-processing surface)
    RadialProfile,
    asymmetry_index,
    radial_phase_curve,
    radial_profile,
    ring_structure,
    wavefront_radius,
)
from .simulate import DIRICHLET, ROBIN, rhs_rates, step_imex


def l2_norm(mesh, field, M=None):
    """Lumped-mass L2 norm sqrt(f' M f)."""
    f = np.asarray(field, dtype=float)
    if M is None:
        M = assemble_mass(mesh, lumped=True).diagonal()
    return float(np.sqrt(max(f @ (M * f), 0.0)))


def h1_seminorm(mesh, field, K=None):
    """H1 seminorm sqrt(f' K f)."""
    f = np.asarray(field, dtype=float)
    if K is None:
        K = assemble_stiffness(mesh)
    return float(np.sqrt(max(f @ (K @ f), 0.0)))


def time_derivative_norms(state):
    """M-weighted L2 norms of the semi-discrete rates (u_t, v_t)."""
    u_t, v_t = rhs_rates(state)
    M = state.ops.M
    return (
        float(np.sqrt(u_t @ (M * u_t))),
        float(np.sqrt(v_t @ (M * v_t))),
    )


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of log(values) ~ log(A) - k*t."""

    rate: float
    amplitude: float
    window: tuple
    r_squared: float
    shrunk: bool  # True if nonpositive values forced a smaller window


def decay_rate_fit(times, values, window):
    """Fit an exponential decay rate on a time window.

    Nonpositive values inside the window are dropped (the fit is flagged
    ``shrunk``); a window with fewer than three usable points raises.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    t0, t1 = window
    mask = (times >= t0) & (times <= t1)
    shrunk = False
    if np.any(values[mask] <= 0.0):
        shrunk = True
        mask &= values > 0.0
    t = times[mask]
    y = np.log(values[mask])
    if len(t) < 3:
        raise ValueError("degenerate decay fit: fewer than 3 positive samples")
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    return DecayFit(
        rate=float(-slope),
        amplitude=float(np.exp(intercept)),
        window=(float(t[0]), float(t[-1])),
        r_squared=r2,
        shrunk=shrunk,
    )


def poincare_constant(mesh, tol=1e-8, max_iter=500):
    """Smallest Dirichlet eigenvalue of K x = lambda M x by inverse iteration.

    The optimal L2 Poincare constant of the domain is 1/sqrt(lambda_1).
    """
    K = assemble_stiffness(mesh)
    M = assemble_mass(mesh, lumped=False)
    interior = np.setdiff1d(np.arange(mesh.n_nodes), mesh.boundary_nodes)
    Kii = K[np.ix_(interior, interior)].tocsc()
    Mii = M[np.ix_(interior, interior)].tocsr()
    solve = spla.splu(Kii).solve

    x = np.ones(len(interior))
    lam = 0.0
    for _ in range(max_iter):
        y = solve(Mii @ x)
        y /= np.sqrt(y @ (Mii @ y))
        lam_new = float(y @ (Kii @ y))  # Rayleigh quotient (Mii-normalized y)
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new
        lam, x = lam_new, y
    raise SolverError(
        f"inverse iteration did not reach relative tolerance {tol}",
        residual_history=[lam],
    )


def attraction_test(state_a, state_b, dt, t_end, record_every=10):
    """March two states side by side and record their L2 distance.

    Both states must share the mesh and schedule; returns (times,
    distances) where distance = ||u_a - u_b||_2 + ||v_a - v_b||_2.
    """
    if state_a.mesh is not state_b.mesh:
        raise ValueError("attraction test requires a shared mesh")
    M = state_a.ops.M

    def dist():
        du = state_a.u - state_b.u
        dv = state_a.v - state_b.v
        return float(np.sqrt(du @ (M * du)) + np.sqrt(dv @ (M * dv)))

    n_steps = int(round(t_end / dt))
    times = [0.0]
    distances = [dist()]
    for k in range(n_steps):
        step_imex(state_a, dt)
        step_imex(state_b, dt)
        if (k + 1) % record_every == 0 or k + 1 == n_steps:
            times.append(state_a.t)
            distances.append(dist())
    return np.array(times), np.array(distances)


def _stationary_residual(state):
    """Residual of the steady system in rate form (M-scaled RHS)."""
    u_t, v_t = rhs_rates(state)
    return u_t, v_t


def solve_steady_newton(state, max_iter=30, tol=1e-10):
    """Newton iteration on the coupled stationary system.

    Operates in place on a copy of the state's fields; returns
    ``(u_s, v_s, residual_history)``. The residual is the L2 norm of the
    semi-discrete rates, so detect_steady holds trivially at the solution.
    ``tol`` is relative to the magnitude of the terms entering the residual
    (with strong sources the attainable absolute residual is limited by
    round-off in the large cancelling terms). Raises :class:`SolverError`
    on divergence.
    """
    mesh = state.mesh
    p = state.params
    ops = state.ops
    n = mesh.n_nodes
    M = ops.M

    if state.boundary_mode == ROBIN:
        A_u = (p.mu_u * ops.K + sp.diags(p.h_u * ops.B)).tocsr()
        A_v = (p.mu_v * ops.K + sp.diags(p.h_v * ops.B)).tocsr()
        load_u = p.h_u * p.u_bar * ops.ell
        constrained = np.array([], dtype=np.int64)
    else:
        A_u = (p.mu_u * ops.K).tocsr()
        A_v = (p.mu_v * ops.K).tocsr()
        load_u = np.zeros(n)
        constrained = mesh.boundary_nodes

    u = state.u.copy()
    v = state.v.copy()
    free_mask = np.ones(n, dtype=bool)
    free_mask[constrained] = False
    keep = sp.diags(free_mask.astype(float))
    pin = sp.diags((~free_mask).astype(float))

    def residual_vec(u, v):
        r_u, r_v = reaction_rates(u, v, p)
        F_u = A_u @ u - M * (r_u + state.f) - load_u
        F_v = A_v @ v - M * (r_v + state.g)
        F_u[constrained] = 0.0
        F_v[constrained] = 0.0
        return F_u, F_v

    def residual_norm(F_u, F_v):
        ru = F_u / M
        rv = F_v / M
        return float(np.sqrt(ru @ (M * ru) + rv @ (M * rv)))

    # backward-error scale: the sum of magnitudes of the residual's terms
    r_u0, r_v0 = reaction_rates(u, v, p)
    S_u = abs(A_u) @ np.abs(u) + M * (np.abs(r_u0) + np.abs(state.f))
    S_u += np.abs(load_u)
    S_v = abs(A_v) @ np.abs(v) + M * (np.abs(r_v0) + np.abs(state.g))
    S_u[constrained] = 0.0
    S_v[constrained] = 0.0
    tol_eff = tol * max(1.0, residual_norm(S_u, S_v))

    history = []
    F_u, F_v = residual_vec(u, v)
    res = residual_norm(F_u, F_v)
    history.append(res)
    for _ in range(max_iter):
        if res < tol_eff:
            return u, v, history
        j11, j12, j21, j22 = jacobian_entries(u, v, p)
        Juu = A_u - sp.diags(M * j11)
        Jvv = A_v - sp.diags(M * j22)
        Juv = sp.diags(-M * j12)
        Jvu = sp.diags(-M * j21)
        if len(constrained):
            Juu = keep @ Juu @ keep + pin
            Jvv = keep @ Jvv @ keep + pin
            Juv = keep @ Juv @ keep
            Jvu = keep @ Jvu @ keep
        J = sp.bmat([[Juu, Juv], [Jvu, Jvv]], format="csc")
        delta = spla.splu(J).solve(np.concatenate([F_u, F_v]))

        # damped update: halve the step while the residual grows
        step = 1.0
        for _ in range(12):
            u_try = u - step * delta[:n]
            v_try = np.maximum(v - step * delta[n:], -0.99)
            F_u_try, F_v_try = residual_vec(u_try, v_try)
            res_try = residual_norm(F_u_try, F_v_try)
            if res_try < res or step < 1e-3:
                break
            step *= 0.5
        u, v, F_u, F_v, res = u_try, v_try, F_u_try, F_v_try, res_try
        history.append(res)
    if res < tol_eff:
        return u, v, history
    raise SolverError(
        "Newton iteration for the steady state did not converge "
        "(consider time-marching to a better initial guess)",
        residual_history=history,
    )


def summary_report(mesh, params, traj, n_bins=30, mu_lambda=None):
    """Plain-text run summary: fixed points, regime, steady time, decay
    rate over the last recorded day, and the asymmetry peak."""
    from .kinetics import fixed_points, regime_type

    lines = ["run summary", "==========="]
    lines.append(f"regime: {regime_type(params)}")
    for fp in fixed_points(params):
        lines.append(
            f"fixed point u={fp.u:.6g} v={fp.v:.6g} kind={fp.kind} "
            f"trace={fp.trace:.6g} det={fp.det:.6g}"
        )
    lines.append(f"steady_state_time: {traj.steady_state_time}")
    ts = traj.series["t"]
    ut2 = traj.series["ut_l2"] ** 2 + traj.series["vt_l2"] ** 2
    try:
        fit = decay_rate_fit(ts, ut2, (max(ts[-1] - 1.0, ts[0]), ts[-1]))
        lines.append(
            f"decay_rate (last day, |u_t|^2+|v_t|^2): {fit.rate:.6g} "
            f"R2={fit.r_squared:.4f}"
        )
    except ValueError:
        lines.append("decay_rate: degenerate (flat or nonpositive signal)")
    if mu_lambda is not None:
        lines.append(f"mu*lambda1 (Dirichlet Poincare scale): {mu_lambda:.6g}")
    lines.append(f"asymmetry_peak: {traj.series['asymmetry'][1:].max():.6g}")
    t, u, v = traj.final()
    prof = radial_profile(mesh, u, n_bins)
    lines.append(
        f"final t={t:.6g}: u argmax radius {prof.argmax_radius:.4f}, "
        f"u(0)={prof.center_value:.6g}, peak={prof.means.max():.6g}"
    )
    return "\n".join(lines) + "\n"
