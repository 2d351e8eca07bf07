"""Pointwise activator-inhibitor reaction terms and phase-plane analysis.

The reaction pair is ``du/dt = -a*u + b*u^2/(1+v)`` and
``dv/dt = -c*v + d*u^2``; sources are added by the solver, not here.
"""

from dataclasses import dataclass, replace
import math

import numpy as np

STABLE_NODE = "stable_node"
STABLE_FOCUS = "stable_focus"
CENTER = "center"
UNSTABLE_FOCUS = "unstable_focus"
UNSTABLE_NODE = "unstable_node"
SADDLE = "saddle"
DEGENERATE = "degenerate"

TYPE1 = "type1"
TYPE2 = "type2"
TYPE_DEGENERATE = "degenerate"

ROOT_TOL = 1e-10


@dataclass(frozen=True)
class KineticsParams:
    """Dimensionless coefficients of the activator-inhibitor system.

    ``a, c`` are decay rates, ``b, d`` reaction coefficients, ``mu_u, mu_v``
    diffusion coefficients, ``h_u, h_v`` Robin transfer rates, and ``u_bar``
    the background activator level on the boundary (the inhibitor background
    is always zero).
    """

    a: float
    b: float
    c: float
    d: float
    mu_u: float
    mu_v: float
    h_u: float = 0.0
    h_v: float = 0.0
    u_bar: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "mu_u", "mu_v"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("h_u", "h_v", "u_bar"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def scaled_reactions(self, factor):
        """Multiply all four reaction/decay coefficients by a common factor."""
        return replace(
            self,
            a=self.a * factor,
            b=self.b * factor,
            c=self.c * factor,
            d=self.d * factor,
        )


@dataclass(frozen=True)
class FixedPoint:
    u: float
    v: float
    kind: str
    trace: float
    det: float


def reaction_rates(u, v, p):
    """Evaluate (du/dt, dv/dt) of the reaction part; works on arrays."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(v <= -1.0):
        raise ValueError("inhibitor value v <= -1 (division guard)")
    du = -p.a * u + p.b * u * u / (1.0 + v)
    dv = -p.c * v + p.d * u * u
    return du, dv


def reaction_jacobian(u, v, p):
    """2x2 Jacobian of the reaction rates at a general point (u, v)."""
    if np.any(np.asarray(v) <= -1.0):
        raise ValueError("inhibitor value v <= -1 (division guard)")
    return np.array(
        [
            [-p.a + 2.0 * p.b * u / (1.0 + v), -p.b * u * u / (1.0 + v) ** 2],
            [2.0 * p.d * u, -p.c],
        ]
    )


def jacobian_entries(u, v, p):
    """Jacobian entries for nodal arrays, as four arrays (j11, j12, j21, j22)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return (
        -p.a + 2.0 * p.b * u / (1.0 + v),
        -p.b * u * u / (1.0 + v) ** 2,
        2.0 * p.d * u,
        np.full_like(u, -p.c),
    )


def _kind_from_trace_det(trace, det):
    if det < 0:
        return SADDLE
    if det == 0:
        return DEGENERATE
    if trace == 0:
        return CENTER
    disc = trace * trace - 4.0 * det
    if trace < 0:
        return STABLE_NODE if disc >= 0 else STABLE_FOCUS
    return UNSTABLE_NODE if disc >= 0 else UNSTABLE_FOCUS


def classify_fixed_point(p, u, v):
    """Classify a fixed point by the trace/determinant sign pattern."""
    du, dv = reaction_rates(u, v, p)
    # residuals are judged against the magnitude of the terms that cancel
    du_scale = max(1.0, p.a * abs(u) + p.b * u * u / abs(1.0 + v))
    dv_scale = max(1.0, p.c * abs(v) + p.d * u * u)
    if abs(du) > ROOT_TOL * du_scale or abs(dv) > ROOT_TOL * dv_scale:
        raise ValueError(f"({u}, {v}) is not a fixed point: rates ({du}, {dv})")
    jac = reaction_jacobian(u, v, p)
    trace = float(jac[0, 0] + jac[1, 1])
    det = float(jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0])
    # snap round-off-level trace/determinant to zero so borderline cases
    # (e.g. a == c at the nonzero roots) classify deterministically
    if abs(trace) <= 1e-12 * (abs(jac[0, 0]) + abs(jac[1, 1])):
        trace = 0.0
    if abs(det) <= 1e-12 * (abs(jac[0, 0] * jac[1, 1]) + abs(jac[0, 1] * jac[1, 0])):
        det = 0.0
    return FixedPoint(float(u), float(v), _kind_from_trace_det(trace, det), trace, det)


def fixed_points(p):
    """All reaction fixed points: the origin, plus the closed-form pair.

    The nonzero roots are ``u = (cb +- sqrt((cb)^2 - 4a^2cd)) / (2da)`` with
    ``v = (b/a)u - 1``; a vanishing radicand yields a single degenerate
    point.
    """
    pts = [classify_fixed_point(p, 0.0, 0.0)]
    radicand = (p.c * p.b) ** 2 - 4.0 * p.a**2 * p.c * p.d
    if radicand > 0:
        # the large root is cancellation-free; recover the small one from
        # the product of roots (u_plus * u_minus = c/d) and evaluate v from
        # the inhibitor nullcline, which never cancels
        u_plus = (p.c * p.b + math.sqrt(radicand)) / (2.0 * p.d * p.a)
        u_minus = p.c / (p.d * u_plus)
        for u in (u_plus, u_minus):
            v = (p.d / p.c) * u * u
            pts.append(classify_fixed_point(p, u, v))
    elif radicand == 0:
        u = p.c * p.b / (2.0 * p.d * p.a)
        v = (p.d / p.c) * u * u
        fp = classify_fixed_point(p, u, v)
        pts.append(FixedPoint(fp.u, fp.v, DEGENERATE, fp.trace, fp.det))
    return pts


def regime_type(p):
    """Type 1 (single fixed point) vs type 2 (three fixed points)."""
    lhs = p.b**2 * p.c
    rhs = 4.0 * p.a**2 * p.d
    if lhs < rhs:
        return TYPE1
    if lhs > rhs:
        return TYPE2
    return TYPE_DEGENERATE


def nullclines(p, u_max, n):
    """Sample both nullclines on [0, u_max].

    Returns ``(u, v_activator, v_inhibitor)`` where the activator nullcline
    is the line ``v = (b/a)u - 1`` (the branch ``u = 0`` is the v-axis) and
    the inhibitor nullcline is ``v = (d/c)u^2``.
    """
    if u_max <= 0:
        raise ValueError("u_max must be positive")
    if n < 2:
        raise ValueError("need at least two sample points")
    u = np.linspace(0.0, u_max, n)
    return u, (p.b / p.a) * u - 1.0, (p.d / p.c) * u * u
