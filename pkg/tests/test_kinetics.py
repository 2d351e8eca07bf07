"""Reaction terms, fixed points, classification, regimes, nullclines."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmrd.kinetics import (
    CENTER,
    SADDLE,
    STABLE_FOCUS,
    STABLE_NODE,
    TYPE1,
    TYPE2,
    KineticsParams,
    classify_fixed_point,
    fixed_points,
    nullclines,
    reaction_jacobian,
    reaction_rates,
    regime_type,
)
from gmrd.presets import get_preset

WNT = get_preset("wnt").params
BMP4 = get_preset("bmp4").params
NODAL = get_preset("nodal").params

coeff = st.floats(min_value=1e-3, max_value=1e3,
                  allow_nan=False, allow_infinity=False)


def params_from(a, b, c, d):
    return KineticsParams(a=a, b=b, c=c, d=d, mu_u=1.0, mu_v=1.0)


def test_origin_rates():
    assert reaction_rates(0.0, 0.0, WNT) == (0.0, 0.0)


def test_unit_rates():
    p = params_from(1.0, 1.0, 1.0, 1.0)
    du, dv = reaction_rates(1.0, 0.0, p)
    assert (du, dv) == (0.0, 1.0)


def test_rates_vanish_at_wnt_roots():
    for fp in fixed_points(WNT):
        du, dv = reaction_rates(fp.u, fp.v, WNT)
        scale = max(1.0, abs(fp.u), abs(fp.v))
        assert max(abs(du), abs(dv)) < 1e-10 * scale * 194.4


def test_division_guard():
    with pytest.raises(ValueError):
        reaction_rates(1.0, -1.0, WNT)
    with pytest.raises(ValueError):
        reaction_jacobian(1.0, -1.5, WNT)


def test_bmp4_single_fixed_point():
    pts = fixed_points(BMP4)
    assert len(pts) == 1
    assert pts[0].u == 0.0 and pts[0].v == 0.0
    assert pts[0].kind == STABLE_NODE


def test_wnt_fixed_points():
    pts = {fp.kind: fp for fp in fixed_points(WNT)}
    assert set(pts) == {STABLE_NODE, STABLE_FOCUS, SADDLE}
    assert pts[STABLE_FOCUS].u == pytest.approx(4.5616, abs=1e-4)
    assert pts[STABLE_FOCUS].v == pytest.approx(10.404, abs=1e-3)
    assert pts[SADDLE].u == pytest.approx(0.4384, abs=1e-4)
    assert pts[SADDLE].v == pytest.approx(0.0961, abs=1e-4)


def test_nodal_matches_wnt_pattern():
    kinds_wnt = sorted(fp.kind for fp in fixed_points(WNT))
    kinds_nodal = sorted(fp.kind for fp in fixed_points(NODAL))
    assert kinds_wnt == kinds_nodal
    assert regime_type(NODAL) == TYPE2


def test_classification_rules():
    origin = classify_fixed_point(WNT, 0.0, 0.0)
    assert origin.kind == STABLE_NODE
    assert origin.trace == pytest.approx(-(WNT.a + WNT.c))
    focus = [fp for fp in fixed_points(WNT) if fp.kind == STABLE_FOCUS][0]
    assert focus.trace == pytest.approx(WNT.a - WNT.c)  # a - c at roots
    assert focus.trace < 0 and focus.det > 0
    assert focus.trace**2 - 4 * focus.det < 0


def test_non_fixed_point_rejected():
    with pytest.raises(ValueError):
        classify_fixed_point(WNT, 1.0, 1.0)


def test_center_when_a_equals_c():
    # a = c makes trace vanish at the nonzero roots
    p = params_from(1.0, 4.0, 1.0, 1.0)
    kinds = [fp.kind for fp in fixed_points(p)]
    assert CENTER in kinds


def test_regimes():
    assert regime_type(BMP4) == TYPE1
    assert regime_type(WNT) == TYPE2


def test_jacobian_at_origin():
    jac = reaction_jacobian(0.0, 0.0, WNT)
    assert np.allclose(jac, np.diag([-WNT.a, -WNT.c]))


def test_jacobian_finite_difference():
    rng = np.random.default_rng(7)
    p = WNT
    for _ in range(100):
        u = rng.uniform(0.01, 5.0)
        v = rng.uniform(0.0, 10.0)
        jac = reaction_jacobian(u, v, p)
        eps = 1e-5
        for j, (du_, dv_) in enumerate(((eps, 0.0), (0.0, eps))):
            rp = np.array(reaction_rates(u + du_, v + dv_, p))
            rm = np.array(reaction_rates(u - du_, v - dv_, p))
            fd = (rp - rm) / (2 * eps)
            assert np.allclose(jac[:, j], fd, rtol=1e-5, atol=1e-4)


def test_jacobian_fixed_point_identity():
    # at a nonzero root: [[a, -a^2/b], [2du, -c]]
    p = WNT
    focus = [fp for fp in fixed_points(p) if fp.kind == STABLE_FOCUS][0]
    jac = reaction_jacobian(focus.u, focus.v, p)
    expected = np.array([[p.a, -p.a**2 / p.b], [2 * p.d * focus.u, -p.c]])
    assert np.allclose(jac, expected, rtol=1e-8)


def test_nullclines():
    p = params_from(1.0, 1.0, 2.0, 3.0)
    u, v_act, v_inh = nullclines(p, 2.0, 5)
    assert np.allclose(v_act, (p.b / p.a) * u - 1.0)
    assert np.allclose(v_inh, (p.d / p.c) * u * u)
    assert v_inh[0] == 0.0
    # a = b: activator nullcline passes through (1, 0)
    assert np.interp(1.0, u, v_act) == pytest.approx(0.0, abs=1e-12)


def test_nullcline_intersections_are_fixed_points():
    p = WNT
    u = np.linspace(0.0, 6.0, 200001)
    diff = ((p.b / p.a) * u - 1.0) - (p.d / p.c) * u * u
    crossings = u[np.nonzero(np.diff(np.sign(diff)))[0]]
    roots = sorted(fp.u for fp in fixed_points(p) if fp.u > 0)
    assert len(crossings) == len(roots)
    assert np.allclose(sorted(crossings), roots, atol=1e-3)


def test_invalid_params():
    with pytest.raises(ValueError):
        KineticsParams(a=0.0, b=1.0, c=1.0, d=1.0, mu_u=1.0, mu_v=1.0)
    with pytest.raises(ValueError):
        KineticsParams(a=1.0, b=1.0, c=1.0, d=1.0, mu_u=1.0, mu_v=1.0, h_u=-1.0)


@settings(max_examples=200, deadline=None)
@given(a=coeff, b=coeff, c=coeff, d=coeff)
def test_fixed_point_residuals(a, b, c, d):
    p = params_from(a, b, c, d)
    for fp in fixed_points(p):
        du, dv = reaction_rates(fp.u, fp.v, p)
        scale = max(1.0, abs(fp.u), abs(fp.v)) * max(a, b, c, d)
        assert max(abs(du), abs(dv)) <= 1e-10 * scale


@settings(max_examples=200, deadline=None)
@given(a=coeff, b=coeff, c=coeff, d=coeff,
       lam=st.floats(min_value=1e-3, max_value=1e3))
def test_regime_scale_invariance(a, b, c, d, lam):
    p = params_from(a, b, c, d)
    assert regime_type(p) == regime_type(p.scaled_reactions(lam))


@settings(max_examples=100, deadline=None)
@given(a=coeff, b=coeff, c=coeff, d=coeff)
def test_kind_pattern_scale_invariance(a, b, c, d):
    # u-coordinates scale-free: kinds preserved under common factor
    p = params_from(a, b, c, d)
    q = p.scaled_reactions(0.4)  # the factor linking the two type-2 presets
    kinds_p = sorted((round(fp.u, 9), fp.kind) for fp in fixed_points(p))
    kinds_q = sorted((round(fp.u, 9), fp.kind) for fp in fixed_points(q))
    assert [k for _, k in kinds_p] == [k for _, k in kinds_q]
    assert np.allclose([u for u, _ in kinds_p], [u for u, _ in kinds_q],
                       rtol=1e-9, atol=1e-12)


def test_wnt_nodal_scaling_link():
    # the second type-2 preset is 0.4x the first in a, b, d (c column too)
    assert NODAL.a == pytest.approx(0.4 * WNT.a)
    assert NODAL.b == pytest.approx(0.4 * WNT.b)
    assert NODAL.c == pytest.approx(0.4 * WNT.c)
    assert NODAL.d == pytest.approx(0.4 * WNT.d)
    pts_w = sorted(fp.u for fp in fixed_points(WNT))
    pts_n = sorted(fp.u for fp in fixed_points(NODAL))
    assert np.allclose(pts_w, pts_n, rtol=1e-12)
