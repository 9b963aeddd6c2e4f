import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leglab import (NonInjectiveProjectionError, PlaneCurve, SpaceCurve,
                    form_minus_ydx, form_rot, form_xdy, legendrian_residual,
                    lift, line_integral_beta, project, projection_bounds_check)

SQUARE = PlaneCurve([[0, 0], [1, 0], [1, 1], [0, 1]], closed=True)


def test_open_lift_is_exactly_legendrian():
    plane = PlaneCurve([[0.0, 0.0], [1.0, 0.0], [1.0, 2.0], [0.5, 2.5]])
    res = lift(form_xdy(), plane, 0.3)
    assert res.curve.vertices[0, 2] == 0.3
    assert res.closure_defect == 0.0
    v = legendrian_residual(form_xdy(), res.curve)
    assert v.relative_residual < 1e-14
    # z drop equals the running beta integral (oracle: trapezoid rule,
    # exact for x dy on straight edges)
    x = plane.vertices[:, 0]
    y = plane.vertices[:, 1]
    drops = 0.5 * (x[1:] + x[:-1]) * np.diff(y)
    picked = res.curve.vertices[::res.subdivision, 2]
    np.testing.assert_allclose(picked, 0.3 - np.concatenate(([0.0], np.cumsum(drops))),
                               atol=1e-14)


def test_closed_lift_defect_is_minus_loop_integral():
    res = lift(form_xdy(), SQUARE, 0.0, closure_rel_tol=0.0)
    assert not res.curve.closed          # enclosed area 1 obstructs closure
    assert res.closure_defect == pytest.approx(-1.0, abs=1e-14)


def test_zero_area_loop_closes():
    # figure-eight-like loop with balanced signed area under x dy
    bow = PlaneCurve([[0, 0], [1, 0], [0, 1], [1, 1]], closed=True,
                     check_embedded=False)
    assert line_integral_beta(form_xdy(), bow)[0] == pytest.approx(0.0, abs=1e-15)
    res = lift(form_xdy(), bow, 0.0)
    assert res.curve.closed
    assert abs(res.closure_defect) < 1e-14


def test_project_roundtrip():
    plane = PlaneCurve([[0.2, 0.1], [0.9, 0.3], [0.7, 1.1]])
    res = lift(form_rot(), plane, 0.0, subdivision=2)
    flat = project(res.curve)
    assert isinstance(flat, PlaneCurve)
    np.testing.assert_allclose(flat.vertices[::2], plane.vertices, atol=1e-14)


def test_project_rejects_vertical_edges():
    with pytest.raises(NonInjectiveProjectionError):
        project(SpaceCurve([[0, 0, 0], [0, 0, 1], [1, 0, 1]],
                           check_embedded=False))


def test_projection_bounds_report():
    plane = PlaneCurve([[0.5, 0.2], [1.0, 0.4], [0.8, 1.0], [0.3, 0.8]])
    res = lift(form_xdy(), plane, 0.0, subdivision=4)
    rep = projection_bounds_check(form_xdy(), res.curve)
    assert rep.satisfied
    assert rep.constant == pytest.approx(
        math.sqrt(1.0 + (rep.sup_beta * rep.chord_arc) ** 2))
    assert rep.worst_distance_margin >= -1e-12
    assert rep.worst_length_margin >= -1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(0.2, 2.0), st.floats(-1.0, 1.0))
def test_closed_lift_defect_matches_area(w, h, x0):
    rect = PlaneCurve(np.array([[0, 0], [w, 0], [w, h], [0, h]]) + [x0, 0.0],
                      closed=True)
    res = lift(form_xdy(), rect, 0.0, closure_rel_tol=0.0)
    assert res.closure_defect == pytest.approx(-w * h, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6))
def test_subdivision_does_not_change_endpoint(k):
    plane = PlaneCurve([[0.0, 0.0], [1.0, 0.5], [0.4, 1.2]])
    coarse = lift(form_minus_ydx(), plane, 0.0, subdivision=1)
    fine = lift(form_minus_ydx(), plane, 0.0, subdivision=k)
    assert coarse.curve.vertices[-1, 2] == pytest.approx(
        fine.curve.vertices[-1, 2], abs=1e-13)
