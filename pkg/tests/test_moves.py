import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leglab import (CorrectionSquare, DiskChart, IsotopyTrace, PlaneCurve,
                    RangeError, ValidationError, bilipschitz_constant,
                    bypass_isotopy, chord_arc_constant, corner_angle,
                    corner_round, correction_field, form_xdy,
                    legendrian_isotopy_lift, legendrian_residual,
                    line_integral_beta, min_corner_angle, mobius_arc,
                    region_beta_boundary_integral, solve_correction)
from leglab.gallery import one_crossing_unknot
from leglab.moves import chart_from_json_dict, square_from_json_dict, \
    trace_from_json_dict


def test_model_arc_endpoints_are_exact():
    for t in (0.0, 0.25, 0.5, 1.0):
        assert mobius_arc(1.0, t) == 1.0 + 0.0j
        assert mobius_arc(-1.0, t) == -1.0 + 0.0j


def test_model_arc_midtime_is_straight():
    s = np.linspace(1.0, -1.0, 33)
    pts = np.array([mobius_arc(float(v), 0.5) for v in s])
    assert np.abs(pts.imag).max() < 1e-15


def test_model_arc_sweeps_between_semicircles():
    up = np.array([mobius_arc(0.0, 0.0)])
    dn = np.array([mobius_arc(0.0, 1.0)])
    assert up[0] == pytest.approx(1j)
    assert dn[0] == pytest.approx(-1j)


def test_chart_roundtrip_and_json():
    chart = DiskChart(1.0 + 2.0j, 0.5 - 0.25j, 0.2 + 0.1j, 0.7)
    for z in (0.3 + 0.4j, -0.9j, 0.99, 0.0):
        back = chart.inverse(chart.map(z))
        assert abs(back - z) < 1e-12
    back = chart_from_json_dict(chart.to_json_dict())
    assert abs(back.map(0.3 + 0.4j) - chart.map(0.3 + 0.4j)) < 1e-15


def test_bypass_moves_arc_and_fixes_complement():
    sc = one_crossing_unknot()
    trace = bypass_isotopy(sc.chart, sc.curve, sc.attach, (0.0, 0.5, 1.0),
                           form_xdy())
    i0, i1 = sc.attach
    v0 = sc.curve.vertices
    for frame in trace.frames:
        np.testing.assert_array_equal(frame.vertices[:i0], v0[:i0])
        np.testing.assert_array_equal(frame.vertices[i1:], v0[i1:])
    # start frame is the input curve
    np.testing.assert_allclose(trace.frames[0].vertices, v0, atol=1e-12)
    # reports carry the metric data
    assert all("moved_chord_arc" in r for r in trace.reports)
    assert max(r["moved_chord_arc"] for r in trace.reports) <= math.pi / 2 + 1e-6


def test_bypass_rejects_bad_attach():
    sc = one_crossing_unknot()
    with pytest.raises(ValidationError):
        bypass_isotopy(sc.chart, sc.curve, (0, 5), (0.0, 1.0))


def test_trace_json_roundtrip():
    sc = one_crossing_unknot()
    trace = bypass_isotopy(sc.chart, sc.curve, sc.attach, (0.0, 1.0))
    back = trace_from_json_dict(__import__("json").loads(trace.to_json()))
    assert back.times == trace.times
    np.testing.assert_array_equal(back.frames[1].vertices,
                                  trace.frames[1].vertices)


def test_corner_round_is_tangent():
    cur = PlaneCurve([[0, 0], [1, 0], [1, 1]])
    out = corner_round(cur, 1, 0.2, 16)
    # ends preserved, corner gone, all new corners much flatter
    np.testing.assert_array_equal(out.vertices[0], cur.vertices[0])
    np.testing.assert_array_equal(out.vertices[-1], cur.vertices[-1])
    angle, _ = min_corner_angle(out)
    assert angle > math.pi - 0.2
    # the arc stays inside the corner: x <= 1 and y >= 0
    assert out.vertices[:, 0].max() <= 1.0 + 1e-12
    assert out.vertices[:, 1].min() >= -1e-12
    # rounding reduces the chord-arc constant of the wedge
    assert chord_arc_constant(out).constant < chord_arc_constant(cur).constant


def test_corner_round_validates_delta():
    cur = PlaneCurve([[0, 0], [1, 0], [1, 1]])
    with pytest.raises(ValidationError):
        corner_round(cur, 1, 0.9, 8)
    with pytest.raises(ValidationError):
        corner_round(cur, 0, 0.1, 8)


def _unit_square_field_setup():
    square = CorrectionSquare([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], -0.5, 0.5)
    return square, form_xdy()


def test_correction_field_center_value_and_decay():
    square, form = _unit_square_field_setup()
    field = correction_field(square, form, +1)
    # at the center, f = det = 1 and the bump is exp(-1)*exp(-1)
    val = field(np.array([[0.0, 0.0]]))
    assert val[0, 0] == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert val[0, 1] == 0.0
    # vanishes on and outside the boundary
    edge = field(np.array([[0.999999, 0.0], [0.0, 0.999999], [2.0, 0.0]]))
    assert np.abs(edge).max() < 1e-6


def test_correction_field_sign_mirrors():
    square, form = _unit_square_field_setup()
    plus = correction_field(square, form, +1)
    minus = correction_field(square, form, -1)
    p = np.array([[0.2, 0.3]])
    m = np.array([[-0.2, 0.3]])
    assert plus(p)[0, 0] == pytest.approx(-minus(m)[0, 0], rel=1e-12)
    assert plus(p)[0, 0] > 0.0 and minus(m)[0, 0] < 0.0


def test_solve_correction_hits_target_both_signs():
    square, form = _unit_square_field_setup()
    vv = np.linspace(-1.0, 1.0, 41)
    moved = PlaneCurve(square.to_plane(np.column_stack([0.0 * vv, vv])),
                       check_embedded=False)
    base = line_integral_beta(form, moved)[0]
    for delta in (0.05, -0.05):
        t, arc, sign = solve_correction(square, form, moved, moved,
                                        base + delta)
        got = line_integral_beta(form, arc)[0]
        assert got == pytest.approx(base + delta, abs=1e-9)
        assert sign == (1 if delta > 0 else -1)
        # endpoints pinned
        np.testing.assert_allclose(arc.vertices[0], moved.vertices[0],
                                   atol=1e-12)
        np.testing.assert_allclose(arc.vertices[-1], moved.vertices[-1],
                                   atol=1e-12)


def test_solve_correction_range_error():
    square, form = _unit_square_field_setup()
    vv = np.linspace(-1.0, 1.0, 21)
    moved = PlaneCurve(square.to_plane(np.column_stack([0.0 * vv, vv])),
                       check_embedded=False)
    base = line_integral_beta(form, moved)[0]
    with pytest.raises(RangeError):
        solve_correction(square, form, moved, moved, base + 10.0, max_time=4.0)


def test_region_integral_is_signed_area():
    form = form_xdy()
    up = PlaneCurve([[0, 0], [1, 0], [1, 1]], check_embedded=False)
    down = PlaneCurve([[1, 1], [0, 1], [0, 0]], check_embedded=False)
    # loop = ccw unit square: dbeta-area 1
    assert region_beta_boundary_integral(form, up, down) == pytest.approx(1.0)


def test_isotopy_lift_pins_base_and_conserves():
    sc = one_crossing_unknot()
    form = form_xdy()
    trace = IsotopyTrace((0.0,), (sc.curve,))
    lifted = legendrian_isotopy_lift(form, trace, sc.base_vertex, 0.25)
    frame = lifted.frames[0]
    assert frame.closed
    assert frame.vertices[sc.base_vertex, 2] == pytest.approx(0.25, abs=1e-12)
    assert legendrian_residual(form, frame).relative_residual < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-0.999, 0.999))
def test_model_arc_stays_in_disk(t, s):
    z = mobius_arc(s, t)
    assert abs(z) <= 1.0 + 1e-12
