import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leglab import (Hamiltonian, PlaneCurve, SpaceCurve, ValidationError,
                    angle_profile, flow, form_from_json_dict, form_minus_ydx,
                    form_poly, form_rot, form_xdy, hamiltonian_field,
                    legendrian_residual, lift, line_integral_alpha,
                    line_integral_beta)

SQUARE = PlaneCurve([[0, 0], [1, 0], [1, 1], [0, 1]], closed=True)


def test_loop_integral_equals_area():
    # d(x dy) = dx^dy: the loop integral of x dy is the enclosed area
    total, cum = line_integral_beta(form_xdy(), SQUARE)
    assert total == pytest.approx(1.0, abs=1e-14)
    assert len(cum) == 5 and cum[0] == 0.0
    assert line_integral_beta(form_minus_ydx(), SQUARE)[0] == pytest.approx(1.0)
    # d(x dy - y dx) = 2 dx^dy
    assert line_integral_beta(form_rot(), SQUARE)[0] == pytest.approx(2.0)


def test_edge_integral_exact_trapezoid():
    # x dy over the single edge (0,0)->(2,3): integral of (2t)(3 dt) = 3
    seg = PlaneCurve([[0, 0], [2, 3]])
    assert line_integral_beta(form_xdy(), seg)[0] == pytest.approx(3.0, abs=1e-14)


def test_poly_form_matches_closed_form():
    # beta = x^2 y dx + (x + y^3) dy over a circle; oracle: dbeta area integral
    form = form_poly([[0, 0], [0, 0], [0, 1]], [[0, 0, 0, 1], [1, 0, 0, 0]])
    th = np.linspace(0.0, 2.0 * math.pi, 20001)[:-1]
    circle = PlaneCurve(np.column_stack([np.cos(th), np.sin(th)]), closed=True)
    total = line_integral_beta(form, circle)[0]
    # dbeta = (d b/dx - d a/dy) dx^dy = (1 - x^2) dx^dy; over the unit disk
    # the integral is pi - pi/4
    assert total == pytest.approx(math.pi - math.pi / 4.0, abs=1e-6)


def test_form_json_roundtrip():
    for f in (form_xdy(), form_minus_ydx(), form_rot(),
              form_poly([[0, 1]], [[0], [2]])):
        back = form_from_json_dict(f.to_json_dict())
        assert back.kind == f.kind
        pts = np.array([[0.3, 0.4], [1.2, -0.7]])
        np.testing.assert_allclose(back.beta(pts), f.beta(pts))


def test_legendrian_residual_flags_non_legendrian():
    bad = SpaceCurve([[0, 0, 0], [1, 0, 0], [1, 1, 0]], check_embedded=False)
    v = legendrian_residual(form_xdy(), bad)
    assert not v.accepted
    good = lift(form_xdy(), PlaneCurve([[0, 0], [1, 0], [1, 1]]), 0.0).curve
    assert legendrian_residual(form_xdy(), good).accepted


def test_alpha_integral_is_dz_plus_beta():
    seg = SpaceCurve([[0, 0, 0], [2, 3, 5]], check_embedded=False)
    total = line_integral_alpha(form_xdy(), seg)[-1]
    assert total == pytest.approx(5.0 + 3.0, abs=1e-12)  # dz part + x dy part


def test_angle_profile_horizontal_and_vertical():
    flat = SpaceCurve([[0, 0, 0], [1, 0, 0]], check_embedded=False)
    assert angle_profile(form_xdy(), flat, [2.0])[0][1] == pytest.approx(0.0)
    vert = SpaceCurve([[0, 0, 0], [0, 0, 1]], check_embedded=False)
    assert angle_profile(form_xdy(), vert, [2.0])[0][1] == pytest.approx(math.pi / 2)


def test_constant_hamiltonian_translates_z():
    field = hamiltonian_field(form_xdy(), Hamiltonian.constant(0.7))
    pts = np.array([[0.2, -0.3, 1.0], [1.5, 0.4, -2.0]])
    out = flow(field, pts, 2.0, 1.0 / 64)
    np.testing.assert_allclose(out[:, :2], pts[:, :2], atol=1e-12)
    np.testing.assert_allclose(out[:, 2], pts[:, 2] + 1.4, atol=1e-10)


def test_coordinate_hamiltonian_preserves_legendrians():
    # flowing a Legendrian lift along a contact vector field keeps it
    # Legendrian (checked numerically at moderate tolerance)
    form = form_xdy()
    plane = PlaneCurve([[0.1, 0.0], [0.8, 0.2], [1.0, 1.0]])
    cur = lift(form, plane, 0.0, subdivision=64).curve
    field = hamiltonian_field(form, Hamiltonian.coordinate_y())
    moved = SpaceCurve(flow(field, cur.vertices, 0.5, 1.0 / 256),
                       check_embedded=False)
    assert legendrian_residual(form, moved).relative_residual < 1e-5


def test_flow_rejects_bad_step():
    field = hamiltonian_field(form_xdy(), Hamiltonian.constant(1.0))
    with pytest.raises(ValidationError):
        flow(field, [[0, 0, 0]], 1.0, 0.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(0.2, 2.0))
def test_rectangle_loop_area_identity(w, h):
    rect = PlaneCurve([[0, 0], [w, 0], [w, h], [0, h]], closed=True)
    assert line_integral_beta(form_xdy(), rect)[0] == pytest.approx(w * h, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2))
def test_reversal_negates_integral(idx):
    form = (form_xdy, form_minus_ydx, form_rot)[idx]()
    cur = PlaneCurve([[0.3, 0.1], [1.0, 0.4], [0.8, 1.2], [0.2, 0.9]])
    a = line_integral_beta(form, cur)[0]
    b = line_integral_beta(form, cur.reversed())[0]
    assert b == pytest.approx(-a, rel=1e-12, abs=1e-14)
