import math

import numpy as np
import pytest

from leglab import (GenericityError, PlaneCurve, SpaceCurve, ValidationError,
                    form_minus_ydx, form_xdy, gauss_linking, lift,
                    linking_number, thurston_bennequin, transverse_pushoff,
                    writhe)
from leglab.gallery import lance_thomas_unknot, one_crossing_unknot
from leglab.invariants import crossings_to_csv, self_crossings
from leglab.moves import legendrian_isotopy_lift, IsotopyTrace


def _circle(radius=1.0, center=(0, 0, 0), plane="xy", n=64):
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    c, s = radius * np.cos(th), radius * np.sin(th)
    zero = np.zeros_like(th)
    if plane == "xy":
        pts = np.column_stack([c, s, zero])
    else:  # xz
        pts = np.column_stack([c, zero, s])
    return SpaceCurve(pts + np.asarray(center, float), closed=True)


def _trefoil(mirror=False, n=400):
    t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    x = np.sin(t) + 2.0 * np.sin(2.0 * t)
    y = np.cos(t) - 2.0 * np.cos(2.0 * t)
    z = -np.sin(3.0 * t)
    if mirror:
        z = -z
    return SpaceCurve(np.column_stack([x, y, z]), closed=True)


def test_hopf_link_both_methods():
    a = _circle()
    b = _circle(center=(1, 0, 0), plane="xz")
    lk = linking_number(a, b)
    assert abs(lk) == 1
    assert abs(gauss_linking(a, b) - lk) < 0.5
    # symmetry and orientation-reversal
    assert linking_number(b, a) == lk
    assert linking_number(a.reversed(), b) == -lk


def test_split_link_is_zero():
    a = _circle()
    b = _circle(center=(5, 0, 0), plane="xz")
    assert linking_number(a, b) == 0
    assert abs(gauss_linking(a, b)) < 1e-6


def test_linking_requires_closed_curves():
    a = _circle()
    open_arc = SpaceCurve([[0, 0, 0], [1, 0, 0], [1, 1, 0]],
                          check_embedded=False)
    with pytest.raises(ValidationError):
        linking_number(a, open_arc)


def test_trefoil_writhe_and_mirror():
    z = (0.0, 0.0, 1.0)
    assert writhe(_trefoil(), z) == -3
    assert writhe(_trefoil(mirror=True), z) == 3


def test_unknot_writhe_zero():
    assert writhe(_circle(), (0.0, 0.0, 1.0)) == 0


def test_self_crossings_of_figure_eight_diagram():
    sc = one_crossing_unknot()
    lifted = lift(form_xdy(), sc.curve, 0.0, subdivision=1).curve
    records = self_crossings(lifted, (0.0, 0.0, 1.0))
    assert len(records) == 1
    assert records[0].sign in (-1, 1)
    text = crossings_to_csv(records)
    assert text.splitlines()[0].startswith("edge_a")


def test_tb_of_one_crossing_unknot():
    form = form_xdy()
    sc = one_crossing_unknot()
    lifted = legendrian_isotopy_lift(form, IsotopyTrace((0.0,), (sc.curve,)),
                                     sc.base_vertex, 0.0).frames[0]
    assert thurston_bennequin(form, lifted) == -1


def test_tb_gate_on_residual():
    bad = SpaceCurve([[0, 0, 0], [1, 0, 1], [1, 1, 0], [0, 1, 2]], closed=True,
                     check_embedded=False)
    with pytest.raises(ValidationError):
        thurston_bennequin(form_xdy(), bad)
    # gate can be waived explicitly
    tb = thurston_bennequin(form_xdy(), bad, residual_tol=None,
                            cross_check=False)
    assert isinstance(tb, int)


def test_tb_of_fractal_unknots_is_zero():
    form = form_minus_ydx()
    for n in (2, 3):
        u = lance_thomas_unknot(n, 1.0)
        assert thurston_bennequin(form, u.curve, residual_tol=None) == 0


def test_transverse_pushoff_layout():
    th = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    radii = np.array([0.9, 1.0, 1.1])
    grid = np.stack([np.column_stack([r * np.cos(th), r * np.sin(th)])
                     for r in radii])
    loop = transverse_pushoff(form_xdy(), grid, 1, 0.0)
    assert loop.closed and len(loop.vertices) == 64
    np.testing.assert_allclose(loop.vertices[:, :2], grid[1], atol=1e-12)
