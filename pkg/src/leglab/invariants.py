"""PL link invariants: linking number, writhe, Thurston-Bennequin number.

Crossing sign convention: at a projected crossing, the sign is the sign
of det(d_over, d_under, dir), where d_over / d_under are the 3D edge
directions of the over- and under-strand and dir is the projection
direction.  In a picture with dir pointing at the viewer: rotating the
over-strand counterclockwise onto the under-strand gives +1::

      over                 over
       ^                    ^
        \\                  /
    -----\\---> under  <---/----- under
          \\              /
        sign +1        sign -1

Linking numbers are computed as half the signed inter-curve crossing
count along one of eight fixed, documented generic directions and
cross-checked against the Gauss solid-angle sum.
"""
from __future__ import annotations

from dataclasses import dataclass

import csv
import io
import math

import numpy as np

from .errors import GenericityError, NumericalError, ValidationError
from .forms import ContactForm, LEGENDRIAN_REL_TOL, legendrian_residual, line_integral_beta, _edge_integrals
from .geometry import PlaneCurve, SpaceCurve

GAUSS_AGREEMENT_TOL = 1e-6
_PARAM_TOL = 1e-9          # crossing parameters must be this far from edge ends
_HEIGHT_REL_TOL = 1e-12    # strand height separation at a crossing, x scale

# Eight fixed generic projection directions (unit vectors, z-positive).
GENERIC_DIRECTIONS = np.array([
    (-0.19448090938669016, 0.43583311851475770, 0.87876428505591142),
    (-0.69962894135266529, 0.26622041273958247, 0.66305809418369610),
    (-0.39155827039459856, -0.14110042770304432, 0.90927047141519368),
    (-0.20872525192758790, -0.12010601986481229, 0.97057112732658501),
    (0.07936348978967275, 0.19047058350164897, 0.97847963356880652),
    (-0.44296769015272008, 0.32595773238469672, 0.83518332249835436),
    (-0.57496868178190885, -0.21522941249213978, 0.78935879989283853),
    (-0.59139789972715606, -0.45534570682626896, 0.66551394536342678),
])


@dataclass(frozen=True)
class CrossingRecord:
    edge_a: int
    edge_b: int
    point: tuple[float, float]     # intersection in projection-plane coordinates
    sign: int
    over: str                      # "a" or "b": which edge passes over

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValidationError("crossing sign must be +-1")


def crossings_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["edge_a", "edge_b", "x", "y", "sign", "over"])
    for r in records:
        w.writerow([r.edge_a, r.edge_b, repr(r.point[0]), repr(r.point[1]), r.sign, r.over])
    return buf.getvalue()


def _projection_basis(direction):
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    helper = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(helper, d)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return e1, e2, d


def _edges(curve: SpaceCurve):
    v = curve.vertices
    m = curve.n_edges
    idx = np.arange(m)
    return v[idx % len(v)], v[(idx + 1) % len(v)]


def _pair_crossings(a0, a1, b0, b1, basis, skip_mask=None):
    """Signed crossings between two edge families projected along basis[2].

    Returns a list of (i, j, point2d, sign, over) tuples; raises
    GenericityError on near-degenerate configurations.
    """
    e1, e2, d = basis
    scale = max(float(np.abs(np.vstack([a0, a1, b0, b1])).max()), 1.0)

    pa0 = np.column_stack([a0 @ e1, a0 @ e2])
    pa1 = np.column_stack([a1 @ e1, a1 @ e2])
    pb0 = np.column_stack([b0 @ e1, b0 @ e2])
    pb1 = np.column_stack([b1 @ e1, b1 @ e2])
    ha0, ha1 = a0 @ d, a1 @ d
    hb0, hb1 = b0 @ d, b1 @ d

    da = pa1 - pa0                       # (m, 2)
    db = pb1 - pb0                       # (n, 2)
    # solve pa0 + s*da = pb0 + t*db for all pairs
    denom = da[:, None, 0] * db[None, :, 1] - da[:, None, 1] * db[None, :, 0]
    rx = pb0[None, :, 0] - pa0[:, None, 0]
    ry = pb0[None, :, 1] - pa0[:, None, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (rx * db[None, :, 1] - ry * db[None, :, 0]) / denom
        t = (rx * da[:, None, 1] - ry * da[:, None, 0]) / denom

    norm_prod = np.linalg.norm(da, axis=1)[:, None] * np.linalg.norm(db, axis=1)[None, :]
    parallel = np.abs(denom) <= 1e-12 * norm_prod
    interior = (~parallel) & (s > 0.0) & (s < 1.0) & (t > 0.0) & (t < 1.0)
    if skip_mask is not None:
        interior &= ~skip_mask
        parallel_relevant = parallel & ~skip_mask
    else:
        parallel_relevant = parallel

    # near-endpoint crossings are non-generic
    close = interior & ((s < _PARAM_TOL) | (s > 1 - _PARAM_TOL)
                        | (t < _PARAM_TOL) | (t > 1 - _PARAM_TOL))
    if close.any():
        raise GenericityError("crossing too close to an edge endpoint")

    # overlapping parallel edges in projection are non-generic; parallel
    # but separated pairs are fine.  Check only pairs whose projections
    # come close.
    if parallel_relevant.any():
        from .geometry import _segment_to_segments_distance
        for i in np.nonzero(parallel_relevant.any(axis=1))[0]:
            jj = np.nonzero(parallel_relevant[i])[0]
            dist = _segment_to_segments_distance(pa0[i], pa1[i], pb0[jj], pb1[jj])
            if dist.min() <= 1e-9 * scale:
                raise GenericityError("parallel overlapping edges in projection")

    out = []
    ii, jj = np.nonzero(interior)
    for i, j in zip(ii, jj):
        si, tj = float(s[i, j]), float(t[i, j])
        h_a = ha0[i] + si * (ha1[i] - ha0[i])
        h_b = hb0[j] + tj * (hb1[j] - hb0[j])
        if abs(h_a - h_b) <= _HEIGHT_REL_TOL * scale:
            raise GenericityError("strands at equal height over a crossing")
        if h_a > h_b:
            d_over, d_under, over = a1[i] - a0[i], b1[j] - b0[j], "a"
        else:
            d_over, d_under, over = b1[j] - b0[j], a1[i] - a0[i], "b"
        det = float(np.linalg.det(np.column_stack([d_over, d_under, d])))
        if det == 0.0:
            raise GenericityError("degenerate crossing determinant")
        pt = pa0[i] + si * (pa1[i] - pa0[i])
        out.append(CrossingRecord(int(i), int(j), (float(pt[0]), float(pt[1])),
                                  1 if det > 0 else -1, over))
    return out


def _proj_segment_distance(p0, p1, q0, q1) -> float:
    from .geometry import _segment_to_segments_distance
    return float(_segment_to_segments_distance(p0, p1, q0[None], q1[None])[0])


def inter_crossings(c1: SpaceCurve, c2: SpaceCurve, direction) -> list[CrossingRecord]:
    basis = _projection_basis(direction)
    a0, a1 = _edges(c1)
    b0, b1 = _edges(c2)
    return _pair_crossings(a0, a1, b0, b1, basis)


def self_crossings(curve: SpaceCurve, direction) -> list[CrossingRecord]:
    basis = _projection_basis(direction)
    a0, a1 = _edges(curve)
    m = len(a0)
    idx = np.arange(m)
    diff = np.abs(idx[:, None] - idx[None, :])
    adjacent = diff <= 1
    if curve.closed:
        adjacent |= diff == m - 1
    skip = adjacent | (idx[:, None] >= idx[None, :])   # keep each pair once, i < j
    return _pair_crossings(a0, a1, a0, a1, basis, skip_mask=skip)


def _with_generic_direction(fn):
    last = None
    for d in GENERIC_DIRECTIONS:
        try:
            return fn(d)
        except GenericityError as exc:
            last = exc
    raise GenericityError(
        f"all fixed projection directions are degenerate: {last}")


def gauss_linking(c1: SpaceCurve, c2: SpaceCurve) -> float:
    """Gauss linking integral, exact for PL curves via solid angles.

    Oriented to agree with the crossing-sign convention documented in
    the module docstring.
    """
    a0, a1 = _edges(c1)
    b0, b1 = _edges(c2)
    total = 0.0
    for i in range(len(a0)):
        r1 = b0 - a0[i]
        r2 = b1 - a0[i]
        r3 = b1 - a1[i]
        r4 = b0 - a1[i]
        n1, n2, n3, n4 = (r / np.linalg.norm(r, axis=1, keepdims=True)
                          for r in (r1, r2, r3, r4))
        total += _solid_angle(n1, n2, n3) + _solid_angle(n1, n3, n4)
    return -total / (4.0 * math.pi)


def _solid_angle(u, v, w) -> float:
    """Sum of signed solid angles of spherical triangles (rows are unit)."""
    triple = np.einsum("ij,ij->i", u, np.cross(v, w))
    denom = 1.0 + np.einsum("ij,ij->i", u, v) + np.einsum("ij,ij->i", v, w) \
        + np.einsum("ij,ij->i", w, u)
    return float(np.sum(2.0 * np.arctan2(triple, denom)))


def linking_number(c1: SpaceCurve, c2: SpaceCurve,
                   cross_check: bool = True) -> int:
    """Half the signed inter-curve crossing count along a generic direction."""
    if not (c1.closed and c2.closed):
        raise ValidationError("linking number needs closed curves")

    def compute(d):
        records = inter_crossings(c1, c2, d)
        total = sum(r.sign for r in records)
        if total % 2 != 0:
            raise GenericityError("odd signed crossing sum")
        return total // 2

    lk = _with_generic_direction(compute)
    if cross_check:
        gauss = gauss_linking(c1, c2)
        if abs(gauss - lk) >= 0.5 - 1e-9 or abs(gauss - round(gauss)) > GAUSS_AGREEMENT_TOL:
            raise NumericalError(
                f"crossing count {lk} disagrees with Gauss integral {gauss}")
    return int(lk)


def writhe(curve: SpaceCurve, direction) -> int:
    """Signed self-crossing count of the projection along `direction`."""
    if not curve.closed:
        raise ValidationError("writhe needs a closed curve")
    records = self_crossings(curve, direction)
    return int(sum(r.sign for r in records))


def min_crossing_clearance(curve: SpaceCurve) -> float:
    """Smallest height separation over xy-diagram crossings.

    Falls back to the minimal gap between non-adjacent 3D edges when the
    diagram has no crossings.
    """
    def compute(d):
        return self_crossings(curve, d)
    try:
        records = self_crossings(curve, (0.0, 0.0, 1.0))
    except GenericityError:
        records = _with_generic_direction(compute)
    if records:
        v = curve.vertices
        a0, a1 = _edges(curve)
        best = math.inf
        for r in records:
            # recover heights from the stored projection point
            best = min(best, _crossing_height_gap(curve, r))
        return best
    gap = curve.min_self_gap()
    if gap is None or gap <= 0:
        raise ValidationError("cannot estimate strand clearance")
    return gap


def _crossing_height_gap(curve: SpaceCurve, rec: CrossingRecord) -> float:
    a0, a1 = _edges(curve)
    e1, e2, d = _projection_basis((0.0, 0.0, 1.0))
    pt = np.array(rec.point)
    def height(i):
        p0 = np.array([a0[i] @ e1, a0[i] @ e2])
        p1 = np.array([a1[i] @ e1, a1[i] @ e2])
        seg = p1 - p0
        s = float((pt - p0) @ seg / (seg @ seg))
        return float(a0[i] @ d + s * (a1[i] @ d - a0[i] @ d))
    return abs(height(rec.edge_a) - height(rec.edge_b))


def thurston_bennequin(form: ContactForm, curve: SpaceCurve,
                       residual_tol: float | None = LEGENDRIAN_REL_TOL,
                       cross_check: bool = True) -> int:
    """Self-linking of a Legendrian loop with its vertical push-off.

    Primary value: writhe of the vertical-projection diagram.  When
    `cross_check` is on, the value is verified against the linking
    number with a small vertical push-off.  Set residual_tol=None to
    skip the Legendrian precondition (the diagram count still makes
    sense for nearly Legendrian data).
    """
    if not curve.closed:
        raise ValidationError("Thurston-Bennequin number needs a closed curve")
    if residual_tol is not None:
        verdict = legendrian_residual(form, curve)
        if verdict.relative_residual > residual_tol:
            raise ValidationError(
                f"curve is not Legendrian: relative residual {verdict.relative_residual:.3e}")

    def compute(d):
        return self_crossings(curve, d)
    try:
        records = self_crossings(curve, (0.0, 0.0, 1.0))
    except GenericityError:
        records = _with_generic_direction(compute)
    tb = int(sum(r.sign for r in records))

    if cross_check:
        eps = min_crossing_clearance(curve) / 10.0
        if eps <= 0:
            raise ValidationError("strand heights too close for a push-off check")
        push = SpaceCurve(curve.vertices + np.array([0.0, 0.0, eps]),
                          closed=True, check_embedded=False)
        lk = linking_number(curve, push, cross_check=False)
        if lk != tb:
            raise NumericalError(
                f"diagram writhe {tb} disagrees with push-off linking {lk}")
    return tb


def alpha_edge_values(form: ContactForm, curve: SpaceCurve) -> np.ndarray:
    """Integral of dz + beta along every edge (sign pattern = transversality)."""
    v = curve.vertices
    m = curve.n_edges
    idx = np.arange(m)
    starts, ends = v[idx % len(v)], v[(idx + 1) % len(v)]
    beta = _edge_integrals(form, starts[:, :2], ends[:, :2])
    return (ends[:, 2] - starts[:, 2]) + beta


def transverse_pushoff(form: ContactForm, grid: np.ndarray, row: int,
                       z0: float) -> SpaceCurve:
    """Lift one row of a collar grid to a (typically transverse) loop.

    `grid` has shape (n_rows, n_s, 2); each row is a closed plane loop
    sampled uniformly in s over [0, 2*pi).  The z-coordinate over row t is

        z(s) = z0 - int_{row[0..s]} beta + (s / 2pi) * loop-integral(beta)

    so row 0 of a Legendrian collar reproduces the Legendrian lift.
    """
    grid = np.asarray(grid, float)
    if grid.ndim != 3 or grid.shape[2] != 2:
        raise ValidationError("grid must have shape (n_rows, n_s, 2)")
    if not (0 <= row < grid.shape[0]):
        raise ValidationError("row index out of range")
    pts = grid[row]
    loop = PlaneCurve(pts, closed=True, check_embedded=False)
    total, cumulative = line_integral_beta(form, loop)
    n_s = len(pts)
    s_frac = np.arange(n_s) / n_s
    z = z0 - cumulative[:-1] + s_frac * total
    return SpaceCurve(np.column_stack([pts, z]), closed=True, check_embedded=False)
