"""Generators for the library's explicit example curves.

Includes the cusp curve, the logarithmic-spiral leaf, the iterated
Lance-Thomas square-filling curve with its closed Legendrian lift, a
one-crossing Legendrian unknot used by the invariant tests, and the
cylindrical contactomorphism / contact-isotopy maps with their lifts.
"""
from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .errors import DomainExitError, ValidationError
from .forms import ContactForm, form_minus_ydx, form_xdy, line_integral_beta
from .geometry import PlaneCurve, SpaceCurve
from .moves import DiskChart

LT_RETURN_OFFSET = 0.25     # horizontal clearance of the closing path


# -- smooth model curves -----------------------------------------------


def cusp_curve(t0: float, t1: float, samples: int) -> SpaceCurve:
    """Samples of (t^3, t^2, -(2/5) t^5): tangent to ker(dz + x dy)."""
    if not t0 < t1:
        raise ValidationError("need t0 < t1")
    t = np.linspace(t0, t1, samples)
    pts = np.column_stack([t ** 3, t ** 2, -(2.0 / 5.0) * t ** 5])
    return SpaceCurve(pts, closed=False, check_embedded=False)


def spiral_leaf(r0: float, r1: float, samples: int) -> SpaceCurve:
    """Leaf of the contact foliation on z = x^2 + y^2 for dz + x dy - y dx.

    Samples of (r cos(phi), r sin(phi), r^2) with phi(r) = -2 ln r.
    """
    if not 0.0 < r0 < r1:
        raise ValidationError("need 0 < r0 < r1")
    # sample uniformly in ln r, i.e. uniformly in the winding angle
    r = np.exp(np.linspace(math.log(r0), math.log(r1), samples))
    phi = -2.0 * np.log(r)
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), r * r])
    return SpaceCurve(pts, closed=False, check_embedded=False)


def dilatation(points: np.ndarray, k: float) -> np.ndarray:
    """(x, y, z) -> (k x, k y, k^2 z); maps spiral leaves to spiral leaves."""
    pts = np.atleast_2d(np.asarray(points, float)).copy()
    pts[:, :2] *= k
    pts[:, 2] *= k * k
    return pts


# -- Lance-Thomas iterated curve ---------------------------------------


def default_s_rule(n: int) -> float:
    return 1.0 / (n + 1) ** 2


@dataclass(frozen=True)
class LanceThomasLevel:
    n: int
    s: tuple              # s_1..s_n, cross proportions per level
    a: tuple              # a_1..a_{n+1}, square sides per level
    squares: tuple        # squares[k] = array of bottom-left corners at level k+1
    curve: PlaneCurve     # gamma_n, open from (0,0) to (1,1)
    K: float | None = None
    k: tuple = ()         # k_1..k_{n+1}, diagonal z-jump coefficients

    @property
    def leaf_side(self) -> float:
        return self.a[-1]


def lance_thomas_projection(n: int, s_rule=default_s_rule) -> LanceThomasLevel:
    """Level-n square-filling curve: crosses at levels 1..n, diagonals below.

    Each square of side a hosts a cross of band width s*a; the four
    complementary corner squares have side (1 - s) * a / 2 and are
    visited bottom-left, bottom-right, top-left, top-right, entering at
    each square's bottom-left corner and leaving at its top-right one.
    The level-(n+1) squares are traversed by their diagonals.
    """
    if n < 1:
        raise ValidationError("level must be >= 1")
    s = tuple(float(s_rule(k)) for k in range(1, n + 1))
    if any(not (0.0 < v < 0.5) for v in s):
        raise ValidationError("cross proportions must lie in (0, 1/2)")
    a = [1.0]
    for v in s:
        a.append((1.0 - v) * a[-1] / 2.0)

    squares = [[] for _ in range(n + 1)]
    verts: list = []

    def visit(ox: float, oy: float, level: int) -> None:
        side = a[level - 1]
        squares[level - 1].append((ox, oy))
        if level == n + 1:
            verts.append((ox, oy))
            verts.append((ox + side, oy + side))
            return
        b = a[level]
        visit(ox, oy, level + 1)
        visit(ox + side - b, oy, level + 1)
        visit(ox, oy + side - b, level + 1)
        visit(ox + side - b, oy + side - b, level + 1)

    visit(0.0, 0.0, 1)
    curve = PlaneCurve(np.array(verts), closed=False, check_embedded=True)
    sq = tuple(np.array(lst) for lst in squares)
    return LanceThomasLevel(n, s, tuple(a), sq, curve)


@dataclass(frozen=True)
class LanceThomasUnknot:
    curve: SpaceCurve           # closed Legendrian-lifted loop
    level: LanceThomasLevel
    closure_defect: float       # floating-point z mismatch around the loop
    return_height: float
    open_z: np.ndarray          # z + Delta z on the open curve's vertices
    z_integral: np.ndarray      # pure integral part z (without Delta z)

    @property
    def endpoint_z(self) -> float:
        return float(self.open_z[-1])


def lance_thomas_unknot(n: int, K: float = 1.0,
                        s_rule=default_s_rule) -> LanceThomasUnknot:
    """Closed loop over the level-n curve in (R^3, ker(dz - y dx)).

    z is the exact piecewise-linear lift (dz = y dx along the curve)
    plus Delta z, which is constant on connecting segments and jumps by
    k_j * a_j^2 across the diagonal of each level-j leaf square, with
    k_1 = K and k_{j+1} = k_j / (1 - s_j)^2.  The open curve runs from
    (0,0,0) to (1,1,K + 1/2) and is closed by a rectangular return path
    routed left of the unit square at horizontal offset 0.25; its height
    h = (K + 1/2)/(1 + 0.25) makes the closing lift exact.  Requires
    K > 1/2 + 0.25 so the path clears the square.
    """
    d = LT_RETURN_OFFSET
    if K <= 0.5 + d:
        raise ValidationError(f"K must exceed {0.5 + d} for the return path to clear")
    level = lance_thomas_projection(n, s_rule)
    ks = [float(K)]
    for v in level.s:
        ks.append(ks[-1] / (1.0 - v) ** 2)
    level = LanceThomasLevel(level.n, level.s, level.a, level.squares,
                             level.curve, float(K), tuple(ks))

    v = level.curve.vertices
    m = len(v)
    # exact per-edge lift: dz = y dx, trapezoid is exact on segments
    dx = np.diff(v[:, 0])
    ymid = 0.5 * (v[:-1, 1] + v[1:, 1])
    z_int = np.concatenate(([0.0], np.cumsum(ymid * dx)))

    # Delta z: jumps across leaf diagonals.  Leaves occupy vertex pairs
    # (2i, 2i+1) by construction of the projection's vertex list.
    jump = ks[-1] * level.a[-1] ** 2
    n_leaves = m // 2
    dz = np.repeat(np.arange(n_leaves, dtype=float) * jump, 2)
    dz[1::2] += jump
    open_z = z_int + dz

    h = (K + 0.5) / (1.0 + d)
    ret = np.array([[1.0, h], [-d, h], [-d, 0.0]])
    # lift of the return path: only the top horizontal edge picks up y dx
    ret_z = open_z[-1] + np.array([0.0, h * (-d - 1.0), h * (-d - 1.0)])

    pts = np.vstack([np.column_stack([v, open_z]), np.column_stack([ret, ret_z])])
    loop = SpaceCurve(pts, closed=True, check_embedded=False)

    # defect: total z-change accumulated around the loop, in floating point
    defect = float((z_int[-1] - z_int[0]) + dz[-1] + h * (-d - 1.0)
                   + 0.0)   # remaining return edges have dx = 0 or y = 0
    return LanceThomasUnknot(loop, level, defect, h, open_z, z_int)


def lance_thomas_z_bound_data(unknot: LanceThomasUnknot, level_index: int):
    """Per-square samples of f(x, y) = z(x,y) - z(x0,y0) - (x - x0) y0.

    Yields (square_origin, f-values over curve vertices inside the
    square) for every level-`level_index` square; z is the integral part
    only.  The documented bound is |f| <= a_n^2 / 2.
    """
    lvl = unknot.level
    if not (1 <= level_index <= lvl.n + 1):
        raise ValidationError("level index out of range")
    side = lvl.a[level_index - 1]
    v = lvl.curve.vertices
    z = unknot.z_integral
    eps = 1e-12
    for (x0, y0) in lvl.squares[level_index - 1]:
        inside = ((v[:, 0] >= x0 - eps) & (v[:, 0] <= x0 + side + eps)
                  & (v[:, 1] >= y0 - eps) & (v[:, 1] <= y0 + side + eps))
        f = z[inside] - _corner_z(unknot, x0, y0) - (v[inside, 0] - x0) * y0
        yield (x0, y0), f


def _corner_z(unknot: LanceThomasUnknot, x0: float, y0: float) -> float:
    v = unknot.level.curve.vertices
    hit = np.nonzero((v[:, 0] == x0) & (v[:, 1] == y0))[0]
    if len(hit) == 0:
        raise ValidationError("square corner is not a curve vertex")
    return float(unknot.z_integral[hit[0]])


def lance_thomas_corner_pairs(unknot: LanceThomasUnknot, level_index: int):
    """Bottom-left-corner z-differences within each level-`level_index` square.

    Yields (square_origin, |z(q) - z(p)| array) where p is the square's
    own bottom-left corner and q ranges over bottom-left corners of all
    deeper squares it contains.  The documented bound is 6 * a_1 * a_n.
    """
    lvl = unknot.level
    side = lvl.a[level_index - 1]
    eps = 1e-12
    deeper = np.vstack([lvl.squares[j] for j in range(level_index - 1, lvl.n + 1)])
    zs = np.array([_corner_z(unknot, x, y) for x, y in deeper])
    for (x0, y0) in lvl.squares[level_index - 1]:
        inside = ((deeper[:, 0] >= x0 - eps) & (deeper[:, 0] <= x0 + side + eps)
                  & (deeper[:, 1] >= y0 - eps) & (deeper[:, 1] <= y0 + side + eps))
        zp = _corner_z(unknot, x0, y0)
        yield (x0, y0), np.abs(zs[inside] - zp)


# -- one-crossing unknot with a bypass setup ---------------------------


@dataclass(frozen=True)
class OneCrossingScenario:
    """A closed figure-eight with balanced signed areas under beta = x dy.

    The right lobe carries a semicircular attach arc matching `chart`;
    the left lobe carries a straight segment crossing `square`'s v-sides
    (for integral correction).  The loop integral of x dy vanishes, so
    the curve lifts to a closed Legendrian loop with a single crossing.
    """
    curve: PlaneCurve
    chart: DiskChart
    attach: tuple[int, int]
    square: object               # CorrectionSquare
    segment: tuple[int, int]     # index range of the correction segment
    base_vertex: int             # vertex fixed by every move


def one_crossing_unknot(arc_samples: int = 33, seg_samples: int = 33):
    """Figure-eight with one negative crossing and zero beta = x dy loop."""
    from .moves import CorrectionSquare

    r = 0.2
    chart = DiskChart(center=complex(1.0, 0.5), scale=-0.5j * (2 * r))
    arc = chart.boundary_plus(arc_samples)        # (1, 0.3) -> (1.5-ish) -> (1, 0.7)
    # right-lobe loop integral of x dy up to the left vertical edge
    right = [(0.2, 0.0), (1.0, 0.0), (1.0, 0.5 - r)]
    arc_pts = arc[1:-1]
    after = [(1.0, 0.5 + r), (1.0, 1.0), (0.2, 1.0)]
    # solve the left-edge abscissa L so the loop integral of x dy vanishes
    probe = np.array(right + list(map(tuple, arc_pts)) + after
                     + [(-0.2, 0.0), (-1.0, 0.0), (-1.0, 1.0), (-0.2, 1.0)])
    total = _poly_xdy(np.vstack([probe, probe[:1]]))
    left_len = 1.0                                # y-extent of the left edge
    L = 1.0 + total / left_len                    # shift left edge to cancel

    seg = np.column_stack([np.full(seg_samples, -L),
                           np.linspace(0.15, 0.85, seg_samples)])
    verts = np.array(
        right + list(map(tuple, arc_pts)) + after
        + [(-0.2, 0.0), (-L, 0.0), (-L, 0.15)]
        + list(map(tuple, seg[1:-1]))
        + [(-L, 0.85), (-L, 1.0), (-0.2, 1.0)])
    curve = PlaneCurve(verts, closed=True, check_embedded=False)

    attach = (2, 2 + arc_samples - 1)            # (1, 0.3) ... (1, 0.7)
    seg_start = len(right) + len(arc_pts) + len(after) + 2
    segment = (seg_start, seg_start + seg_samples - 1)
    square = CorrectionSquare(origin=[-L, 0.5], axis_u=[0.45, 0.0],
                              axis_v=[0.0, 0.35], u_minus=-0.6, u_plus=0.6)
    return OneCrossingScenario(curve, chart, attach, square, segment, base_vertex=0)


def _poly_xdy(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return float(np.sum(0.5 * (x[1:] + x[:-1]) * np.diff(y)))


# -- cylindrical contactomorphisms -------------------------------------


def _to_cyl(points: np.ndarray):
    pts = np.atleast_2d(np.asarray(points, float))
    rho = np.hypot(pts[:, 0], pts[:, 1])
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    return rho, phi, pts[:, 2]


def _from_cyl(rho, phi, z) -> np.ndarray:
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def log_spiral_contactomorphism(points: np.ndarray) -> np.ndarray:
    """(rho, phi, z) -> (rho, phi + ln rho, z - rho^2 / 2), for dz + rho^2 dphi."""
    rho, phi, z = _to_cyl(points)
    if np.any(rho <= 0.0):
        raise DomainExitError("the map is undefined on the z-axis")
    return _from_cyl(rho, phi + np.log(rho), z - 0.5 * rho * rho)


def log_spiral_contactomorphism_inverse(points: np.ndarray) -> np.ndarray:
    rho, phi, z = _to_cyl(points)
    if np.any(rho <= 0.0):
        raise DomainExitError("the map is undefined on the z-axis")
    return _from_cyl(rho, phi - np.log(rho), z + 0.5 * rho * rho)


def cylinder_contact_isotopy(points: np.ndarray, t: float) -> np.ndarray:
    """Compactly supported version inside the unit cylinder.

    (rho, phi, z) -> (rho, phi + ln rho, z + (t^2 - rho^2)/2)   for rho >= t,
                     (rho, phi + ln t,  z)                      for rho <  t.
    Both branches agree exactly on rho = t; t = 0 restores the
    unsupported map above.
    """
    if not (0.0 <= t <= 1.0):
        raise ValidationError("isotopy time must lie in [0, 1]")
    rho, phi, z = _to_cyl(points)
    if np.any(rho > 1.0 + 1e-12):
        raise DomainExitError("points must lie inside the unit cylinder")
    if t == 0.0:
        return log_spiral_contactomorphism(points)
    outer = rho >= t
    phi_out = phi + np.where(outer, np.log(np.maximum(rho, t)), math.log(t))
    z_out = z + np.where(outer, 0.5 * (t * t - rho * rho), 0.0)
    return _from_cyl(rho, phi_out, z_out)


# -- lifting planar homeomorphisms -------------------------------------


def lift_homeomorphism(form: ContactForm, h, h_inv, base_point, base_z: float = 0.0,
                       subdivision: int = 128, check_loops=None,
                       check_tol: float = 1e-8):
    """Lift a beta-loop-preserving planar map to a space map.

    The returned evaluator sends (q, z) to (h(q), z + base_z + I(q))
    with I(q) = int_gamma beta - int_{h(gamma)} beta over the straight
    subdivided path gamma from the base point to q.  The precondition
    that h preserves loop integrals of beta is sampled on `check_loops`
    (defaults to three circles around the base point).
    """
    p = np.asarray(base_point, float)

    def h_points(pts):
        return np.atleast_2d(np.asarray(h(pts), float))

    if check_loops is None:
        rad = max(0.5 * float(np.linalg.norm(p)), 0.25)
        th = np.linspace(0.0, 2.0 * math.pi, 256, endpoint=False)
        ring = np.column_stack([np.cos(th), np.sin(th)])
        check_loops = [p + f * rad * ring for f in (0.4, 0.7, 1.0)]
    for loop in check_loops:
        c = PlaneCurve(loop, closed=True, check_embedded=False)
        before = line_integral_beta(form, c)[0]
        img = PlaneCurve(h_points(loop), closed=True, check_embedded=False)
        after = line_integral_beta(form, img)[0]
        if abs(after - before) > check_tol * max(1.0, abs(before)):
            raise ValidationError(
                f"map does not preserve loop integrals of beta: {before} vs {after}")
    if h_inv is not None:
        probe = np.array([p + (0.1, 0.2), p + (-0.15, 0.05)])
        back = np.atleast_2d(np.asarray(h_inv(h_points(probe)), float))
        if np.abs(back - probe).max() > 1e-8 * max(1.0, float(np.abs(probe).max())):
            raise ValidationError("inverse evaluator does not invert the map")

    def evaluate(points3: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points3, float))
        out = np.empty_like(pts)
        for i, (x, y, z) in enumerate(pts):
            q = np.array([x, y])
            ts = np.linspace(0.0, 1.0, subdivision + 1)
            gamma = p + np.outer(ts, q - p)
            if np.linalg.norm(q - p) < 1e-15:
                shift = 0.0
            else:
                src = PlaneCurve(gamma, check_embedded=False)
                img = PlaneCurve(h_points(gamma), check_embedded=False)
                shift = line_integral_beta(form, src)[0] - line_integral_beta(form, img)[0]
            hq = h_points(q[None])[0]
            out[i] = (hq[0], hq[1], z + base_z + shift)
        return out

    return evaluate
