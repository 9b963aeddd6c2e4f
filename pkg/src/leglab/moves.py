"""Explicit curve moves: bypass isotopies, corner rounding, correction flows.

The bypass model moves the upper unit semicircle to the lower one through
arcs of generalized circles pinned at +-1:

    F(s, t) = (s + (1 - 2t) i) / ((1 - 2t) i s + 1),   s in [-1, 1], t in [0, 1].

A DiskChart carries the model disk into the plane by a similarity
composed with a disk-preserving Moebius map.  Correction squares host a
compactly supported bump field whose flow drags an arc across the square
and changes the beta-integral monotonically; `solve_correction` inverts
that map by bracketing and bisection.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import cmath
import json
import math

import numpy as np

from .errors import DegenerateInputError, RangeError, ValidationError
from .forms import ContactForm, line_integral_beta
from .geometry import (Curve, PlaneCurve, SpaceCurve, chord_arc_constant,
                       corner_angle, subdivide_edges)
from .lifting import lift as _lift

ATTACH_MATCH_RTOL = 1e-8      # Hausdorff match of chart boundary vs attach arc
DISK_CLEARANCE_RTOL = 1e-8    # allowed incursion of the rest of the curve
CUTOFF_MARGIN = 0.1           # bump cutoff width in square coordinates
CORRECTION_RESIDUAL_TOL = 1e-9
FLOW_STEP = 1.0 / 128.0
BRACKET_T0 = 1.0 / 64.0


# -- the model bypass arc ----------------------------------------------


def mobius_arc(s: float, t: float) -> complex:
    """Point of the model bypass: s parametrizes the arc, t the time."""
    if not (-1.0 <= s <= 1.0 and 0.0 <= t <= 1.0):
        raise ValidationError("mobius_arc expects s in [-1,1], t in [0,1]")
    if s == 1.0:
        return complex(1.0, 0.0)
    if s == -1.0:
        return complex(-1.0, 0.0)
    w = (1.0 - 2.0 * t) * 1j
    return (s + w) / (w * s + 1.0)


def mobius_arc_inverse(zeta: complex, t: float) -> float:
    """Recover s from a point on the time-t model arc."""
    w = (1.0 - 2.0 * t) * 1j
    denom = 1.0 - w * zeta
    if denom == 0:
        raise ValidationError("point is the pole of the model arc")
    s = (zeta - w) / denom
    return float(s.real)


# -- disk charts -------------------------------------------------------


@dataclass(frozen=True)
class DiskChart:
    """Similarity (center + scale * .) composed with a disk Moebius map.

    chart(zeta) = center + scale * e^{i psi} (zeta - a) / (1 - conj(a) zeta)
    """
    center: complex = 0j
    scale: complex = 1.0 + 0j
    mobius_a: complex = 0j
    mobius_psi: float = 0.0

    def __post_init__(self):
        if abs(self.scale) == 0.0:
            raise ValidationError("chart scale must be nonzero")
        if abs(self.mobius_a) >= 1.0:
            raise ValidationError("Moebius parameter must satisfy |a| < 1")

    def map(self, zeta: complex) -> complex:
        a = self.mobius_a
        m = cmath.exp(1j * self.mobius_psi) * (zeta - a) / (1.0 - a.conjugate() * zeta)
        return self.center + self.scale * m

    def inverse(self, point: complex) -> complex:
        a = self.mobius_a
        m = (point - self.center) / self.scale
        w = cmath.exp(-1j * self.mobius_psi) * m
        return (w + a) / (1.0 + a.conjugate() * w)

    def map_points(self, zetas) -> np.ndarray:
        out = np.array([self.map(complex(z)) for z in np.atleast_1d(zetas)])
        return np.column_stack([out.real, out.imag])

    def boundary_plus(self, samples: int = 257) -> np.ndarray:
        """Image of the upper model semicircle, from chart(1) to chart(-1)."""
        s = np.linspace(1.0, -1.0, samples)
        return self.map_points([mobius_arc(float(v), 0.0) for v in s])

    def boundary_minus(self, samples: int = 257) -> np.ndarray:
        s = np.linspace(1.0, -1.0, samples)
        return self.map_points([mobius_arc(float(v), 1.0) for v in s])

    def bilipschitz_estimate(self, n_r: int = 64, n_phi: int = 64) -> float:
        """Distortion of the chart sampled on a polar grid of the disk."""
        rr = np.linspace(0.02, 0.999, n_r)
        pp = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
        zs = (rr[:, None] * np.exp(1j * pp)[None, :]).ravel()
        ws = np.array([self.map(z) for z in zs])
        # distortion along grid neighbours
        best = 1.0
        zs_g = zs.reshape(n_r, n_phi)
        ws_g = ws.reshape(n_r, n_phi)
        for dz, dw in (
            (np.diff(zs_g, axis=0), np.diff(ws_g, axis=0)),
            (np.roll(zs_g, -1, axis=1) - zs_g, np.roll(ws_g, -1, axis=1) - ws_g),
        ):
            ratio = np.abs(dw) / np.abs(dz)
            best = max(best, float(ratio.max()), float((1.0 / ratio).max()))
        return best

    def to_json_dict(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "scale": [complex(self.scale).real, complex(self.scale).imag],
            "mobius_a": [self.mobius_a.real, self.mobius_a.imag],
            "mobius_psi": self.mobius_psi,
        }


def chart_from_json_dict(data: dict) -> DiskChart:
    def c(v):
        return complex(v[0], v[1])
    return DiskChart(c(data["center"]), c(data["scale"]),
                     c(data.get("mobius_a", [0, 0])), float(data.get("mobius_psi", 0.0)))


# -- isotopy traces ----------------------------------------------------


@dataclass(frozen=True)
class IsotopyTrace:
    times: tuple
    frames: tuple                # Curve per time
    reports: tuple = ()          # optional dict per frame

    def __post_init__(self):
        if len(self.times) != len(self.frames):
            raise ValidationError("trace needs one frame per time")
        ts = list(self.times)
        if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
            raise ValidationError("trace times must be strictly increasing")
        if self.reports and len(self.reports) != len(self.frames):
            raise ValidationError("trace reports must match frame count")

    def to_json_dict(self) -> dict:
        out = {
            "times": [float(t) for t in self.times],
            "frames": [f.to_json_dict() for f in self.frames],
        }
        if self.reports:
            out["reports"] = list(self.reports)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"), sort_keys=True)


def trace_from_json_dict(data: dict) -> IsotopyTrace:
    from .geometry import curve_from_json_dict
    frames = tuple(curve_from_json_dict(f, check_embedded=False) for f in data["frames"])
    return IsotopyTrace(tuple(float(t) for t in data["times"]), frames,
                        tuple(data.get("reports", ())))


# -- bypass isotopy ----------------------------------------------------


def bypass_isotopy(chart: DiskChart, curve: PlaneCurve, attach: tuple[int, int],
                   times, form: ContactForm | None = None) -> IsotopyTrace:
    """Move the attach subarc of `curve` through the model bypass.

    `attach` = (i, j) with i < j: vertices i..j must sample the chart's
    upper boundary arc, vertex i at chart(1) side.  All other vertices
    stay fixed; the open chart disk must avoid the rest of the curve.
    """
    i0, i1 = attach
    n = len(curve)
    if not (0 <= i0 < i1 < n):
        raise ValidationError("attach range must satisfy 0 <= i < j < n")
    v = curve.vertices
    scale = max(curve.bbox_diagonal(), abs(chart.scale))

    # recover the arc parameter of every attach vertex and check the match
    params = []
    for k in range(i0, i1 + 1):
        zeta = chart.inverse(complex(v[k, 0], v[k, 1]))
        s = mobius_arc_inverse(zeta, 0.0)
        s = min(1.0, max(-1.0, s))
        back = chart.map(mobius_arc(s, 0.0))
        if abs(back - complex(v[k, 0], v[k, 1])) > ATTACH_MATCH_RTOL * scale:
            raise ValidationError(
                f"attach vertex {k} is not on the chart's upper boundary arc")
        params.append(s)
    if any(b >= a for a, b in zip(params, params[1:])) and \
       any(b <= a for a, b in zip(params, params[1:])):
        raise ValidationError("attach arc parameters are not monotone")

    _check_disk_clearance(chart, curve, attach, scale)

    times = [float(t) for t in times]
    frames = []
    reports = []
    for t in times:
        if not (0.0 <= t <= 1.0):
            raise ValidationError("bypass times must lie in [0, 1]")
        w = v.copy()
        for k, s in zip(range(i0, i1 + 1), params):
            p = chart.map(mobius_arc(s, t))
            w[k] = (p.real, p.imag)
        frame = PlaneCurve(w, closed=curve.closed, check_embedded=False)
        frames.append(frame)
        rep = {"time": t}
        moved = PlaneCurve(w[i0:i1 + 1], check_embedded=False)
        rep["moved_chord_arc"] = chord_arc_constant(moved).constant
        if form is not None:
            rep["beta_total"] = line_integral_beta(form, frame)[0]
        reports.append(rep)
    return IsotopyTrace(tuple(times), tuple(frames), tuple(reports))


def _check_disk_clearance(chart: DiskChart, curve: PlaneCurve,
                          attach: tuple[int, int], scale: float) -> None:
    """The open model disk must not meet the curve outside the attach arc."""
    i0, i1 = attach
    v = curve.vertices
    ts = np.linspace(0.0, 1.0, 17)
    m = curve.n_edges
    for e in range(m):
        a_idx, b_idx = e, (e + 1) % len(v)
        if i0 <= a_idx < i1:
            continue  # edge inside the attach arc
        pts = v[a_idx] + np.outer(ts, v[b_idx] - v[a_idx])
        for p in pts:
            zeta = chart.inverse(complex(p[0], p[1]))
            if abs(zeta) < 1.0 - DISK_CLEARANCE_RTOL:
                raise ValidationError(
                    "chart disk interior meets the curve outside the attach arc")


# -- corner rounding ---------------------------------------------------


def corner_round(curve: PlaneCurve, vertex: int, delta: float,
                 samples: int, check_embedded: bool = True) -> PlaneCurve:
    """Replace an interior corner by a tangent circular arc.

    The arc is tangent to both edges at distance `delta` from the vertex
    and sampled at `samples` points (tangency points included).
    """
    v = curve.vertices
    n = len(v)
    if curve.closed:
        if not (0 <= vertex < n):
            raise ValidationError("vertex index out of range")
    elif not (1 <= vertex <= n - 2):
        raise ValidationError("corner rounding needs an interior vertex")
    if samples < 2:
        raise ValidationError("need at least 2 arc samples")
    p_prev = v[(vertex - 1) % n]
    p_next = v[(vertex + 1) % n]
    p = v[vertex]
    theta = corner_angle(p_prev, p, p_next)
    if theta >= math.pi - 1e-12:
        raise DegenerateInputError("straight vertex cannot be rounded")
    if theta <= 1e-12:
        raise DegenerateInputError("cusp vertex cannot be rounded")
    lim = min(np.linalg.norm(p_prev - p), np.linalg.norm(p_next - p)) / 3.0
    if not (0.0 < delta <= lim + 1e-15):
        raise ValidationError(f"delta must lie in (0, {lim}]")

    u = (p_prev - p) / np.linalg.norm(p_prev - p)
    w = (p_next - p) / np.linalg.norm(p_next - p)
    t1 = p + delta * u            # tangency on the incoming edge
    t2 = p + delta * w
    bis = u + w
    bis = bis / np.linalg.norm(bis)
    center = p + (delta / math.cos(theta / 2.0)) * bis
    radius = delta * math.tan(theta / 2.0)

    a1 = math.atan2(t1[1] - center[1], t1[0] - center[0])
    a2 = math.atan2(t2[1] - center[1], t2[0] - center[0])
    sweep = (a2 - a1) % (2.0 * math.pi)
    if sweep > math.pi:
        sweep -= 2.0 * math.pi     # take the short way: |sweep| = pi - theta
    angles = a1 + sweep * np.linspace(0.0, 1.0, samples)
    arc = center + radius * np.column_stack([np.cos(angles), np.sin(angles)])

    if curve.closed and vertex == 0:
        out = np.vstack([arc, v[1:]])
    else:
        out = np.vstack([v[:vertex], arc, v[vertex + 1:]])
    return PlaneCurve(out, closed=curve.closed, check_embedded=check_embedded)


# -- correction squares and flows --------------------------------------


@dataclass(frozen=True)
class CorrectionSquare:
    """Affine embedding of [-1,1]^2 with a u-band for the moved arc.

    plane(u, v) = origin + u * axis_u + v * axis_v.
    """
    origin: np.ndarray
    axis_u: np.ndarray
    axis_v: np.ndarray
    u_minus: float
    u_plus: float
    margin: float = CUTOFF_MARGIN

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, float))
        object.__setattr__(self, "axis_u", np.asarray(self.axis_u, float))
        object.__setattr__(self, "axis_v", np.asarray(self.axis_v, float))
        if abs(self._det()) < 1e-14:
            raise DegenerateInputError("correction square is degenerate")
        if not (-1.0 < self.u_minus < self.u_plus < 1.0):
            raise ValidationError("need -1 < u_minus < u_plus < 1")
        if not (0.0 < self.margin < min(self.u_minus + 1.0, 1.0 - self.u_plus)):
            raise ValidationError("cutoff margin must fit between the band and the boundary")

    def _det(self) -> float:
        return float(self.axis_u[0] * self.axis_v[1] - self.axis_u[1] * self.axis_v[0])

    def to_plane(self, uv: np.ndarray) -> np.ndarray:
        uv = np.atleast_2d(np.asarray(uv, float))
        return self.origin + np.outer(uv[:, 0], self.axis_u) + np.outer(uv[:, 1], self.axis_v)

    def to_square(self, xy: np.ndarray) -> np.ndarray:
        xy = np.atleast_2d(np.asarray(xy, float))
        mat = np.column_stack([self.axis_u, self.axis_v])
        return np.linalg.solve(mat, (xy - self.origin).T).T

    def contains(self, xy: np.ndarray, pad: float = 0.0) -> np.ndarray:
        uv = self.to_square(xy)
        return np.all(np.abs(uv) <= 1.0 + pad, axis=1)

    def boundary(self, samples_per_side: int = 64) -> PlaneCurve:
        t = np.linspace(-1.0, 1.0, samples_per_side, endpoint=False)
        sides = [np.column_stack([t, -np.ones_like(t)]),
                 np.column_stack([np.ones_like(t), t]),
                 np.column_stack([-t, np.ones_like(t)]),
                 np.column_stack([-np.ones_like(t), -t])]
        return PlaneCurve(self.to_plane(np.vstack(sides)), closed=True, check_embedded=False)

    def to_json_dict(self) -> dict:
        return {"origin": list(map(float, self.origin)),
                "axis_u": list(map(float, self.axis_u)),
                "axis_v": list(map(float, self.axis_v)),
                "u_minus": self.u_minus, "u_plus": self.u_plus, "margin": self.margin}


def square_from_json_dict(data: dict) -> CorrectionSquare:
    return CorrectionSquare(data["origin"], data["axis_u"], data["axis_v"],
                            float(data["u_minus"]), float(data["u_plus"]),
                            float(data.get("margin", CUTOFF_MARGIN)))


def _smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, float)
    def e(t):
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-1.0 / t[pos])
        return out
    a = e(x)
    b = e(1.0 - x)
    return a / (a + b + 1e-300)


def correction_field(square: CorrectionSquare, form: ContactForm, sign: int):
    """Bump vector field supported in the square, directed along +-u.

    For sign +1 the field is g(u, v) * d/du with
        g = (1/f) exp(1/(u-1)) exp(1/(v^2-1))    on u >= u_minus,
    faded to zero below u_minus by a smooth step of width `margin`;
    f is the coefficient of the pulled-back d(beta) in square
    coordinates.  Sign -1 mirrors the construction in u (active on
    u <= u_plus, pushing toward u = -1).
    """
    if sign not in (+1, -1):
        raise ValidationError("sign must be +1 or -1")
    det = square._det()
    push_u = square.axis_u if sign > 0 else -square.axis_u

    def field(pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, float))
        uv = square.to_square(pts)
        u, vv = uv[:, 0], uv[:, 1]
        if sign < 0:
            u = -u
            lo = -square.u_plus
        else:
            lo = square.u_minus
        inside = (u < 1.0) & (np.abs(vv) < 1.0) & (u > lo - square.margin)
        out = np.zeros_like(pts)
        if not inside.any():
            return out
        ui, vi = u[inside], vv[inside]
        f = form.dbeta(pts[inside]) * det
        if np.any(f == 0.0):
            raise ValidationError("d(beta) vanishes on the correction square")
        g = (1.0 / f) * np.exp(1.0 / (ui - 1.0)) * np.exp(1.0 / (vi * vi - 1.0))
        g = g * _smooth_step((ui - (lo - square.margin)) / square.margin)
        out[inside] = np.outer(g, push_u)
        return out

    return field


def _flow_points(field, pts: np.ndarray, duration: float,
                 step: float = FLOW_STEP) -> np.ndarray:
    from .forms import flow as _rk4
    return _rk4(field, pts, duration, step)


def region_beta_boundary_integral(form: ContactForm, moved: PlaneCurve,
                                  closing: PlaneCurve) -> float:
    """Integral of beta around the loop moved-then-closing.

    By Stokes this is the d(beta)-area of the enclosed region; the two
    arcs must share endpoints (moved runs a -> b, closing runs b -> a).
    """
    return line_integral_beta(form, moved)[0] + line_integral_beta(form, closing)[0]


class _FlowCache:
    """Transported copies of a point set under an autonomous field."""

    def __init__(self, field, pts: np.ndarray, step: float = FLOW_STEP):
        self.field = field
        self.step = step
        self.cache = {0.0: np.asarray(pts, float)}

    def at(self, t: float) -> np.ndarray:
        if t in self.cache:
            return self.cache[t]
        t0 = max(s for s in self.cache if s <= t + 1e-18)
        pts = _flow_points(self.field, self.cache[t0], t - t0, self.step)
        self.cache[t] = pts
        return pts


def solve_correction(square: CorrectionSquare, form: ContactForm,
                     moved_arc: PlaneCurve, closing_arc: PlaneCurve,
                     target: float,
                     residual_tol: float = CORRECTION_RESIDUAL_TOL,
                     max_time: float = 64.0):
    """Flow `moved_arc` until its beta-integral hits `target`.

    The flow direction is chosen automatically; time is bracketed by
    doubling from a small seed and then bisected until the integral of
    beta along the transported arc is within `residual_tol` of the
    target.  Returns (t, corrected arc, sign).
    """
    uv = square.to_square(moved_arc.vertices)
    if np.any(np.abs(uv[:, 1]) > 1.0 + 1e-12) or np.any(uv[:, 0] <= square.u_minus) \
            or np.any(uv[:, 0] >= square.u_plus):
        raise ValidationError("moved arc must cross the square inside the u-band")

    def integral_at(cache, t):
        pts = cache.at(t)
        arc = PlaneCurve(pts, check_embedded=False)
        return line_integral_beta(form, arc)[0], arc

    base = line_integral_beta(form, moved_arc)[0]
    if abs(target - base) <= residual_tol:
        return 0.0, moved_arc, +1

    want = target - base
    chosen = None
    for sign in (+1, -1):
        field = correction_field(square, form, sign)
        cache = _FlowCache(field, moved_arc.vertices)
        val, _ = integral_at(cache, BRACKET_T0)
        if (val - base) * want > 0:
            chosen = (sign, field, cache)
            break
    if chosen is None:
        raise RangeError("neither flow direction moves the integral toward the target")
    sign, field, cache = chosen

    lo, hi = 0.0, BRACKET_T0
    val_hi, _ = integral_at(cache, hi)
    while (val_hi - target) * want < 0:
        lo = hi
        hi *= 2.0
        if hi > max_time:
            raise RangeError("target beta-integral is outside the attainable range")
        prev = val_hi
        val_hi, _ = integral_at(cache, hi)
        if abs(val_hi - prev) <= 1e-16 * max(1.0, abs(val_hi)):
            raise RangeError("flow stalled before reaching the target integral")

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val, arc = integral_at(cache, mid)
        if abs(val - target) <= residual_tol:
            return mid, arc, sign
        if (val - target) * want < 0:
            lo = mid
        else:
            hi = mid
    raise RangeError("bisection failed to reach the requested residual")


# -- lifting a planar isotopy ------------------------------------------


def legendrian_isotopy_lift(form: ContactForm, trace: IsotopyTrace,
                            base: int, z0: float,
                            subdivision: int = 1,
                            conserve_tol: float = 1e-8) -> IsotopyTrace:
    """Lift every frame of a planar isotopy, pinning z at a fixed vertex.

    The base vertex must stay put across frames.  When the total
    beta-integral is conserved across frames (checked to `conserve_tol`
    relative), endpoints shared by all frames lift to fixed space points.
    """
    if not trace.frames:
        raise ValidationError("empty trace")
    f0 = trace.frames[0]
    n = len(f0)
    if not (0 <= base < n):
        raise ValidationError("base vertex out of range")
    base_pt = f0.vertices[base]
    scale = max(f0.bbox_diagonal(), 1e-300)
    frames3 = []
    reports = []
    for frame in trace.frames:
        if len(frame) != n:
            raise ValidationError("frames must share a vertex count")
        if np.linalg.norm(frame.vertices[base] - base_pt) > 1e-12 * scale:
            raise ValidationError("base vertex moves across frames")
        res = _lift(form, frame, 0.0, subdivision)
        cur = res.curve
        zs = cur.vertices[:, 2]
        base_fine = base * subdivision if not frame.closed or base * subdivision < len(cur) \
            else 0
        shift = z0 - zs[base_fine]
        pts = cur.vertices.copy()
        pts[:, 2] += shift
        lifted = SpaceCurve(pts, closed=cur.closed, check_embedded=False)
        frames3.append(lifted)
        from .forms import legendrian_residual
        verdict = legendrian_residual(form, lifted)
        reports.append({
            "beta_total": line_integral_beta(form, frame)[0],
            "legendrian_relative_residual": verdict.relative_residual,
            "closure_defect": res.closure_defect,
        })
    totals = [r["beta_total"] for r in reports]
    spread = max(totals) - min(totals)
    conserved = spread <= conserve_tol * max(1.0, max(abs(t) for t in totals))
    for r in reports:
        r["beta_conserved"] = bool(conserved)
    return IsotopyTrace(trace.times, tuple(frames3), tuple(reports))
