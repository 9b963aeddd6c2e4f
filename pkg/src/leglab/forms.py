"""Contact forms alpha = dz + beta on a planar chart times R.

beta = a(x,y) dx + b(x,y) dy with d(beta) = db/dx - da/dy nowhere zero.
Provides line integrals along polylines (Gauss-Legendre of order 8 per
edge, exact for polynomial coefficients of degree <= 7; adaptive halving
otherwise), Legendrian verdicts, chord angle profiles, contact
Hamiltonian fields and a fixed-step RK4 flow.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import math

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainExitError, ValidationError
from .geometry import Curve, PlaneCurve, SpaceCurve

QUAD_ORDER = 8
ADAPTIVE_REL_TOL = 1e-12
LEGENDRIAN_REL_TOL = 1e-8

_QNODES, _QWEIGHTS = roots_legendre(QUAD_ORDER)


# -- domains -----------------------------------------------------------


@dataclass(frozen=True)
class RectDomain:
    xmin: float = -math.inf
    xmax: float = math.inf
    ymin: float = -math.inf
    ymax: float = math.inf

    def contains(self, pts: np.ndarray) -> bool:
        x, y = pts[..., 0], pts[..., 1]
        return bool(np.all((x >= self.xmin) & (x <= self.xmax)
                           & (y >= self.ymin) & (y <= self.ymax)))

    def to_json_dict(self) -> dict:
        def num(v):
            return None if math.isinf(v) else v
        return {"type": "rect", "xmin": num(self.xmin), "xmax": num(self.xmax),
                "ymin": num(self.ymin), "ymax": num(self.ymax)}


@dataclass(frozen=True)
class AnnulusDomain:
    rmin: float = 0.0
    rmax: float = math.inf
    cx: float = 0.0
    cy: float = 0.0

    def contains(self, pts: np.ndarray) -> bool:
        r = np.hypot(pts[..., 0] - self.cx, pts[..., 1] - self.cy)
        return bool(np.all((r >= self.rmin) & (r <= self.rmax)))

    def to_json_dict(self) -> dict:
        return {"type": "annulus", "rmin": self.rmin,
                "rmax": None if math.isinf(self.rmax) else self.rmax,
                "cx": self.cx, "cy": self.cy}


def domain_from_json_dict(data) -> RectDomain | AnnulusDomain:
    if data is None:
        return RectDomain()
    kind = data.get("type", "rect")
    def num(v, default):
        return default if v is None else float(v)
    if kind == "rect":
        return RectDomain(num(data.get("xmin"), -math.inf), num(data.get("xmax"), math.inf),
                          num(data.get("ymin"), -math.inf), num(data.get("ymax"), math.inf))
    if kind == "annulus":
        return AnnulusDomain(num(data.get("rmin"), 0.0), num(data.get("rmax"), math.inf),
                             num(data.get("cx"), 0.0), num(data.get("cy"), 0.0))
    raise ValidationError(f"unknown domain type {kind!r}")


# -- the form ----------------------------------------------------------


@dataclass(frozen=True)
class ContactForm:
    """beta = a dx + b dy; evaluators are vectorized over point arrays."""

    kind: str
    a: object                      # callable (x, y) -> array
    b: object
    da: object                     # callable (x, y) -> (a_x, a_y)
    db: object                     # callable (x, y) -> (b_x, b_y)
    polynomial: bool = True
    domain: object = field(default_factory=RectDomain)
    a_coeffs: tuple = ()
    b_coeffs: tuple = ()

    def beta(self, pts: np.ndarray) -> np.ndarray:
        x, y = pts[..., 0], pts[..., 1]
        return np.stack([self.a(x, y), self.b(x, y)], axis=-1)

    def dbeta(self, pts: np.ndarray) -> np.ndarray:
        x, y = pts[..., 0], pts[..., 1]
        _, a_y = self.da(x, y)
        b_x, _ = self.db(x, y)
        return b_x - a_y

    def beta_norm(self, pts: np.ndarray) -> np.ndarray:
        bv = self.beta(pts)
        return np.linalg.norm(bv, axis=-1)

    def alpha_norm(self, pts_xy: np.ndarray) -> np.ndarray:
        """Norm of (a, b, 1) at planar points."""
        bv = self.beta(pts_xy)
        return np.sqrt(1.0 + np.einsum("...i,...i->...", bv, bv))

    def require_inside(self, pts: np.ndarray) -> None:
        if not self.domain.contains(pts):
            raise DomainExitError("curve leaves the form domain")

    def check_contact_condition(self, pts: np.ndarray) -> None:
        w = self.dbeta(pts)
        if np.any(w == 0.0) or (np.any(w > 0) and np.any(w < 0)):
            raise ValidationError("d(beta) vanishes or changes sign on sampled points")

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind, "domain": self.domain.to_json_dict()}
        if self.kind == "poly":
            out["a_coeffs"] = [list(map(float, row)) for row in self.a_coeffs]
            out["b_coeffs"] = [list(map(float, row)) for row in self.b_coeffs]
        return out


def _const(c):
    def f(x, y):
        return np.broadcast_arrays(np.asarray(x, float) * 0.0 + c, y)[0]
    return f


def form_xdy(domain=None) -> ContactForm:
    """beta = x dy (so alpha = dz + x dy)."""
    return ContactForm(
        kind="xdy",
        a=lambda x, y: np.zeros_like(np.asarray(x, float)),
        b=lambda x, y: np.asarray(x, float) + 0.0 * np.asarray(y, float),
        da=lambda x, y: (np.zeros_like(np.asarray(x, float)),) * 2,
        db=lambda x, y: (np.ones_like(np.asarray(x, float)),
                         np.zeros_like(np.asarray(x, float))),
        polynomial=True,
        domain=domain or RectDomain(),
    )


def form_minus_ydx(domain=None) -> ContactForm:
    """beta = -y dx (so alpha = dz - y dx)."""
    return ContactForm(
        kind="minus_ydx",
        a=lambda x, y: -np.asarray(y, float) + 0.0 * np.asarray(x, float),
        b=lambda x, y: np.zeros_like(np.asarray(x, float)),
        da=lambda x, y: (np.zeros_like(np.asarray(x, float)),
                         -np.ones_like(np.asarray(x, float))),
        db=lambda x, y: (np.zeros_like(np.asarray(x, float)),) * 2,
        polynomial=True,
        domain=domain or RectDomain(),
    )


def form_rot(domain=None) -> ContactForm:
    """beta = x dy - y dx (equals rho^2 dphi in polar coordinates)."""
    return ContactForm(
        kind="rot",
        a=lambda x, y: -np.asarray(y, float) + 0.0 * np.asarray(x, float),
        b=lambda x, y: np.asarray(x, float) + 0.0 * np.asarray(y, float),
        da=lambda x, y: (np.zeros_like(np.asarray(x, float)),
                         -np.ones_like(np.asarray(x, float))),
        db=lambda x, y: (np.ones_like(np.asarray(x, float)),
                         np.zeros_like(np.asarray(x, float))),
        polynomial=True,
        domain=domain or RectDomain(),
    )


def form_poly(a_coeffs, b_coeffs, domain=None) -> ContactForm:
    """Polynomial coefficients: c[i][j] multiplies x**i * y**j."""
    from numpy.polynomial import polynomial as P

    ac = np.atleast_2d(np.asarray(a_coeffs, dtype=float))
    bc = np.atleast_2d(np.asarray(b_coeffs, dtype=float))
    ac_x = P.polyder(ac, axis=0) if ac.shape[0] > 1 else np.zeros((1, 1))
    ac_y = P.polyder(ac, axis=1) if ac.shape[1] > 1 else np.zeros((1, 1))
    bc_x = P.polyder(bc, axis=0) if bc.shape[0] > 1 else np.zeros((1, 1))
    bc_y = P.polyder(bc, axis=1) if bc.shape[1] > 1 else np.zeros((1, 1))

    form = ContactForm(
        kind="poly",
        a=lambda x, y: P.polyval2d(x, y, ac),
        b=lambda x, y: P.polyval2d(x, y, bc),
        da=lambda x, y: (P.polyval2d(x, y, ac_x), P.polyval2d(x, y, ac_y)),
        db=lambda x, y: (P.polyval2d(x, y, bc_x), P.polyval2d(x, y, bc_y)),
        polynomial=max(ac.shape) - 1 + max(bc.shape) - 1 <= 7,
        domain=domain or RectDomain(),
        a_coeffs=tuple(map(tuple, ac)),
        b_coeffs=tuple(map(tuple, bc)),
    )
    return form


def form_from_json_dict(data: dict) -> ContactForm:
    kind = data.get("kind")
    domain = domain_from_json_dict(data.get("domain"))
    if kind == "xdy":
        return form_xdy(domain)
    if kind == "minus_ydx":
        return form_minus_ydx(domain)
    if kind == "rot":
        return form_rot(domain)
    if kind == "poly":
        return form_poly(data["a_coeffs"], data["b_coeffs"], domain)
    raise ValidationError(f"unknown form kind {kind!r}")


BUILTIN_FORMS = {
    "xdy": form_xdy,
    "minus_ydx": form_minus_ydx,
    "rot": form_rot,
}


# -- line integrals ----------------------------------------------------


def _edge_integrals_quad(form: ContactForm, starts, ends) -> np.ndarray:
    """Gauss-Legendre integral of beta along each straight edge."""
    starts = np.atleast_2d(starts)
    ends = np.atleast_2d(ends)
    t0 = 0.5 * (1.0 - _QNODES)
    t1 = 0.5 * (1.0 + _QNODES)
    # points: (n_edges, n_nodes, 2)
    pts = starts[:, None, :] * t0[None, :, None] + ends[:, None, :] * t1[None, :, None]
    bv = form.beta(pts)
    d = 0.5 * (ends - starts)  # dr/dt with t in [-1, 1]
    integrand = np.einsum("enk,ek->en", bv, d)
    return integrand @ _QWEIGHTS


def _edge_integrals(form: ContactForm, starts, ends) -> np.ndarray:
    vals = _edge_integrals_quad(form, starts, ends)
    if form.polynomial:
        return vals
    # adaptive halving for non-polynomial coefficient functions
    starts = np.atleast_2d(starts).copy()
    ends = np.atleast_2d(ends).copy()
    out = np.empty(len(starts))
    for k in range(len(starts)):
        out[k] = _adaptive_edge(form, starts[k], ends[k], vals[k], depth=0)
    return out


def _adaptive_edge(form, a, b, coarse, depth) -> float:
    mid = 0.5 * (a + b)
    fine = _edge_integrals_quad(form, np.array([a, mid]), np.array([mid, b])).sum()
    scale = max(abs(fine), 1.0)
    if abs(fine - coarse) <= ADAPTIVE_REL_TOL * scale or depth >= 40:
        return fine
    left = _adaptive_edge(form, a, mid,
                          _edge_integrals_quad(form, a[None], mid[None])[0], depth + 1)
    right = _adaptive_edge(form, mid, b,
                           _edge_integrals_quad(form, mid[None], b[None])[0], depth + 1)
    return left + right


def line_integral_beta(form: ContactForm, curve: PlaneCurve):
    """Integral of beta along a plane polyline.

    Returns (total, cumulative) where cumulative[k] is the integral from
    vertex 0 to vertex k; closed curves get one extra entry for the full
    loop.
    """
    v = curve.vertices
    form.require_inside(v)
    m = curve.n_edges
    starts = v[np.arange(m) % len(v)]
    ends = v[(np.arange(m) + 1) % len(v)]
    per_edge = _edge_integrals(form, starts, ends)
    cumulative = np.concatenate(([0.0], np.cumsum(per_edge)))
    return float(cumulative[-1]), cumulative


def line_integral_alpha(form: ContactForm, curve: SpaceCurve) -> np.ndarray:
    """Cumulative integral of dz + beta along a space polyline."""
    v = curve.vertices
    form.require_inside(v[:, :2])
    m = curve.n_edges
    idx = np.arange(m)
    starts = v[idx % len(v)]
    ends = v[(idx + 1) % len(v)]
    beta_part = _edge_integrals(form, starts[:, :2], ends[:, :2])
    dz_part = ends[:, 2] - starts[:, 2]
    return np.concatenate(([0.0], np.cumsum(dz_part + beta_part)))


@dataclass(frozen=True)
class LegendrianVerdict:
    residual: float            # range (max - min) of the cumulative alpha integral
    relative_residual: float   # residual / (arc length * sup |alpha| on the curve)
    arc_length: float
    sup_alpha: float
    cumulative: np.ndarray
    tolerance: float = LEGENDRIAN_REL_TOL

    @property
    def accepted(self) -> bool:
        return self.relative_residual <= self.tolerance


def legendrian_residual(form: ContactForm, curve: SpaceCurve,
                        tolerance: float = LEGENDRIAN_REL_TOL) -> LegendrianVerdict:
    cum = line_integral_alpha(form, curve)
    residual = float(cum.max() - cum.min())
    length = float(curve.edge_lengths().sum())
    sup_alpha = float(form.alpha_norm(curve.vertices[:, :2]).max())
    rel = residual / (length * sup_alpha) if length > 0 else 0.0
    return LegendrianVerdict(residual, rel, length, sup_alpha, cum, tolerance)


def angle_profile(form: ContactForm, curve: SpaceCurve, radii) -> list[tuple[float, float]]:
    """Worst chord angle against the contact plane, per radius.

    For each vertex p and radius r, chords between curve vertices lying
    within distance r of p are measured against the plane
    ker(dz + a dx + b dy) at p; the table holds the max over p.
    """
    radii = sorted(float(r) for r in radii)
    if not radii:
        raise ValidationError("radius list is empty")
    from scipy.spatial import cKDTree

    v = curve.vertices
    form.require_inside(v[:, :2])
    bv = form.beta(v[:, :2])
    normals = np.concatenate([bv, np.ones((len(v), 1))], axis=1)
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    tree = cKDTree(v)
    table = []
    for r in radii:
        worst = 0.0
        groups = tree.query_ball_point(v, r)
        for i, idx in enumerate(groups):
            idx = np.asarray(idx)
            if len(idx) < 2:
                continue
            pts = v[idx]
            chords = pts[None, :, :] - pts[:, None, :]
            iu = np.triu_indices(len(idx), k=1)
            ch = chords[iu]
            norms = np.linalg.norm(ch, axis=1)
            keep = norms > 0
            if not keep.any():
                continue
            s = np.abs(ch[keep] @ normals[i]) / norms[keep]
            worst = max(worst, float(np.arcsin(np.clip(s, 0.0, 1.0)).max()))
        table.append((r, worst))
    return table


# -- Hamiltonian fields and flows --------------------------------------


@dataclass(frozen=True)
class Hamiltonian:
    """Scalar function H(x, y, z) with gradient."""
    value: object   # callable (x, y, z) -> array
    grad: object    # callable (x, y, z) -> (H_x, H_y, H_z)

    @staticmethod
    def constant(c: float) -> "Hamiltonian":
        return Hamiltonian(
            value=lambda x, y, z: np.full_like(np.asarray(x, float), c),
            grad=lambda x, y, z: (np.zeros_like(np.asarray(x, float)),) * 3,
        )

    @staticmethod
    def coordinate_y() -> "Hamiltonian":
        return Hamiltonian(
            value=lambda x, y, z: np.asarray(y, float) + 0.0 * np.asarray(x, float),
            grad=lambda x, y, z: (np.zeros_like(np.asarray(x, float)),
                                  np.ones_like(np.asarray(x, float)),
                                  np.zeros_like(np.asarray(x, float))),
        )

    @staticmethod
    def poly3d(coeffs) -> "Hamiltonian":
        from numpy.polynomial import polynomial as P
        c = np.asarray(coeffs, dtype=float)
        if c.ndim != 3:
            raise ValidationError("poly3d expects coeffs[i][j][k] for x^i y^j z^k")
        def der(axis):
            return P.polyder(c, axis=axis) if c.shape[axis] > 1 else np.zeros((1, 1, 1))
        cx, cy, cz = der(0), der(1), der(2)
        return Hamiltonian(
            value=lambda x, y, z: P.polyval3d(x, y, z, c),
            grad=lambda x, y, z: (P.polyval3d(x, y, z, cx),
                                  P.polyval3d(x, y, z, cy),
                                  P.polyval3d(x, y, z, cz)),
        )


def hamiltonian_field(form: ContactForm, H: Hamiltonian):
    """Contact Hamiltonian vector field evaluator for alpha = dz + beta.

    X = (1/w) * (H_z * b - H_y, -H_z * a, H_y * a) + (0, 0, H)
    where w = db/dx - da/dy.
    """
    def field(pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, float))
        x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
        av = form.a(x, y)
        bv = form.b(x, y)
        w = form.dbeta(pts[:, :2])
        _, hy, hz = H.grad(x, y, z)
        hval = H.value(x, y, z)
        out = np.empty_like(pts)
        out[:, 0] = (hz * bv - hy) / w
        out[:, 1] = -hz * av / w
        out[:, 2] = hy * av / w + hval
        return out
    return field


def flow(field, points, t: float, step: float) -> np.ndarray:
    """Fixed-step classical RK4 flow of `field` for time t."""
    if step <= 0:
        raise ValidationError("step must be positive")
    pts = np.atleast_2d(np.asarray(points, dtype=float)).copy()
    remaining = float(t)
    sign = 1.0 if remaining >= 0 else -1.0
    remaining = abs(remaining)
    n_steps = int(math.ceil(remaining / step - 1e-12)) if remaining > 0 else 0
    h_last = remaining - (n_steps - 1) * step if n_steps else 0.0
    for k in range(n_steps):
        h = sign * (step if k < n_steps - 1 else h_last)
        k1 = field(pts)
        k2 = field(pts + 0.5 * h * k1)
        k3 = field(pts + 0.5 * h * k2)
        k4 = field(pts + h * k3)
        pts = pts + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return pts
