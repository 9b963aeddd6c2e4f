"""Legendrian lifting of plane polylines and the reverse projection.

A plane curve lifts to z(q) = z0 - (beta-integral from the start to q);
the lift is sampled on a subdivision of each input edge.  Projection
drops z and demands an embedded image.  `projection_bounds_check`
verifies the quantitative comparison between a Legendrian curve and its
projection with constant K = sqrt(1 + (B*C)^2), where B is the sup of
the beta norm along the curve and C the chord-arc constant of the
projection.
"""
from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .errors import NonInjectiveProjectionError, ValidationError
from .forms import ContactForm, LEGENDRIAN_REL_TOL, legendrian_residual, line_integral_beta
from .geometry import PlaneCurve, SpaceCurve, chord_arc_constant, subdivide_edges

CLOSURE_REL_TOL = 1e-10     # closed/open decision for lifted loops
DEFAULT_SUBDIVISION = 8


@dataclass(frozen=True)
class LiftResult:
    curve: SpaceCurve
    closure_defect: float    # z-mismatch for closed inputs (0 for open inputs)
    subdivision: int

    @property
    def closed(self) -> bool:
        return self.curve.closed


def lift(form: ContactForm, curve: PlaneCurve, z0: float = 0.0,
         subdivision: int = DEFAULT_SUBDIVISION,
         closure_rel_tol: float = CLOSURE_REL_TOL) -> LiftResult:
    """Lift a plane polyline to a Legendrian polyline.

    Closed inputs come back closed when the loop integral of beta is
    below `closure_rel_tol` relative to the curve scale; otherwise the
    lift is an open helix-like arc whose z-mismatch is reported as the
    closure defect.
    """
    if subdivision < 1:
        raise ValidationError("subdivision must be >= 1")
    fine = subdivide_edges(curve, subdivision)
    total, cumulative = line_integral_beta(form, fine)
    z = z0 - cumulative
    v = fine.vertices
    if curve.closed:
        defect = -total
        scale = _lift_scale(form, fine)
        if abs(defect) <= closure_rel_tol * scale:
            pts = np.column_stack([v, z[:-1]])
            lifted = SpaceCurve(pts, closed=True, check_embedded=False)
        else:
            pts = np.column_stack([np.vstack([v, v[:1]]), z])
            lifted = SpaceCurve(pts, closed=False, check_embedded=False)
        return LiftResult(lifted, float(defect), subdivision)
    pts = np.column_stack([v, z])
    return LiftResult(SpaceCurve(pts, closed=False, check_embedded=False), 0.0, subdivision)


def _lift_scale(form: ContactForm, curve: PlaneCurve) -> float:
    length = float(curve.edge_lengths().sum())
    sup_alpha = float(form.alpha_norm(curve.vertices).max())
    return max(length * sup_alpha, 1e-300)


def project(curve: SpaceCurve) -> PlaneCurve:
    """Drop z.  Raises when the shadow is not an embedded polyline."""
    try:
        return PlaneCurve(curve.vertices[:, :2], closed=curve.closed, check_embedded=True)
    except ValidationError as exc:
        raise NonInjectiveProjectionError(f"projection is not embedded: {exc}") from exc


@dataclass(frozen=True)
class ProjectionBoundsReport:
    constant: float          # K = sqrt(1 + (B*C)^2)
    sup_beta: float          # B
    chord_arc: float         # C, of the projection
    worst_distance_margin: float   # min over pairs of K*dist(pr p, pr q) - dist(p, q)
    worst_length_margin: float     # min over pairs of K*len(pr arc) - len(arc)
    distance_witness: tuple[int, int]
    length_witness: tuple[int, int]

    @property
    def satisfied(self) -> bool:
        return self.worst_distance_margin >= 0.0 and self.worst_length_margin >= 0.0


def projection_bounds_check(form: ContactForm, curve: SpaceCurve,
                            residual_tol: float = LEGENDRIAN_REL_TOL) -> ProjectionBoundsReport:
    verdict = legendrian_residual(form, curve)
    if verdict.relative_residual > residual_tol:
        raise ValidationError(
            f"curve is not Legendrian: relative residual {verdict.relative_residual:.3e}")
    shadow = project(curve)

    b_sup = float(form.beta_norm(shadow.vertices).max())
    c = chord_arc_constant(shadow).constant
    k = math.sqrt(1.0 + (b_sup * c) ** 2)

    v3 = curve.vertices
    v2 = shadow.vertices
    cum3 = curve.cumulative_lengths()
    cum2 = shadow.cumulative_lengths()
    total3 = cum3[-1]
    total2 = cum2[-1]
    n = len(v3)

    worst_d = math.inf
    worst_l = math.inf
    wit_d = wit_l = (0, min(1, n - 1))
    for i in range(n - 1):
        d3 = np.linalg.norm(v3[i + 1:] - v3[i], axis=1)
        d2 = np.linalg.norm(v2[i + 1:] - v2[i], axis=1)
        dm = k * d2 - d3
        kd = int(np.argmin(dm))
        if dm[kd] < worst_d:
            worst_d = float(dm[kd])
            wit_d = (i, i + 1 + kd)

        arcs3 = cum3[i + 1:n] - cum3[i]
        arcs2 = cum2[i + 1:n] - cum2[i]
        lm = k * arcs2 - arcs3
        if curve.closed:
            lm = np.minimum(lm, k * (total2 - arcs2) - (total3 - arcs3))
        kl = int(np.argmin(lm))
        if lm[kl] < worst_l:
            worst_l = float(lm[kl])
            wit_l = (i, i + 1 + kl)

    return ProjectionBoundsReport(k, b_sup, c, worst_d, worst_l, wit_d, wit_l)
