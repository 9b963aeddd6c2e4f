"""Polyline curves in the plane and in space, with metric diagnostics.

Curves are ordered polylines, open or closed.  All diagnostics are pure
functions of the vertex array.  The chord-arc constant of a polyline is
maximized over vertex pairs together with the corner limit 1/sin(theta/2)
at every interior vertex; the corner limit is the supremum of the ratio
over point pairs straddling a single corner, so the reported constant is
a tight lower bound of the continuum supremum that is exact on straight
polylines, single corners and sampled circular arcs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import json
import math

import numpy as np

from .errors import DegenerateInputError, ValidationError

# Relative tolerances against the bounding-box diagonal.
EDGE_REL_TOL = 1e-14      # minimal admissible edge length
EMBED_REL_TOL = 1e-12     # minimal admissible gap between non-adjacent edges

_EMBED_CHECK_LIMIT = 6000  # skip the quadratic self-intersection scan above this


def _as_vertex_array(vertices, dim: int) -> np.ndarray:
    arr = np.asarray(vertices, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ValidationError(f"expected an (n, {dim}) vertex array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("vertices must be finite")
    return arr


class Curve:
    """Shared implementation of plane and space polylines."""

    DIM = None  # set by subclasses

    def __init__(self, vertices, closed: bool = False, check_embedded: bool = True):
        v = _as_vertex_array(vertices, self.DIM)
        n_min = 3 if closed else 2
        if len(v) < n_min:
            raise ValidationError(f"need at least {n_min} vertices, got {len(v)}")
        self._vertices = v
        self._vertices.setflags(write=False)
        self.closed = bool(closed)

        diag = self.bbox_diagonal()
        edges = self.edge_vectors()
        lengths = np.linalg.norm(edges, axis=1)
        if np.any(lengths <= EDGE_REL_TOL * max(diag, 1e-300)):
            raise DegenerateInputError("coincident consecutive vertices")
        self._edge_lengths = lengths
        self._edge_lengths.setflags(write=False)
        if check_embedded:
            self.require_embedded()

    # -- basic geometry ------------------------------------------------

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    def __len__(self) -> int:
        return len(self._vertices)

    @property
    def n_edges(self) -> int:
        return len(self._vertices) - (0 if self.closed else 1)

    def edge_vectors(self) -> np.ndarray:
        v = self._vertices
        if self.closed:
            return np.roll(v, -1, axis=0) - v
        return v[1:] - v[:-1]

    def edge_lengths(self) -> np.ndarray:
        return self._edge_lengths

    def bbox_diagonal(self) -> float:
        v = self._vertices
        return float(np.linalg.norm(v.max(axis=0) - v.min(axis=0)))

    def cumulative_lengths(self) -> np.ndarray:
        """Arc length from vertex 0 to each vertex; closed curves get an
        extra final entry equal to the total length."""
        return np.concatenate(([0.0], np.cumsum(self._edge_lengths)))

    def require_embedded(self) -> None:
        if len(self._vertices) > _EMBED_CHECK_LIMIT:
            return
        gap = self.min_self_gap()
        if gap is not None and gap <= EMBED_REL_TOL * max(self.bbox_diagonal(), 1e-300):
            raise ValidationError("curve is not embedded: non-adjacent edges touch")

    def min_self_gap(self) -> float | None:
        """Minimum distance between non-adjacent edges (None if < 2 pairs)."""
        v = self._vertices
        m = self.n_edges
        if m < 3:
            return None
        starts = v[np.arange(m) % len(v)]
        ends = v[(np.arange(m) + 1) % len(v)]
        best = math.inf
        for i in range(m - 2):
            j0 = i + 2
            j1 = m if (not self.closed or i > 0) else m - 1
            if j0 >= j1:
                continue
            d = _segment_to_segments_distance(
                starts[i], ends[i], starts[j0:j1], ends[j0:j1])
            best = min(best, float(d.min()))
        return best if best < math.inf else None

    # -- derived curves ------------------------------------------------

    def reversed(self) -> "Curve":
        return type(self)(self._vertices[::-1], closed=self.closed, check_embedded=False)

    def translated(self, offset) -> "Curve":
        off = np.asarray(offset, dtype=float)
        return type(self)(self._vertices + off, closed=self.closed, check_embedded=False)

    # -- serialization -------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "dim": self.DIM,
            "closed": self.closed,
            "vertices": [[float(x) for x in row] for row in self._vertices],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"), sort_keys=True)


class PlaneCurve(Curve):
    DIM = 2


class SpaceCurve(Curve):
    DIM = 3


def curve_from_json_dict(data: dict, check_embedded: bool = True) -> Curve:
    try:
        dim = data["dim"]
        closed = data["closed"]
        vertices = data["vertices"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed curve JSON: {exc}") from exc
    if dim == 2:
        return PlaneCurve(vertices, closed=closed, check_embedded=check_embedded)
    if dim == 3:
        return SpaceCurve(vertices, closed=closed, check_embedded=check_embedded)
    raise ValidationError(f"unsupported curve dimension {dim}")


def curve_from_json(text: str, check_embedded: bool = True) -> Curve:
    return curve_from_json_dict(json.loads(text), check_embedded=check_embedded)


# -- segment utilities -------------------------------------------------


def _segment_to_segments_distance(p0, p1, q0, q1) -> np.ndarray:
    """Distance from the segment p0-p1 to each segment q0[k]-q1[k].

    Classical clamped closest-point iteration; vectorized over the second
    family.  Accurate enough for tolerance checks (not exact arithmetic).
    """
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    q0 = np.atleast_2d(np.asarray(q0, float))
    q1 = np.atleast_2d(np.asarray(q1, float))

    d1 = p1 - p0                     # (dim,)
    d2 = q1 - q0                     # (m, dim)
    r = p0 - q0                      # (m, dim)
    a = float(d1 @ d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = d2 @ r.T if r.ndim == 1 else np.einsum("ij,ij->i", d2, r)
    c = r @ d1
    b = d2 @ d1

    denom = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 0, (b * f - c * e) / np.where(denom > 0, denom, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    t = np.where(e > 0, (b * s + f) / np.where(e > 0, e, 1.0), 0.0)
    t_cl = np.clip(t, 0.0, 1.0)
    # re-clamp s where t was clamped
    s = np.where(t != t_cl, np.clip(((t_cl * b) - c) / a if a > 0 else 0.0, 0.0, 1.0), s)
    t = t_cl
    closest_p = p0 + np.outer(s, d1)
    closest_q = q0 + d2 * t[:, None]
    return np.linalg.norm(closest_p - closest_q, axis=1)


def corner_angle(prev_pt, vertex, next_pt) -> float:
    """Angle at `vertex` between the rays toward prev_pt and next_pt.

    Uses atan2 of cross/dot magnitudes; works in 2 and 3 dimensions.
    """
    u = np.asarray(prev_pt, float) - np.asarray(vertex, float)
    w = np.asarray(next_pt, float) - np.asarray(vertex, float)
    dot = float(u @ w)
    if len(u) == 2:
        cross = abs(u[0] * w[1] - u[1] * w[0])
    else:
        cross = float(np.linalg.norm(np.cross(u, w)))
    return math.atan2(cross, dot)


# -- diagnostics -------------------------------------------------------


@dataclass(frozen=True)
class ChordArcReport:
    constant: float
    witness: tuple[int, int] | None  # vertex pair attaining the constant
    length: float                    # total arc length of the curve
    corner_vertex: int | None = None  # set when a corner limit dominates

    @property
    def corner_dominated(self) -> bool:
        return self.corner_vertex is not None


def arc_length(curve: Curve) -> float:
    return float(curve.edge_lengths().sum())


def _pairwise_max_ratio(curve: Curve):
    """Max over vertex pairs of (shorter subarc length)/(chord length)."""
    v = curve.vertices
    cum = curve.cumulative_lengths()
    total = cum[-1]
    n = len(v)
    best = 0.0
    witness = (0, min(1, n - 1))
    # row-by-row keeps memory linear; each row is vectorized
    for i in range(n - 1):
        arcs = cum[i + 1:n] - cum[i]
        if curve.closed:
            arcs = np.minimum(arcs, total - arcs)
        chords = np.linalg.norm(v[i + 1:] - v[i], axis=1)
        if np.any(chords == 0.0):
            raise DegenerateInputError("coincident vertices in chord-arc scan")
        ratios = arcs / chords
        k = int(np.argmax(ratios))
        if ratios[k] > best:
            best = float(ratios[k])
            witness = (i, i + 1 + k)
    return best, witness


def min_corner_angle(curve: Curve) -> tuple[float, int | None]:
    """Smallest corner angle over interior vertices (all vertices if closed).

    Returns (pi, None) when the curve has no interior vertex.
    """
    v = curve.vertices
    n = len(v)
    best = math.pi
    best_idx: int | None = None
    if curve.closed:
        indices = range(n)
    else:
        indices = range(1, n - 1)
    for i in indices:
        ang = corner_angle(v[(i - 1) % n], v[i], v[(i + 1) % n])
        if ang < best:
            best = ang
            best_idx = i
    return best, best_idx


def chord_arc_constant(curve: Curve) -> ChordArcReport:
    """Chord-arc (Lavrentiev) constant of a polyline.

    Max of the vertex-pair ratio and of the corner limits 1/sin(theta/2);
    the corner limit is the exact supremum over point pairs placed
    symmetrically across a single corner of angle theta.
    """
    best, witness = _pairwise_max_ratio(curve)
    corner_idx = None
    v = curve.vertices
    n = len(v)
    indices = range(n) if curve.closed else range(1, n - 1)
    for i in indices:
        ang = corner_angle(v[(i - 1) % n], v[i], v[(i + 1) % n])
        half_sin = math.sin(ang / 2.0)
        if half_sin <= 0.0:
            raise DegenerateInputError("zero-angle cusp vertex")
        limit = 1.0 / half_sin
        if limit > best:
            best = limit
            corner_idx = i
    constant = max(best, 1.0)
    if corner_idx is not None:
        return ChordArcReport(constant, None, arc_length(curve), corner_idx)
    return ChordArcReport(constant, witness, arc_length(curve))


def bilipschitz_constant(source: Curve, image: Curve) -> float:
    """Bi-Lipschitz constant of the vertex correspondence source -> image."""
    a = source.vertices
    b = image.vertices
    if len(a) != len(b):
        raise ValidationError("curves must have equal vertex counts")
    n = len(a)
    best = 1.0
    for i in range(n - 1):
        da = np.linalg.norm(a[i + 1:] - a[i], axis=1)
        db = np.linalg.norm(b[i + 1:] - b[i], axis=1)
        if np.any(da == 0.0) or np.any(db == 0.0):
            raise DegenerateInputError("coincident vertices in bi-Lipschitz scan")
        r = db / da
        best = max(best, float(r.max()), float((1.0 / r).max()))
    return best


def subarc(curve: Curve, i: int, j: int) -> Curve:
    """Subarc from vertex i to vertex j (shorter way around if closed)."""
    n = len(curve)
    if not (0 <= i < n and 0 <= j < n):
        raise ValidationError("subarc indices out of range")
    if i == j:
        raise ValidationError("subarc endpoints coincide")
    v = curve.vertices
    if not curve.closed:
        lo, hi = (i, j) if i < j else (j, i)
        pts = v[lo:hi + 1]
        if i > j:
            pts = pts[::-1]
    else:
        cum = curve.cumulative_lengths()
        total = cum[-1]
        fwd_idx = [k % n for k in range(i, i + (j - i) % n + 1)]
        fwd_len = (cum[j] - cum[i]) % total
        if fwd_len <= total - fwd_len:
            pts = v[fwd_idx]
        else:
            bwd_idx = [k % n for k in range(j, j + (i - j) % n + 1)]
            pts = v[bwd_idx][::-1]
    return type(curve)(pts, closed=False, check_embedded=False)


def resample(curve: Curve, max_edge: float) -> Curve:
    """Insert collinear vertices so that every edge is at most max_edge long."""
    if max_edge <= 0:
        raise ValidationError("max_edge must be positive")
    v = curve.vertices
    pieces = []
    m = curve.n_edges
    for k in range(m):
        a = v[k]
        b = v[(k + 1) % len(v)]
        n_split = max(1, int(math.ceil(np.linalg.norm(b - a) / max_edge - 1e-12)))
        ts = np.arange(n_split) / n_split
        pieces.append(a + np.outer(ts, b - a))
    if not curve.closed:
        pieces.append(v[-1:])
    out = np.vstack(pieces)
    return type(curve)(out, closed=curve.closed, check_embedded=False)


def subdivide_edges(curve: Curve, parts: int) -> Curve:
    """Split every edge into `parts` equal collinear pieces."""
    if parts < 1:
        raise ValidationError("subdivision must be >= 1")
    if parts == 1:
        return curve
    v = curve.vertices
    pieces = []
    m = curve.n_edges
    ts = np.arange(parts) / parts
    for k in range(m):
        a = v[k]
        b = v[(k + 1) % len(v)]
        pieces.append(a + np.outer(ts, b - a))
    if not curve.closed:
        pieces.append(v[-1:])
    return type(curve)(np.vstack(pieces), closed=curve.closed, check_embedded=False)


def iter_edges(curve: Curve) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    v = curve.vertices
    for k in range(curve.n_edges):
        yield v[k], v[(k + 1) % len(v)]
