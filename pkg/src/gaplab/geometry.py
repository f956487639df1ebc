"""Convex planar geometry: polygons, cuts, diameters, widths, sections, depth,
and the maximal inscribed ellipse.

All polygons are counterclockwise vertex lists.  Every predicate uses the
tolerance EPS_GEOM scaled by the polygon's own length scale, so the module is
unit-agnostic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDomain, EmptyCut, InvalidChord, JohnSolveFailed

EPS_GEOM = 1e-9


def _as_vertices(points) -> np.ndarray:
    v = np.asarray(points, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise DegenerateDomain("need at least 3 planar vertices")
    return v


def shoelace_area(vertices: np.ndarray) -> float:
    """Signed area of a polygon (positive for counterclockwise order)."""
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon given by counterclockwise vertices."""

    vertices: np.ndarray

    def __post_init__(self):
        v = _as_vertices(self.vertices)
        object.__setattr__(self, "vertices", v)
        scale = self.scale
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross <= EPS_GEOM * scale**2):
            raise DegenerateDomain("vertex list is not strictly convex counterclockwise")
        if shoelace_area(v) <= EPS_GEOM * scale**2:
            raise DegenerateDomain("polygon area below tolerance")

    @property
    def scale(self) -> float:
        v = self.vertices
        return float(max(np.ptp(v[:, 0]), np.ptp(v[:, 1]), 1e-300))

    @property
    def area(self) -> float:
        return shoelace_area(self.vertices)

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cr = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        return (v + w).T @ cr / (6.0 * self.area)

    def halfplanes(self):
        """Outward normals and offsets: the polygon is {x : A x <= b}."""
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        nrm = np.stack([e[:, 1], -e[:, 0]], axis=1)
        nrm /= np.linalg.norm(nrm, axis=1)[:, None]
        return nrm, np.einsum("ij,ij->i", nrm, v)

    def contains(self, points, tol=None) -> np.ndarray:
        """Membership of points in the closed polygon (within tol)."""
        if tol is None:
            tol = EPS_GEOM * self.scale
        A, b = self.halfplanes()
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return (p @ A.T - b <= tol).all(axis=1)

    def bounding_box(self):
        v = self.vertices
        return float(v[:, 0].min()), float(v[:, 0].max()), float(v[:, 1].min()), float(v[:, 1].max())

    def to_json(self) -> dict:
        return {"vertices": [[float(x), float(y)] for x, y in self.vertices]}


@dataclass(frozen=True)
class Chord:
    """Segment with both endpoints in a closed polygon."""

    endpoints: np.ndarray
    length: float = field(default=None)

    def __post_init__(self):
        e = np.asarray(self.endpoints, dtype=float).reshape(2, 2)
        object.__setattr__(self, "endpoints", e)
        object.__setattr__(self, "length", float(np.linalg.norm(e[1] - e[0])))

    @property
    def direction(self) -> np.ndarray:
        d = self.endpoints[1] - self.endpoints[0]
        return d / np.linalg.norm(d)

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.endpoints[0] + self.endpoints[1])


@dataclass(frozen=True)
class Ellipse:
    """Ellipse with semi-axes a1 >= a2 > 0 and orientation angle in [0, pi)."""

    center: np.ndarray
    semi_axes: tuple
    orientation: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        a1, a2 = self.semi_axes
        if not (a1 >= a2 > 0):
            raise DegenerateDomain("ellipse semi-axes must satisfy a1 >= a2 > 0")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "semi_axes", (float(a1), float(a2)))
        object.__setattr__(self, "orientation", float(self.orientation) % math.pi)

    def boundary_points(self, n: int = 64) -> np.ndarray:
        t = 2 * np.pi * np.arange(n) / n
        a1, a2 = self.semi_axes
        c, s = math.cos(self.orientation), math.sin(self.orientation)
        R = np.array([[c, -s], [s, c]])
        pts = np.stack([a1 * np.cos(t), a2 * np.sin(t)], axis=1)
        return pts @ R.T + self.center

    def scaled(self, factor: float) -> "Ellipse":
        a1, a2 = self.semi_axes
        return Ellipse(self.center, (factor * a1, factor * a2), self.orientation)

    def contains(self, points, tol=0.0) -> np.ndarray:
        a1, a2 = self.semi_axes
        c, s = math.cos(self.orientation), math.sin(self.orientation)
        R = np.array([[c, s], [-s, c]])
        q = (np.atleast_2d(points) - self.center) @ R.T
        return (q[:, 0] / a1) ** 2 + (q[:, 1] / a2) ** 2 <= 1.0 + tol


def diameter(P: ConvexPolygon) -> Chord:
    """Longest chord of the polygon, by rotating calipers over antipodal
    vertex pairs.  Ties are broken by first occurrence in vertex order."""
    v = P.vertices
    n = len(v)
    e = np.roll(v, -1, axis=0) - v

    def cross(a, b):
        return a[0] * b[1] - a[1] * b[0]

    best = (-1.0, None)
    j = 1
    for i in range(n):
        # advance j while the area (distance from edge i) keeps growing
        while cross(e[i], v[(j + 1) % n] - v[j]) > 0:
            j = (j + 1) % n
        for q in (j, (j + 1) % n):
            d = float(np.linalg.norm(v[q] - v[i]))
            if d > best[0] + EPS_GEOM * P.scale:
                best = (d, (i, q))
    if best[1] is None:
        raise DegenerateDomain("no antipodal pair found")
    i, q = best[1]
    return Chord(np.array([v[i], v[q]]))


def width(P: ConvexPolygon) -> float:
    """Minimal distance between parallel supporting lines.  For a polygon the
    width direction is normal to some edge, so the minimum over edge normals
    is exact."""
    A, b = P.halfplanes()
    proj = P.vertices @ A.T
    return float((proj.max(axis=0) - proj.min(axis=0)).min())


def line_section(P: ConvexPolygon, point, direction) -> float:
    """Length of the intersection of the line {point + t * direction} with P."""
    A, b = P.halfplanes()
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    ad = A @ d
    s = b - A @ np.asarray(point, dtype=float)
    tol = EPS_GEOM * P.scale
    lo, hi = -np.inf, np.inf
    for adi, si in zip(ad, s):
        if adi > tol:
            hi = min(hi, si / adi)
        elif adi < -tol:
            lo = max(lo, si / adi)
        elif si < -tol:
            return 0.0
    return float(max(hi - lo, 0.0))


def section_profile(P: ConvexPolygon, direction, x: float) -> float:
    """Length of the slice of P orthogonal to `direction` at abscissa x.

    The abscissa is measured along `direction` from the origin; slices outside
    the projection range have length 0.  The profile is concave in x."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    proj = P.vertices @ d
    if x < proj.min() - EPS_GEOM * P.scale or x > proj.max() + EPS_GEOM * P.scale:
        return 0.0
    n = np.array([-d[1], d[0]])
    return line_section(P, x * d, n)


def depth(P: ConvexPolygon, diam: Chord) -> float:
    """Maximum length of sections orthogonal to the given diameter chord.

    The orthogonal profile is concave piecewise linear in the abscissa with
    breakpoints at vertex projections, so the maximum over vertex abscissae
    is exact."""
    tol = 10 * EPS_GEOM * P.scale
    if not P.contains(diam.endpoints, tol=tol).all():
        raise InvalidChord("chord endpoints are outside the polygon")
    u = diam.direction
    abscissae = np.unique(P.vertices @ u)
    return max(section_profile(P, u, float(x)) for x in abscissae)


def halfplane_cut(P: ConvexPolygon, angle: float, offset: float):
    """Split P by the line {x . n = offset}, n = (cos angle, sin angle).

    Returns (low, high) with low = P ∩ {x . n <= offset}.  Raises EmptyCut if
    the line misses the interior or either piece is a sliver below
    EPS_GEOM * area(P)."""
    n = np.array([math.cos(angle), math.sin(angle)])
    v = P.vertices
    s = v @ n - offset
    tol = EPS_GEOM * P.scale
    low, high = [], []
    m = len(v)
    for i in range(m):
        j = (i + 1) % m
        si, sj = s[i], s[j]
        if si <= tol:
            low.append(v[i])
        if si >= -tol:
            high.append(v[i])
        if (si < -tol and sj > tol) or (si > tol and sj < -tol):
            t = si / (si - sj)
            p = v[i] + t * (v[j] - v[i])
            low.append(p)
            high.append(p)

    def build(pts):
        if len(pts) < 3:
            return None
        arr = np.asarray(pts)
        keep = [0]
        for k in range(1, len(arr)):
            if np.linalg.norm(arr[k] - arr[keep[-1]]) > tol:
                keep.append(k)
        if np.linalg.norm(arr[keep[-1]] - arr[keep[0]]) <= tol:
            keep.pop()
        arr = arr[keep]
        if len(arr) < 3 or shoelace_area(arr) < EPS_GEOM * P.area:
            return None
        return ConvexPolygon(arr)

    lo_poly, hi_poly = build(low), build(high)
    if lo_poly is None or hi_poly is None:
        raise EmptyCut("cut line misses the polygon interior or leaves a sliver")
    return lo_poly, hi_poly


def john_ellipse(P: ConvexPolygon, eps=1e-6) -> Ellipse:
    """Maximal-area inscribed ellipse, by log-det maximization over the shape
    matrix with one second-order-cone constraint per edge.

    The result satisfies E ⊆ P and P ⊆ 2E (planar John containment) within
    the solver tolerance."""
    import cvxpy as cp

    A, b = P.halfplanes()
    B = cp.Variable((2, 2), PSD=True)
    c = cp.Variable(2)
    cons = [cp.norm(B @ A[i]) + A[i] @ c <= b[i] for i in range(len(b))]
    prob = cp.Problem(cp.Maximize(cp.log_det(B)), cons)
    try:
        prob.solve(solver=cp.SCS, eps=min(eps, 1e-8) * P.scale, max_iters=200_000)
    except cp.error.SolverError as exc:
        raise JohnSolveFailed(f"SCS failed: {exc}") from exc
    if prob.status not in ("optimal", "optimal_inaccurate") or B.value is None:
        raise JohnSolveFailed(f"status {prob.status}", residual=prob.value)
    M = 0.5 * (B.value + B.value.T)
    w, V = np.linalg.eigh(M)
    if w.min() <= 0:
        raise JohnSolveFailed("shape matrix not positive definite", residual=float(w.min()))
    a2, a1 = float(w[0]), float(w[1])
    ang = math.atan2(V[1, 1], V[0, 1])  # eigenvector of the larger axis
    return Ellipse(np.asarray(c.value), (a1, a2), ang)


# ---------------------------------------------------------------------------
# Built-in domain generators (addressable by name in the CLI)
# ---------------------------------------------------------------------------

def square() -> ConvexPolygon:
    return ConvexPolygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


def rectangle(d: float, eps: float) -> ConvexPolygon:
    return ConvexPolygon(np.array([[0.0, 0.0], [d, 0.0], [d, eps], [0.0, eps]]))


def regular_ngon(k: int, circumradius: float = 1.0) -> ConvexPolygon:
    t = 2 * np.pi * np.arange(k) / k
    return ConvexPolygon(circumradius * np.stack([np.cos(t), np.sin(t)], axis=1))


def disk_polygon(radius: float = 1.0, k: int = 256) -> ConvexPolygon:
    return regular_ngon(k, radius)


def sector(angle: float, radius: float = 1.0, arc_points: int = 128) -> ConvexPolygon:
    """Circular sector of the given opening angle (radians), polygonized."""
    if not 0 < angle < 2 * math.pi:
        raise DegenerateDomain("sector angle must lie in (0, 2*pi)")
    m = max(2, int(round(arc_points * angle / (2 * math.pi))) + 1)
    t = np.linspace(0.0, angle, m)
    pts = [np.zeros(2)] + [radius * np.array([math.cos(a), math.sin(a)]) for a in t]
    return ConvexPolygon(np.asarray(pts))


def random_polygon(k: int, seed: int) -> ConvexPolygon:
    """Random convex polygon with ~k vertices on a perturbed ellipse.

    Deterministic for a fixed (k, seed).  The aspect ratio is kept above 1/4
    so the result is never near-degenerate."""
    rng = np.random.default_rng(seed)
    for _ in range(64):
        b = rng.uniform(0.25, 1.0)
        ang = np.sort(rng.uniform(0.0, 2 * np.pi, size=max(k, 3)))
        r = 1.0 + 0.15 * rng.uniform(-1.0, 1.0, size=len(ang))
        pts = np.stack([r * np.cos(ang), b * r * np.sin(ang)], axis=1)
        hull = _convex_hull(pts)
        if len(hull) >= 3:
            try:
                return ConvexPolygon(hull)
            except DegenerateDomain:
                continue
    raise DegenerateDomain(f"could not draw a convex polygon for seed {seed}")


def _convex_hull(pts: np.ndarray) -> np.ndarray:
    """Andrew's monotone chain; returns ccw hull vertices, collinear dropped."""
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def half(points):
        out = []
        for p in points:
            while len(out) > 1 and np.cross(out[-1] - out[-2], p - out[-2]) <= 1e-12:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.asarray(lower[:-1] + upper[:-1])


def polygon_from_spec(spec: str) -> ConvexPolygon:
    """Resolve a domain spec string: a generator name (`square`, `rect:d:eps`,
    `ngon:k`, `disk`, `sector:angle`, `random:k:seed`, `diamond`) or a path to
    a polygon JSON file with schema {"vertices": [[x, y], ...]}."""
    parts = spec.split(":")
    name = parts[0]
    if name == "square":
        return square()
    if name == "rect":
        return rectangle(float(parts[1]), float(parts[2]))
    if name == "ngon":
        return regular_ngon(int(parts[1]))
    if name == "disk":
        return disk_polygon()
    if name == "sector":
        return sector(float(parts[1]))
    if name == "random":
        return random_polygon(int(parts[1]), int(parts[2]))
    if name == "diamond":
        return ConvexPolygon(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]))
    try:
        with open(spec) as f:
            data = json.load(f)
        return ConvexPolygon(np.asarray(data["vertices"], dtype=float))
    except OSError as exc:
        raise ValueError(f"unknown domain spec {spec!r}") from exc
