"""Convex regions in the (R1, R2) rate plane."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

VERTEX_TOL = 1e-9
SLOPE_TOL = 1e-6
ALLOWED_SLOPES = (0.0, -0.5, -1.0, -2.0, float("inf"))


@dataclass(frozen=True, eq=False)
class Polygon2D:
    """Convex polygon as a CCW vertex array starting at the lexicographic minimum.

    Points (one vertex) and segments (two vertices) are valid degenerate
    polygons; zero vertices is the empty region.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2) + 0.0  # no -0.0
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return len(self.vertices)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3

    def allclose(self, other: "Polygon2D", tol: float = VERTEX_TOL) -> bool:
        return self.vertices.shape == other.vertices.shape and bool(
            np.all(np.abs(self.vertices - other.vertices) <= tol)
        )

    def edges(self):
        v = self.vertices
        return zip(v, np.roll(v, -1, axis=0))

    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        x, y = self.vertices.T
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def __repr__(self):
        pts = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in self.vertices)
        return f"Polygon2D([{pts}])"


EMPTY_POLYGON = Polygon2D(np.zeros((0, 2)))


@dataclass(frozen=True, eq=False)
class Region2D:
    """A convex rate region; always stored as its hull polygon."""

    hull: Polygon2D

    @property
    def vertices(self) -> np.ndarray:
        return self.hull.vertices

    @property
    def is_empty(self) -> bool:
        return self.hull.is_empty


def _as_polygon(x) -> Polygon2D:
    return x.hull if isinstance(x, Region2D) else x


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


_PREFILTER_DIRS = 64


def _prefilter(pts: np.ndarray) -> np.ndarray:
    """Drop points strictly inside the polygon spanned by extreme points in 64 directions."""
    ang = np.linspace(0.0, 2 * np.pi, _PREFILTER_DIRS, endpoint=False)
    dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    proj = pts @ dirs.T
    idx = np.unique(np.argmax(proj, axis=0))
    ring = pts[idx]
    center = ring.mean(axis=0)
    order = np.argsort(np.arctan2(ring[:, 1] - center[1], ring[:, 0] - center[0]))
    ring = ring[order]
    if len(ring) < 3:
        return pts
    inside = np.ones(len(pts), dtype=bool)
    for p, q in zip(ring, np.roll(ring, -1, axis=0)):
        edge = q - p
        length = np.hypot(*edge)
        if length == 0:
            continue
        cross = edge[0] * (pts[:, 1] - p[1]) - edge[1] * (pts[:, 0] - p[0])
        inside &= cross > 10 * VERTEX_TOL * length
    return pts[~inside]


def convex_hull(points: Iterable[Sequence[float]]) -> Polygon2D:
    """Andrew's monotone chain; CCW from the lexicographic minimum.

    Vertices closer than ``VERTEX_TOL`` are merged and vertices within
    ``VERTEX_TOL`` of the line through their neighbours are dropped.
    """
    pts = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, float)
    pts = pts.reshape(-1, 2)
    if len(pts) == 0:
        return EMPTY_POLYGON
    if len(pts) > 64:
        pts = _prefilter(pts)
    # Snap float noise so that equal coordinates sort as equal; otherwise a
    # column of points whose x differ by ulps is visited out of y order.
    pts = np.round(pts, 12) + 0.0
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    flat = pts.tolist()
    uniq = [flat[0]]
    for p in flat[1:]:
        if abs(p[0] - uniq[-1][0]) > VERTEX_TOL or abs(p[1] - uniq[-1][1]) > VERTEX_TOL:
            uniq.append(p)
    if len(uniq) == 1:
        return Polygon2D(np.array(uniq))

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                base = math.hypot(p[0] - o[0], p[1] - o[1])
                if _cross(o, a, p) <= VERTEX_TOL * max(base, 1e-300):
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = chain(uniq)
    upper = chain(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and math.hypot(hull[1][0] - hull[0][0], hull[1][1] - hull[0][1]) <= VERTEX_TOL:
        hull = hull[:1]
    return Polygon2D(np.array(hull))


def hull_union(polys: Iterable) -> Region2D:
    """Convex hull of the union of polygons (or regions)."""
    arrays = [_as_polygon(p).vertices for p in polys]
    arrays = [a for a in arrays if len(a)]
    if not arrays:
        return Region2D(EMPTY_POLYGON)
    return Region2D(convex_hull(np.vstack(arrays)))


def point_distances(poly, pts: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point to a convex polygon (0 inside)."""
    poly = _as_polygon(poly)
    pts = np.asarray(pts, float).reshape(-1, 2)
    v = poly.vertices
    if len(v) == 0:
        return np.full(len(pts), np.inf)
    if len(v) == 1:
        return np.hypot(*(pts - v[0]).T)
    a = v
    b = np.roll(v, -1, axis=0)
    if len(v) == 2:
        a, b = v[:1], v[1:]
    d = b - a  # (m, 2)
    rel = pts[:, None, :] - a[None, :, :]  # (n, m, 2)
    seg_len2 = np.maximum((d * d).sum(axis=1), 1e-300)
    t = np.clip((rel * d[None]).sum(axis=2) / seg_len2, 0.0, 1.0)
    closest = a[None] + t[..., None] * d[None]
    dist = np.hypot(*(pts[:, None, :] - closest).transpose(2, 0, 1)).min(axis=1)
    if len(v) >= 3:
        cross = d[None, :, 0] * rel[..., 1] - d[None, :, 1] * rel[..., 0]
        inside = np.all(cross >= 0, axis=1)
        dist = np.where(inside, 0.0, dist)
    return dist


def contains(outer, inner, tol: float = 0.0) -> bool:
    """True iff every vertex of ``inner`` lies within ``tol`` of ``outer``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    outer, inner = _as_polygon(outer), _as_polygon(inner)
    if inner.is_empty:
        return True
    if outer.is_empty:
        return False
    return bool(np.all(point_distances(outer, inner.vertices) <= tol))


def excess(outer, inner) -> float:
    """Largest distance from a vertex of ``inner`` to ``outer``."""
    outer, inner = _as_polygon(outer), _as_polygon(inner)
    if inner.is_empty:
        return 0.0
    return float(point_distances(outer, inner.vertices).max())


def hausdorff(a, b) -> float:
    """Symmetric Hausdorff distance between two non-empty convex sets."""
    a, b = _as_polygon(a), _as_polygon(b)
    if a.is_empty or b.is_empty:
        raise ValueError("hausdorff distance needs non-empty polygons")
    return max(excess(a, b), excess(b, a))


def facet_slopes(poly) -> list[float]:
    """Slopes of the non-axis edges; ``inf`` marks a vertical edge."""
    poly = _as_polygon(poly)
    if poly.is_degenerate:
        return []
    slopes = []
    for (x1, y1), (x2, y2) in poly.edges():
        on_r2_axis = abs(x1) <= VERTEX_TOL and abs(x2) <= VERTEX_TOL
        on_r1_axis = abs(y1) <= VERTEX_TOL and abs(y2) <= VERTEX_TOL
        if on_r1_axis or on_r2_axis:
            continue
        dx, dy = x2 - x1, y2 - y1
        slopes.append(float("inf") if abs(dx) <= VERTEX_TOL * max(1.0, abs(dy)) else dy / dx)
    return slopes


def slope_allowed(slope: float, allowed=ALLOWED_SLOPES, tol: float = SLOPE_TOL) -> bool:
    if np.isinf(slope):
        return any(np.isinf(s) for s in allowed)
    return any(not np.isinf(s) and abs(slope - s) <= tol for s in allowed)


def slope_violations(poly, allowed=ALLOWED_SLOPES, tol: float = SLOPE_TOL) -> list[float]:
    return [s for s in facet_slopes(poly) if not slope_allowed(s, allowed, tol)]


def axis_intercepts(region) -> tuple[float, float]:
    """Largest R1 and largest R2 attained anywhere in the region."""
    v = _as_polygon(region).vertices
    if len(v) == 0:
        raise ValueError("empty region has no intercepts")
    return float(v[:, 0].max()), float(v[:, 1].max())
