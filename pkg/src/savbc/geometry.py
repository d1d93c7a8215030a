"""Planar convex-polygon helpers for rate regions.

Polygons are (k, 2) arrays of vertices in counter-clockwise order. Degenerate
polygons (a point or a segment) are allowed and handled throughout.
"""

from __future__ import annotations

import numpy as np

def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Andrew's monotone chain. Drops collinear and duplicate points.

    The chain uses the exact orientation sign so that extreme points of
    nearly collinear sets survive; afterwards vertices lying within a
    relative 1e-12 of the segment joining their neighbours are removed in
    one greedy pass.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("convex hull of an empty point set")
    pts = np.unique(pts, axis=0)  # lexicographic sort by (x, y)
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0.0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:
        return pts[[0, -1]]
    eps = 1e-12 * max(1.0, float(np.abs(pts).max()))
    kept = [hull[0]]
    for i in range(1, len(hull)):
        if _seg_dist(hull[i], kept[-1], hull[(i + 1) % len(hull)]) > eps:
            kept.append(hull[i])
    if len(kept) > 2 and _seg_dist(kept[0], kept[-1], kept[1]) <= eps:
        kept = kept[1:]
    hull = kept
    if len(hull) == 2 and np.hypot(*(hull[0] - hull[1])) <= eps:
        hull = hull[:1]
    return np.array(hull)


def _seg_dist(p, a, b) -> float:
    ab = b - a
    L = float(ab @ ab)
    if L == 0.0:
        return float(np.hypot(*(p - a)))
    t = min(1.0, max(0.0, float((p - a) @ ab) / L))
    return float(np.hypot(*(p - a - t * ab)))


def _edges(poly: np.ndarray):
    a = poly
    b = np.roll(poly, -1, axis=0)
    return a, b


def _seg_dists(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    L = (ab * ab).sum(axis=1)
    t = np.where(L > 0, ((p - a) * ab).sum(axis=1) / np.where(L > 0, L, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    d = p - a - t[:, None] * ab
    return np.hypot(d[:, 0], d[:, 1])


def _orient(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (b[:, 0] - a[:, 0]) * (p[1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (p[0] - a[:, 0])


def point_distance(poly: np.ndarray, pt) -> float:
    """Euclidean distance from ``pt`` to the (filled) convex polygon."""
    p = np.asarray(pt, dtype=float)
    k = len(poly)
    if k == 1:
        return float(np.hypot(*(p - poly[0])))
    if k == 2:
        return _seg_dist(p, poly[0], poly[1])
    a, b = _edges(poly)
    if np.all(_orient(p, a, b) >= 0):
        return 0.0
    return float(_seg_dists(p, a, b).min())


def contains(poly: np.ndarray, pt, slack: float = 0.0) -> bool:
    """Point-in-convex-polygon with additive slack on every supporting halfplane."""
    p = np.asarray(pt, dtype=float)
    if len(poly) <= 2:
        return point_distance(poly, p) <= slack
    a, b = _edges(poly)
    edge = np.hypot(*(b - a).T)
    ok = edge > 0
    return bool(np.all(_orient(p, a[ok], b[ok]) / edge[ok] >= -slack))


def polygon_contains(outer: np.ndarray, inner: np.ndarray, slack: float = 0.0) -> bool:
    return all(contains(outer, v, slack) for v in inner)


def directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    # distance to a convex set is convex, so the sup over ``a`` sits at a vertex
    return max(point_distance(b, v) for v in a)


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
