"""Shared test utilities: random shape generators and brute-force oracles."""

from __future__ import annotations

import numpy as np

from polyseq.geometry import Box, MultiPolygon, Polygon, canonical_multipolygon


def star_polygon(rng: np.random.Generator, n_min: int = 3, n_max: int = 12) -> Polygon:
    """Random simple (star-shaped) polygon that never needs clamping."""
    n = int(rng.integers(n_min, n_max + 1))
    cx, cy = rng.uniform(0.3, 0.7, size=2)
    angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=n))
    # keep a minimum angular gap so vertices stay distinct
    while np.min(np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))) < 0.05:
        angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=n))
    radii = rng.uniform(0.08, 0.28, size=n)
    verts = [
        (float(cx + r * np.cos(a)), float(cy + r * np.sin(a)))
        for a, r in zip(angles, radii)
    ]
    return Polygon(tuple(verts))


def random_multipolygon(rng: np.random.Generator, max_polys: int = 3) -> MultiPolygon:
    k = int(rng.integers(1, max_polys + 1))
    return canonical_multipolygon(star_polygon(rng) for _ in range(k))


def random_box(rng: np.random.Generator) -> Box:
    x = np.sort(rng.uniform(0.0, 1.0, size=2))
    y = np.sort(rng.uniform(0.0, 1.0, size=2))
    return Box(float(x[0]), float(y[0]), float(x[1]), float(y[1]))


def point_in_polygon_oracle(vertices, x: float, y: float) -> bool:
    """Scalar even-odd membership test; points exactly on an edge are inside.

    Independent reference for the vectorized rasterizer: plain Python floats,
    one pixel at a time.
    """
    inside = False
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        cross = (x2 - x1) * (y - y1) - (x - x1) * (y2 - y1)
        if (
            cross == 0.0
            and min(x1, x2) <= x <= max(x1, x2)
            and min(y1, y2) <= y <= max(y1, y2)
        ):
            return True
        if y1 != y2 and ((y1 <= y < y2) or (y2 <= y < y1)):
            xi = x1 + (y - y1) / (y2 - y1) * (x2 - x1)
            if xi > x:
                inside = not inside
    return inside


def rasterize_oracle(mp: MultiPolygon, width: int, height: int) -> np.ndarray:
    """Brute-force per-pixel rasterization oracle."""
    bits = np.zeros((height, width), dtype=bool)
    for i in range(height):
        cy = (i + 0.5) / height
        for j in range(width):
            cx = (j + 0.5) / width
            bits[i, j] = any(
                point_in_polygon_oracle(p.vertices, cx, cy) for p in mp.polygons
            )
    return bits


def point_segment_distance(p, a, b) -> float:
    """Euclidean distance from point p to segment ab."""
    px, py = p
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0.0:
        return float(np.hypot(px - ax, py - ay))
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / seg2))
    return float(np.hypot(px - (ax + t * dx), py - (ay + t * dy)))
