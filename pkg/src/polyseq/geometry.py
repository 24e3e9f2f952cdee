"""Polygon geometry: canonical contours, rasterization, and mask metrics.

Coordinates are normalized fractions of image width/height in [0, 1], with
the origin at the top-left corner and the y axis pointing down.  Under this
convention a vertex loop is clockwise when its shoelace sum
``sum(x_i * y_{i+1} - x_{i+1} * y_i)`` is positive.

All functions here are pure and operate on immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegeneratePolygon, DimensionMismatch, EmptyEvaluation

Vertex = tuple[float, float]


@dataclass(frozen=True)
class Polygon:
    """Closed contour as an ordered tuple of normalized (x, y) vertices."""

    vertices: tuple[Vertex, ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise ValueError(f"polygon needs >= 3 vertices, got {len(verts)}")
        for x, y in verts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("polygon vertex is not finite")
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise ValueError(f"polygon vertex ({x}, {y}) outside [0, 1]")
        object.__setattr__(self, "vertices", verts)

    def perimeter(self) -> float:
        total = 0.0
        n = len(self.vertices)
        for i in range(n):
            x1, y1 = self.vertices[i]
            x2, y2 = self.vertices[(i + 1) % n]
            total += math.hypot(x2 - x1, y2 - y1)
        return total


@dataclass(frozen=True)
class MultiPolygon:
    """Ordered collection of polygons describing one (possibly split) region."""

    polygons: tuple[Polygon, ...]

    def __post_init__(self):
        polys = tuple(self.polygons)
        if not polys:
            raise ValueError("multipolygon needs at least one polygon")
        object.__setattr__(self, "polygons", polys)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box with normalized top-left / bottom-right corners."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        for v in (self.x1, self.y1, self.x2, self.y2):
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"box coordinate {v} outside [0, 1]")
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise ValueError("box corners out of order")

    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)


@dataclass(frozen=True, eq=False)
class Mask:
    """Row-major binary occupancy grid of ``height`` x ``width`` pixels."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("mask dimensions must be >= 1")
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (self.height, self.width):
            raise ValueError(
                f"mask bits shape {bits.shape} != {(self.height, self.width)}"
            )
        object.__setattr__(self, "bits", bits)

    def count(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True)
class MaskMetrics:
    iou: float
    j: float
    f: float


@dataclass(frozen=True)
class SampleMetrics:
    iou: float
    intersection: int
    union: int
    box_iou: float


@dataclass(frozen=True)
class AggregateMetrics:
    miou: float
    oiou: float
    precision_at_half: float


def shoelace_sum(vertices: Sequence[Vertex]) -> float:
    """Shoelace sum of a vertex loop; positive = clockwise in image coords."""
    total = 0.0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total


def canonicalize(p: Polygon) -> Polygon:
    """Return the canonical form of a polygon.

    Canonical means: vertices in clockwise order (image coordinates) and the
    loop rotated so vertex 0 has minimal squared distance to the origin,
    with lexicographic (y, x) tie-break.  Preserves the vertex multiset and
    the cyclic order up to reversal; idempotent.

    Raises DegeneratePolygon for loops with fewer than 3 distinct vertices
    or exactly zero signed area.
    """
    verts = list(p.vertices)
    if len(set(verts)) < 3:
        raise DegeneratePolygon("fewer than 3 distinct vertices")
    area = shoelace_sum(verts)
    if area == 0.0:
        raise DegeneratePolygon("zero signed area")
    if area < 0.0:
        verts.reverse()
    start = min(
        range(len(verts)),
        key=lambda i: (verts[i][0] ** 2 + verts[i][1] ** 2, verts[i][1], verts[i][0]),
    )
    return Polygon(tuple(verts[start:] + verts[:start]))


def canonical_multipolygon(polygons: Iterable[Polygon]) -> MultiPolygon:
    """Canonicalize each polygon and sort by start-vertex distance to origin."""
    canon = [canonicalize(p) for p in polygons]
    canon.sort(key=lambda p: (
        p.vertices[0][0] ** 2 + p.vertices[0][1] ** 2,
        p.vertices[0][1],
        p.vertices[0][0],
    ))
    return MultiPolygon(tuple(canon))


def interpolate_contour(p: Polygon, density: float) -> Polygon:
    """Insert evenly spaced points along every edge of ``p``.

    ``density`` is points per unit of perimeter.  Each edge of length L is
    split into max(1, ceil(L * density)) equal steps, so the original
    vertices are always kept and every new point lies exactly on an edge.
    """
    if density <= 0:
        raise ValueError("density must be positive")
    out: list[Vertex] = []
    n = len(p.vertices)
    for i in range(n):
        x1, y1 = p.vertices[i]
        x2, y2 = p.vertices[(i + 1) % n]
        length = math.hypot(x2 - x1, y2 - y1)
        # small epsilon keeps exact-integer products from rounding up
        steps = max(1, math.ceil(length * density - 1e-9))
        for k in range(steps):
            t = k / steps
            x = min(1.0, max(0.0, x1 + t * (x2 - x1)))
            y = min(1.0, max(0.0, y1 + t * (y2 - y1)))
            out.append((x, y))
    return Polygon(tuple(out))


def augment_downsample(
    dense: Polygon, interval_range: tuple[int, int], rng_seed: int
) -> Polygon:
    """Keep every k-th vertex of a dense contour for a seeded random k.

    The interval k is drawn uniformly from [interval_range[0],
    interval_range[1]] and vertices are kept starting at index 0.  The
    result is re-canonicalized, so different intervals give the same shape
    at different granularities.
    """
    lo, hi = interval_range
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid interval range ({lo}, {hi})")
    if len(dense.vertices) < 3 * hi:
        raise ValueError(
            f"dense contour has {len(dense.vertices)} vertices; "
            f"need at least {3 * hi} for max interval {hi}"
        )
    interval = int(np.random.default_rng(rng_seed).integers(lo, hi + 1))
    kept = dense.vertices[::interval]
    if len(kept) < 3:
        raise DegeneratePolygon("downsampling left fewer than 3 vertices")
    return canonicalize(Polygon(kept))


def _even_odd_inside(
    vertices: Sequence[Vertex], px: np.ndarray, py: np.ndarray
) -> np.ndarray:
    """Even-odd membership for arrays of query points.

    A point exactly on an edge counts as inside.  Crossing parity uses the
    half-open rule y1 <= y < y2 on a ray cast toward +x.
    """
    inside = np.zeros(px.shape, dtype=bool)
    on_edge = np.zeros(px.shape, dtype=bool)
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        lo_x, hi_x = (x1, x2) if x1 <= x2 else (x2, x1)
        lo_y, hi_y = (y1, y2) if y1 <= y2 else (y2, y1)
        cross = (x2 - x1) * (py - y1) - (px - x1) * (y2 - y1)
        on_edge |= (
            (cross == 0.0)
            & (px >= lo_x) & (px <= hi_x)
            & (py >= lo_y) & (py <= hi_y)
        )
        if y1 != y2:
            spans = ((y1 <= py) & (py < y2)) | ((y2 <= py) & (py < y1))
            xi = x1 + (py - y1) / (y2 - y1) * (x2 - x1)
            inside ^= spans & (xi > px)
    return inside | on_edge


def rasterize(mp: MultiPolygon, width: int, height: int) -> Mask:
    """Rasterize a multipolygon onto a pixel grid.

    Pixel (row i, column j) is set iff its center
    ((j + 0.5) / width, (i + 0.5) / height) lies inside any polygon under
    the even-odd rule; centers exactly on an edge count as inside.
    """
    if width < 1 or height < 1:
        raise ValueError("raster dimensions must be >= 1")
    px = (np.arange(width, dtype=np.float64) + 0.5) / width
    py = (np.arange(height, dtype=np.float64) + 0.5) / height
    gx, gy = np.meshgrid(px, py)
    bits = np.zeros((height, width), dtype=bool)
    for poly in mp.polygons:
        bits |= _even_odd_inside(poly.vertices, gx, gy)
    return Mask(width, height, bits)


def _shifted(bits: np.ndarray, dy: int, dx: int) -> np.ndarray:
    out = np.zeros_like(bits)
    h, w = bits.shape
    ys = slice(max(dy, 0), h + min(dy, 0))
    xs = slice(max(dx, 0), w + min(dx, 0))
    ys_src = slice(max(-dy, 0), h + min(-dy, 0))
    xs_src = slice(max(-dx, 0), w + min(-dx, 0))
    out[ys, xs] = bits[ys_src, xs_src]
    return out


def _boundary(bits: np.ndarray) -> np.ndarray:
    # set-difference between the mask and its 4-connected erosion; pixels
    # touching the image border count as boundary
    eroded = (
        bits
        & _shifted(bits, 1, 0)
        & _shifted(bits, -1, 0)
        & _shifted(bits, 0, 1)
        & _shifted(bits, 0, -1)
    )
    return bits & ~eroded


def _dilate8(bits: np.ndarray) -> np.ndarray:
    out = bits.copy()
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy or dx:
                out |= _shifted(bits, dy, dx)
    return out


def _boundary_f(pred: np.ndarray, gt: np.ndarray) -> float:
    pb = _boundary(pred)
    gb = _boundary(gt)
    n_pb = int(pb.sum())
    n_gb = int(gb.sum())
    if n_pb == 0 and n_gb == 0:
        return 1.0
    if n_pb == 0 or n_gb == 0:
        return 0.0
    precision = int((pb & _dilate8(gb)).sum()) / n_pb
    recall = int((gb & _dilate8(pb)).sum()) / n_gb
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def mask_metrics(pred: Mask, gt: Mask) -> MaskMetrics:
    """Region IoU (= J) and boundary F with a 1-pixel dilation tolerance.

    An empty-vs-empty comparison scores 1.0 (perfect agreement).
    """
    if (pred.width, pred.height) != (gt.width, gt.height):
        raise DimensionMismatch(
            f"mask {pred.width}x{pred.height} vs {gt.width}x{gt.height}"
        )
    intersection = int((pred.bits & gt.bits).sum())
    union = int((pred.bits | gt.bits).sum())
    iou = 1.0 if union == 0 else intersection / union
    return MaskMetrics(iou=iou, j=iou, f=_boundary_f(pred.bits, gt.bits))


def aggregate_metrics(per_sample: Sequence[SampleMetrics]) -> AggregateMetrics:
    """Dataset-level mIoU, oIoU and box precision at the 0.5 threshold."""
    if not per_sample:
        raise EmptyEvaluation("no samples to aggregate")
    miou = sum(s.iou for s in per_sample) / len(per_sample)
    total_union = sum(s.union for s in per_sample)
    total_inter = sum(s.intersection for s in per_sample)
    oiou = 1.0 if total_union == 0 else total_inter / total_union
    hits = sum(1 for s in per_sample if s.box_iou > 0.5)
    return AggregateMetrics(
        miou=miou, oiou=oiou, precision_at_half=hits / len(per_sample)
    )


def box_iou(a: Box, b: Box) -> float:
    """IoU of two axis-aligned boxes; 0 when disjoint."""
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    inter = max(0.0, iw) * max(0.0, ih)
    union = a.area() + b.area() - inter
    if union <= 0.0:
        return 1.0 if a == b else 0.0
    return inter / union


def bounding_box(mp: MultiPolygon) -> Box:
    """Tight axis-aligned bounds of all vertices in a multipolygon."""
    xs = [x for p in mp.polygons for x, _ in p.vertices]
    ys = [y for p in mp.polygons for _, y in p.vertices]
    return Box(min(xs), min(ys), max(xs), max(ys))
