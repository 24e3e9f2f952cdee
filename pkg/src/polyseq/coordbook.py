"""2D coordinate codebook: bilinear embedding lookup and quantization.

A normalized coordinate (x, y) maps to the continuous bin position
u = x * (b_w - 1), v = y * (b_h - 1), so 0 and 1 land exactly on the first
and last bins.  The embedding of (x, y) is the bilinear combination of the
four surrounding grid entries; at exact grid points it equals the indexed
entry bit-for-bit.

The quantization path (used by the classification-style decoder) rounds to
the nearest bin on the same grid, with round-half-up ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange

COORD_TOLERANCE = 1e-9


@dataclass(frozen=True)
class BinIndex:
    ix: int
    iy: int


@dataclass(frozen=True, eq=False)
class Codebook2D:
    """Learnable grid of coordinate embeddings, shape (b_h, b_w, c_e)."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 3:
            raise ValueError(f"codebook entries must be 3D, got {entries.ndim}D")
        if entries.shape[0] < 2 or entries.shape[1] < 2:
            raise ValueError("codebook needs at least 2 bins per axis")
        if not np.all(np.isfinite(entries)):
            raise ValueError("codebook entries must be finite")
        object.__setattr__(self, "entries", entries)

    @property
    def b_h(self) -> int:
        return self.entries.shape[0]

    @property
    def b_w(self) -> int:
        return self.entries.shape[1]

    @property
    def c_e(self) -> int:
        return self.entries.shape[2]

    @classmethod
    def initialize(cls, b_h: int, b_w: int, c_e: int, seed: int = 0) -> "Codebook2D":
        rng = np.random.default_rng(seed)
        return cls(rng.uniform(-0.02, 0.02, size=(b_h, b_w, c_e)))


@dataclass(frozen=True)
class EmbedGradients:
    """Gradients of <embed(x, y), upstream>: sparse entry grads plus dx, dy."""

    corner_grads: dict[tuple[int, int], np.ndarray]
    dx: float
    dy: float


def _check_coord(value: float, name: str) -> float:
    if not (-COORD_TOLERANCE <= value <= 1.0 + COORD_TOLERANCE):
        raise OutOfRange(f"{name}={value} outside [0, 1]")
    return min(1.0, max(0.0, value))


def _axis_cell(value: float, bins: int) -> tuple[int, int, float, float]:
    """Map a coordinate to (floor index, ceil index, floor weight, ceil weight).

    The floor index is clamped to bins - 2 so the ceil index stays in range;
    at integer bin positions the ceil weight is exactly 0 (or exactly 1 at
    the top edge), which keeps grid points exact.
    """
    u = value * (bins - 1)
    i0 = min(int(math.floor(u)), bins - 2)
    w1 = u - i0
    return i0, i0 + 1, 1.0 - w1, w1


def corner_weights(
    x: float, y: float, b_w: int, b_h: int
) -> list[tuple[int, int, float]]:
    """The four (iy, ix, weight) bilinear contributions for (x, y)."""
    x = _check_coord(x, "x")
    y = _check_coord(y, "y")
    ix0, ix1, wx0, wx1 = _axis_cell(x, b_w)
    iy0, iy1, wy0, wy1 = _axis_cell(y, b_h)
    return [
        (iy0, ix0, wx0 * wy0),
        (iy0, ix1, wx1 * wy0),
        (iy1, ix0, wx0 * wy1),
        (iy1, ix1, wx1 * wy1),
    ]


def embed(cb: Codebook2D, x: float, y: float) -> np.ndarray:
    """Bilinearly interpolated embedding of a continuous coordinate."""
    out = np.zeros(cb.c_e, dtype=cb.entries.dtype)
    for iy, ix, w in corner_weights(x, y, cb.b_w, cb.b_h):
        out += w * cb.entries[iy, ix]
    return out


def embed_backward(
    cb: Codebook2D, x: float, y: float, upstream: np.ndarray
) -> EmbedGradients:
    """Gradients of <embed(x, y), upstream> w.r.t. entries and (x, y)."""
    x = _check_coord(x, "x")
    y = _check_coord(y, "y")
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != (cb.c_e,):
        raise ValueError(f"upstream shape {upstream.shape} != ({cb.c_e},)")
    ix0, ix1, wx0, wx1 = _axis_cell(x, cb.b_w)
    iy0, iy1, wy0, wy1 = _axis_cell(y, cb.b_h)

    corner_grads: dict[tuple[int, int], np.ndarray] = {}
    for iy, ix, w in (
        (iy0, ix0, wx0 * wy0),
        (iy0, ix1, wx1 * wy0),
        (iy1, ix0, wx0 * wy1),
        (iy1, ix1, wx1 * wy1),
    ):
        if (iy, ix) in corner_grads:
            corner_grads[(iy, ix)] = corner_grads[(iy, ix)] + w * upstream
        else:
            corner_grads[(iy, ix)] = w * upstream

    e = cb.entries
    d_du = wy0 * (e[iy0, ix1] - e[iy0, ix0]) + wy1 * (e[iy1, ix1] - e[iy1, ix0])
    d_dv = wx0 * (e[iy1, ix0] - e[iy0, ix0]) + wx1 * (e[iy1, ix1] - e[iy0, ix1])
    dx = float(np.dot(d_du, upstream)) * (cb.b_w - 1)
    dy = float(np.dot(d_dv, upstream)) * (cb.b_h - 1)
    return EmbedGradients(corner_grads=corner_grads, dx=dx, dy=dy)


def quantize(x: float, y: float, b_w: int, b_h: int) -> BinIndex:
    """Nearest-bin index on the (bins - 1)-spaced grid, round-half-up."""
    x = _check_coord(x, "x")
    y = _check_coord(y, "y")
    ix = min(int(math.floor(x * (b_w - 1) + 0.5)), b_w - 1)
    iy = min(int(math.floor(y * (b_h - 1) + 0.5)), b_h - 1)
    return BinIndex(ix=ix, iy=iy)


def dequantize(bi: BinIndex, b_w: int, b_h: int) -> tuple[float, float]:
    """Grid-point coordinate of a bin index."""
    if not (0 <= bi.ix < b_w and 0 <= bi.iy < b_h):
        raise OutOfRange(f"bin index ({bi.ix}, {bi.iy}) outside grid {b_w}x{b_h}")
    return bi.ix / (b_w - 1), bi.iy / (b_h - 1)
