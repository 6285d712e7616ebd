"""Rasterizers for the shapes the toolkit studies, plus grid-set utilities.

Curved shapes become grid sets through declared, reproducible conventions:
balls get two-sided inner/outer rasterizations from per-cell corner
distances, polygons are filled by the even-odd rule applied to cell centers.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .cubes import DyadicCube, GridFunction, GridSet, encode_coords
from .errors import ConfigError, GeometryError


def rasterize_ball(center: Sequence[float], radius: float, root: DyadicCube,
                   finest_level: int, mode: str = "outer") -> GridSet:
    """Cells inside (mode='inner') or meeting (mode='outer') the ball B(center, radius).

    Inner cells have every closure corner strictly inside the open ball;
    outer cells have closure distance <= radius from the center.  The inner
    set is always contained in the outer set.  Cells are drawn from the root
    lattice only, so a ball poking past the root is clipped; callers that
    need full containment (averages, maximal operators) enforce it at their
    level.
    """
    if mode not in ("inner", "outer"):
        raise ConfigError(f"mode must be 'inner' or 'outer', got {mode!r}")
    if radius <= 0:
        raise ConfigError("radius must be positive")
    if len(center) != root.n:
        raise ConfigError(f"center has dimension {len(center)}, root has {root.n}")

    probe = GridSet.empty(root, finest_level)
    extent, side = probe.extent, probe.cell_side

    # Per-axis index window that can possibly touch the ball.
    windows = []
    for x, lo in zip(center, root.lower()):
        i0 = max(0, int(math.floor((x - radius - lo) / side)) - 1)
        i1 = min(extent - 1, int(math.floor((x + radius - lo) / side)) + 1)
        windows.append((i0, i1))

    axis_near = []
    axis_far = []
    for (i0, i1), x, lo in zip(windows, center, root.lower()):
        idx = np.arange(i0, i1 + 1)
        cell_lo = lo + idx * side
        cell_hi = cell_lo + side
        axis_near.append(np.maximum.reduce([cell_lo - x, x - cell_hi, np.zeros(idx.size)]) ** 2)
        axis_far.append(np.maximum(np.abs(cell_lo - x), np.abs(cell_hi - x)) ** 2)

    dists = axis_far if mode == "inner" else axis_near
    n = root.n
    total = dists[0].reshape((-1,) + (1,) * (n - 1)).copy()
    for axis in range(1, n):
        shape = (1,) * axis + (-1,) + (1,) * (n - 1 - axis)
        total = total + dists[axis].reshape(shape)
    hit = total < radius ** 2 if mode == "inner" else total <= radius ** 2

    local = np.argwhere(hit)
    for axis, (i0, _) in enumerate(windows):
        local[:, axis] += i0
    return GridSet(root, finest_level, encode_coords(local, extent))


# ---------------------------------------------------------------------------
# Generalized Koch snowflake
# ---------------------------------------------------------------------------

def koch_dimension(s: float) -> float:
    """Similarity dimension of the four-piece segment replacement with ratio s."""
    if not 0.25 < s < 0.5:
        raise ConfigError(f"ratio must lie in (1/4, 1/2), got {s}")
    return math.log(4.0) / math.log(1.0 / s)


def koch_polygon(s: float, depth: int, center: Sequence[float], side: float) -> np.ndarray:
    """Closed snowflake polygon: an equilateral triangle whose edges are
    refined `depth` times by the four-segment replacement of ratio s.

    Each segment of length L is replaced by four of length s*L: the two end
    pieces stay on the segment, the middle two form an outward isosceles tent
    over the remaining gap of length (1-2s)*L, with apex height
    sqrt((s*L)^2 - ((1-2s)*L/2)^2).  Vertices are returned counterclockwise,
    without repeating the first point.
    """
    if not 0.25 < s < 0.5:
        raise ConfigError(f"ratio must lie in (1/4, 1/2), got {s}")
    if depth < 0:
        raise ConfigError("depth must be >= 0")
    cx, cy = float(center[0]), float(center[1])
    r = side / math.sqrt(3.0)  # circumradius
    pts = np.array([
        [cx + r * math.cos(math.pi / 2 + 2 * math.pi * k / 3),
         cy + r * math.sin(math.pi / 2 + 2 * math.pi * k / 3)]
        for k in range(3)
    ])
    # tent height as a fraction of the segment length
    h = math.sqrt(s * s - ((1.0 - 2.0 * s) / 2.0) ** 2)
    for _ in range(depth):
        a = pts
        b = np.roll(pts, -1, axis=0)
        d = b - a
        # outward = right-hand normal of a counterclockwise boundary
        normal = np.column_stack([d[:, 1], -d[:, 0]])
        p = a + s * d
        q = b - s * d
        apex = 0.5 * (p + q) + h * normal
        pts = np.concatenate([a[:, None, :], p[:, None, :], apex[:, None, :], q[:, None, :]],
                             axis=1).reshape(-1, 2)
    return pts


def polygon_area(vertices: np.ndarray) -> float:
    """Shoelace area of a closed polygon given without the repeated endpoint."""
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def fill_polygon(vertices: np.ndarray, root: DyadicCube, finest_level: int) -> GridSet:
    """Cells whose center is inside the polygon by the even-odd rule.

    Scanline implementation: for every lattice row, edge crossings at the
    row's center ordinate are collected and sorted; a center is inside when
    the number of crossings to its left is odd.
    """
    if root.n != 2:
        raise ConfigError("polygon fill is two-dimensional")
    lo = root.lower()
    hi = root.upper()
    if (vertices[:, 0].min() < lo[0] or vertices[:, 0].max() > hi[0]
            or vertices[:, 1].min() < lo[1] or vertices[:, 1].max() > hi[1]):
        raise GeometryError("polygon exceeds root")

    probe = GridSet.empty(root, finest_level)
    extent, side = probe.extent, probe.cell_side

    crossings: dict[int, list[float]] = {}
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    for (x1, y1), (x2, y2) in zip(a, b):
        if y1 == y2:
            continue
        ylo, yhi = min(y1, y2), max(y1, y2)
        j0 = max(0, int(math.floor((ylo - lo[1]) / side - 0.5)))
        j1 = min(extent - 1, int(math.ceil((yhi - lo[1]) / side)))
        for j in range(j0, j1 + 1):
            yc = lo[1] + (j + 0.5) * side
            if (y1 <= yc) != (y2 <= yc):
                crossings.setdefault(j, []).append(x1 + (yc - y1) * (x2 - x1) / (y2 - y1))

    xs_centers = lo[0] + (np.arange(extent) + 0.5) * side
    key_chunks = []
    for j, xs in crossings.items():
        cross = np.sort(np.asarray(xs))
        inside = np.searchsorted(cross, xs_centers, side="left") % 2 == 1
        ix = np.flatnonzero(inside)
        if ix.size:
            key_chunks.append(ix.astype(np.int64) * extent + j)
    if not key_chunks:
        return probe
    return GridSet(root, finest_level, np.concatenate(key_chunks))


def koch_region(s: float, depth: int, root: DyadicCube, finest_level: int,
                center: Sequence[float] | None = None,
                side: float | None = None) -> GridSet:
    """Rasterized open region bounded by the depth-`depth` snowflake polygon."""
    if root.n != 2:
        raise ConfigError("the snowflake region is two-dimensional")
    if center is None:
        center = tuple(lo + root.side / 2 for lo in root.lower())
    if side is None:
        side = 0.35 * root.side
    return fill_polygon(koch_polygon(s, depth, center, side), root, finest_level)


# ---------------------------------------------------------------------------
# Discrete boundary and builtin functions
# ---------------------------------------------------------------------------

def boundary_cells(E: GridSet) -> GridSet:
    """Two-layer discrete boundary: cells of E with a face neighbor outside E,
    together with cells outside E with a face neighbor in E.

    Only neighbors inside the root lattice count, so the full root has an
    empty boundary.
    """
    m = E.mask
    inner = np.zeros_like(m)
    outer = np.zeros_like(m)
    for axis in range(E.n):
        for direction in (1, -1):
            src = [slice(None)] * E.n
            dst = [slice(None)] * E.n
            if direction == 1:
                src[axis] = slice(1, None)
                dst[axis] = slice(None, -1)
            else:
                src[axis] = slice(None, -1)
                dst[axis] = slice(1, None)
            src_t, dst_t = tuple(src), tuple(dst)
            # neighbor exists and is outside E -> inner boundary
            inner[dst_t] |= m[dst_t] & ~m[src_t]
            # neighbor exists and is inside E -> outer boundary
            outer[dst_t] |= ~m[dst_t] & m[src_t]
    return GridSet.from_mask(E.root, E.finest_level, inner | outer)


def staircase_function(root: DyadicCube, finest_level: int, steps: int = 4,
                       height: float = 1.0) -> GridFunction:
    """Nested dyadic corner boxes stacked into a staircase toward the root corner."""
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    extent = 1 << (root.level - finest_level)
    idx = np.arange(extent)
    values = np.zeros((extent,) * root.n)
    for j in range(1, steps + 1):
        cut = max(1, extent >> j)
        axis_masks = [(idx < cut)] * root.n
        box = axis_masks[0].reshape((-1,) + (1,) * (root.n - 1)).copy()
        for axis in range(1, root.n):
            shape = (1,) * axis + (-1,) + (1,) * (root.n - 1 - axis)
            box = box & axis_masks[axis].reshape(shape)
        values += (height / steps) * box
    return GridFunction(root, finest_level, values)


def random_function(root: DyadicCube, finest_level: int, seed: int,
                    levels: int = 16, vmax: float = 1.0) -> GridFunction:
    """Seeded random function with values quantized to multiples of vmax/levels."""
    extent = 1 << (root.level - finest_level)
    rng = np.random.default_rng(seed)
    steps = rng.integers(0, levels + 1, size=(extent,) * root.n)
    return GridFunction(root, finest_level, steps * (vmax / levels))


def random_set(root: DyadicCube, finest_level: int, seed: int, fill: float = 0.5) -> GridSet:
    """Seeded random cell set with expected density `fill`."""
    if not 0.0 <= fill <= 1.0:
        raise ConfigError("fill must lie in [0, 1]")
    extent = 1 << (root.level - finest_level)
    rng = np.random.default_rng(seed)
    return GridSet.from_mask(root, finest_level, rng.random((extent,) * root.n) < fill)
