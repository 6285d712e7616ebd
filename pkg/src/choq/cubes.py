"""Dyadic cubes and the finite grids built from their finest-level cells.

Geometry here is exact: a cube is identified by an integer level k and
integer coordinates m, covering prod_i [m_i * 2^k, (m_i + 1) * 2^k).  Grid
sets and grid functions live on the lattice of finest-level cells inside a
single root cube, so covers, partitions and set algebra never depend on
floating-point geometry predicates.

Cells are addressed by row-major flat indices over the finest lattice: for
local coordinates (i_1, ..., i_n) with per-axis extent m, the flat index is
((i_1 * m + i_2) * m + ...) + i_n.  All objects are immutable after
construction; every operation returns a new value.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, GeometryError

MAX_DIMENSION = 3


@dataclass(frozen=True)
class DyadicCube:
    """Half-open cube prod_i [m_i * 2^k, (m_i + 1) * 2^k) with integer m_i."""

    level: int
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not 1 <= len(coords) <= MAX_DIMENSION:
            raise ConfigError(f"dimension must be in 1..{MAX_DIMENSION}, got {len(coords)}")
        object.__setattr__(self, "level", int(self.level))
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def side(self) -> float:
        return 2.0 ** self.level

    def lower(self) -> tuple[float, ...]:
        return tuple(c * self.side for c in self.coords)

    def upper(self) -> tuple[float, ...]:
        return tuple((c + 1) * self.side for c in self.coords)

    def children(self) -> list[DyadicCube]:
        """The 2^n cubes one level down that partition this cube."""
        return [
            DyadicCube(self.level - 1, tuple(2 * c + o for c, o in zip(self.coords, off)))
            for off in itertools.product((0, 1), repeat=self.n)
        ]

    def parent(self) -> DyadicCube:
        # Python's >> floor-divides, so negative coordinates are handled too.
        return DyadicCube(self.level + 1, tuple(c >> 1 for c in self.coords))

    def contains_cube(self, other: DyadicCube) -> bool:
        if other.n != self.n or other.level > self.level:
            return False
        shift = self.level - other.level
        return all((c >> shift) == s for c, s in zip(other.coords, self.coords))

    def contains_point(self, point: Sequence[float]) -> bool:
        lo, hi = self.lower(), self.upper()
        return all(a <= x < b for x, a, b in zip(point, lo, hi))


def _as_keys(keys) -> np.ndarray:
    arr = np.asarray(keys, dtype=np.int64).ravel()
    arr = np.unique(arr)
    arr.setflags(write=False)
    return arr


def decode_keys(keys: np.ndarray, extent: int, n: int) -> np.ndarray:
    """Flat row-major indices -> local coordinates, shape (k, n)."""
    out = np.empty((len(keys), n), dtype=np.int64)
    rem = np.asarray(keys, dtype=np.int64)
    for axis in range(n - 1, -1, -1):
        out[:, axis] = rem % extent
        rem = rem // extent
    return out


def encode_coords(coords: np.ndarray, extent: int) -> np.ndarray:
    """Local coordinates, shape (k, n) -> flat row-major indices."""
    keys = coords[:, 0].astype(np.int64, copy=True)
    for axis in range(1, coords.shape[1]):
        keys *= extent
        keys += coords[:, axis]
    return keys


class GridSet:
    """A finite union of finest-level cells inside a root cube.

    Stored as a sorted array of flat cell indices; the represented point set
    is the disjoint union of the half-open cells.
    """

    __slots__ = ("root", "finest_level", "keys", "_mask")

    def __init__(self, root: DyadicCube, finest_level: int, keys):
        finest_level = int(finest_level)
        if finest_level >= root.level:
            raise ConfigError("finest_level must be strictly below the root level")
        self.root = root
        self.finest_level = finest_level
        keys = _as_keys(keys)
        total = self.extent ** root.n
        if keys.size and (keys[0] < 0 or keys[-1] >= total):
            raise ConfigError(f"cell index out of range 0..{total - 1}")
        self.keys = keys
        self._mask = None

    # -- construction -----------------------------------------------------

    @classmethod
    def empty(cls, root: DyadicCube, finest_level: int) -> GridSet:
        return cls(root, finest_level, np.empty(0, dtype=np.int64))

    @classmethod
    def full(cls, root: DyadicCube, finest_level: int) -> GridSet:
        probe = cls.empty(root, finest_level)
        return cls(root, finest_level, np.arange(probe.extent ** root.n, dtype=np.int64))

    @classmethod
    def from_mask(cls, root: DyadicCube, finest_level: int, mask) -> GridSet:
        mask = np.asarray(mask, dtype=bool)
        return cls(root, finest_level, np.flatnonzero(mask.ravel(order="C")))

    @classmethod
    def from_cells(cls, root: DyadicCube, finest_level: int,
                   cells: Iterable[Sequence[int]]) -> GridSet:
        cells = list(cells)
        probe = cls.empty(root, finest_level)
        if not cells:
            return probe
        coords = np.asarray(cells, dtype=np.int64).reshape(len(cells), root.n)
        if coords.min() < 0 or coords.max() >= probe.extent:
            raise ConfigError("cell coordinate outside the root lattice")
        return cls(root, finest_level, encode_coords(coords, probe.extent))

    @classmethod
    def from_points(cls, root: DyadicCube, finest_level: int,
                    points: Iterable[Sequence[float]]) -> GridSet:
        """Mark the cell containing each point."""
        probe = cls.empty(root, finest_level)
        cells = [cell_of_point(root, finest_level, p) for p in points]
        return cls.from_cells(root, finest_level, cells) if cells else probe

    # -- basic queries -----------------------------------------------------

    @property
    def n(self) -> int:
        return self.root.n

    @property
    def extent(self) -> int:
        """Cells per axis at the finest level."""
        return 1 << (self.root.level - self.finest_level)

    @property
    def cell_side(self) -> float:
        return 2.0 ** self.finest_level

    @property
    def cell_count(self) -> int:
        return int(self.keys.size)

    @property
    def is_empty(self) -> bool:
        return self.keys.size == 0

    def measure(self) -> float:
        """Total n-dimensional volume of the cells."""
        return self.cell_count * self.cell_side ** self.n

    @property
    def mask(self) -> np.ndarray:
        """Dense boolean view over the finest lattice (cached, read-only)."""
        if self._mask is None:
            m = np.zeros(self.extent ** self.n, dtype=bool)
            m[self.keys] = True
            m = m.reshape((self.extent,) * self.n)
            m.setflags(write=False)
            self._mask = m
        return self._mask

    def local_coords(self) -> np.ndarray:
        return decode_keys(self.keys, self.extent, self.n)

    def iter_cells(self) -> Iterator[tuple[int, ...]]:
        for row in self.local_coords():
            yield tuple(int(v) for v in row)

    def contains_cell(self, cell: Sequence[int]) -> bool:
        key = encode_coords(np.asarray([cell], dtype=np.int64), self.extent)[0]
        pos = np.searchsorted(self.keys, key)
        return pos < self.keys.size and self.keys[pos] == key

    def cell_cube(self, cell: Sequence[int]) -> DyadicCube:
        """The finest-level cube of a local cell, in absolute coordinates."""
        return DyadicCube(
            self.finest_level,
            tuple(r * self.extent + int(c) for r, c in zip(self.root.coords, cell)),
        )

    # -- set algebra ---------------------------------------------------------

    def _check_compatible(self, other: GridSet) -> None:
        if self.root != other.root or self.finest_level != other.finest_level:
            raise ConfigError("grid sets live on different lattices")

    def union(self, other: GridSet) -> GridSet:
        self._check_compatible(other)
        return GridSet(self.root, self.finest_level, np.union1d(self.keys, other.keys))

    def intersection(self, other: GridSet) -> GridSet:
        self._check_compatible(other)
        return GridSet(self.root, self.finest_level,
                       np.intersect1d(self.keys, other.keys, assume_unique=True))

    def difference(self, other: GridSet) -> GridSet:
        self._check_compatible(other)
        return GridSet(self.root, self.finest_level,
                       np.setdiff1d(self.keys, other.keys, assume_unique=True))

    def complement(self) -> GridSet:
        """Complement within the root."""
        total = self.extent ** self.n
        out = np.setdiff1d(np.arange(total, dtype=np.int64), self.keys, assume_unique=True)
        return GridSet(self.root, self.finest_level, out)

    def subset_of(self, other: GridSet) -> bool:
        self._check_compatible(other)
        return np.intersect1d(self.keys, other.keys, assume_unique=True).size == self.keys.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridSet):
            return NotImplemented
        return (self.root == other.root and self.finest_level == other.finest_level
                and np.array_equal(self.keys, other.keys))

    def __hash__(self):
        return hash((self.root, self.finest_level, self.keys.tobytes()))

    def __repr__(self):
        return (f"GridSet(n={self.n}, root={self.root.level}/{self.root.coords}, "
                f"finest={self.finest_level}, cells={self.cell_count})")


class GridFunction:
    """A finite value on every finest-level cell of a root cube.

    The modeled function is piecewise constant on half-open cells and zero is
    the implicit background.  Values may be signed (differences of functions
    arise in norm and oscillation computations); operations that require
    non-negativity validate it themselves.
    """

    __slots__ = ("root", "finest_level", "values")

    def __init__(self, root: DyadicCube, finest_level: int, values):
        finest_level = int(finest_level)
        if finest_level >= root.level:
            raise ConfigError("finest_level must be strictly below the root level")
        extent = 1 << (root.level - finest_level)
        values = np.array(values, dtype=np.float64)
        if values.shape != (extent,) * root.n:
            raise ConfigError(f"values must have shape {(extent,) * root.n}, got {values.shape}")
        if not np.isfinite(values).all():
            raise ConfigError("values must be finite")
        values.setflags(write=False)
        self.root = root
        self.finest_level = finest_level
        self.values = values

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, root: DyadicCube, finest_level: int) -> GridFunction:
        extent = 1 << (root.level - finest_level)
        return cls(root, finest_level, np.zeros((extent,) * root.n))

    @classmethod
    def constant(cls, root: DyadicCube, finest_level: int, value: float) -> GridFunction:
        extent = 1 << (root.level - finest_level)
        return cls(root, finest_level, np.full((extent,) * root.n, float(value)))

    @classmethod
    def indicator(cls, region: GridSet) -> GridFunction:
        vals = np.zeros(region.extent ** region.n)
        vals[region.keys] = 1.0
        return cls(region.root, region.finest_level, vals.reshape((region.extent,) * region.n))

    # -- queries -----------------------------------------------------------

    @property
    def n(self) -> int:
        return self.root.n

    @property
    def extent(self) -> int:
        return 1 << (self.root.level - self.finest_level)

    @property
    def cell_side(self) -> float:
        return 2.0 ** self.finest_level

    def domain(self) -> GridSet:
        return GridSet.full(self.root, self.finest_level)

    def support(self) -> GridSet:
        return GridSet(self.root, self.finest_level, np.flatnonzero(self.values.ravel() != 0.0))

    def value_at(self, point: Sequence[float]) -> float:
        return float(self.values[cell_of_point(self.root, self.finest_level, point)])

    def values_on(self, region: GridSet) -> np.ndarray:
        """Cell values over region.keys, in key order."""
        if self.root != region.root or self.finest_level != region.finest_level:
            raise ConfigError("function and region live on different lattices")
        return self.values.ravel()[region.keys]

    def min_value(self) -> float:
        return float(self.values.min())

    def max_value(self) -> float:
        return float(self.values.max())

    # -- algebra -----------------------------------------------------------

    def _wrap(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.root, self.finest_level, values)

    def _check_compatible(self, other: GridFunction) -> None:
        if self.root != other.root or self.finest_level != other.finest_level:
            raise ConfigError("grid functions live on different lattices")

    def __add__(self, other: GridFunction) -> GridFunction:
        self._check_compatible(other)
        return self._wrap(self.values + other.values)

    def __sub__(self, other: GridFunction) -> GridFunction:
        self._check_compatible(other)
        return self._wrap(self.values - other.values)

    def scale(self, a: float) -> GridFunction:
        return self._wrap(self.values * float(a))

    def abs(self) -> GridFunction:
        return self._wrap(np.abs(self.values))

    def power(self, p: float) -> GridFunction:
        if (self.values < 0).any():
            raise ConfigError("power requires a non-negative function")
        return self._wrap(self.values ** float(p))

    def minimum(self, cap: float) -> GridFunction:
        return self._wrap(np.minimum(self.values, float(cap)))

    def pointwise_min(self, other: GridFunction) -> GridFunction:
        self._check_compatible(other)
        return self._wrap(np.minimum(self.values, other.values))

    def restrict(self, region: GridSet) -> GridFunction:
        """Zero out every cell outside the region."""
        if self.root != region.root or self.finest_level != region.finest_level:
            raise ConfigError("function and region live on different lattices")
        return self._wrap(np.where(region.mask, self.values, 0.0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridFunction):
            return NotImplemented
        return (self.root == other.root and self.finest_level == other.finest_level
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return (f"GridFunction(n={self.n}, root={self.root.level}/{self.root.coords}, "
                f"finest={self.finest_level})")


def cell_of_point(root: DyadicCube, finest_level: int, point: Sequence[float]) -> tuple[int, ...]:
    """Local coordinates of the finest cell containing a point."""
    if len(point) != root.n:
        raise ConfigError(f"point has dimension {len(point)}, grid has {root.n}")
    extent = 1 << (root.level - finest_level)
    side = 2.0 ** finest_level
    cell = []
    for x, lo in zip(point, root.lower()):
        i = math.floor((x - lo) / side)
        if not 0 <= i < extent:
            raise GeometryError(f"point {tuple(point)} lies outside the root cube")
        cell.append(i)
    return tuple(cell)


def grid_points(root: DyadicCube, per_axis: int, margin: float) -> list[tuple[float, ...]]:
    """A uniform interior sample grid, inset from the root faces by `margin`."""
    if per_axis < 1:
        raise ConfigError("per_axis must be >= 1")
    if margin < 0 or 2 * margin >= root.side:
        raise ConfigError("margin must satisfy 0 <= 2*margin < root side")
    axes = []
    for lo in root.lower():
        span = root.side - 2 * margin
        axes.append([lo + margin + span * (k + 0.5) / per_axis for k in range(per_axis)])
    return [tuple(p) for p in itertools.product(*axes)]
