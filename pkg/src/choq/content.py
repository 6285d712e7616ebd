"""Exact dyadic Hausdorff content of grid sets.

The content of exponent delta is the minimum of sum(side(Q)^delta) over all
covers of the set by dyadic cubes.  For a set of finest-level cells inside a
root cube the minimum is attained within the root's subtree, so it can be
computed exactly by the bottom-up recursion

    cost(Q) = 0                                   if Q misses the set,
    cost(Q) = side(Q)^delta                       if Q is a cell of the set,
    cost(Q) = min(side(Q)^delta, sum cost(child)) otherwise.

The implementation walks the tree sparsely (only cubes that meet the set),
one level at a time, so the work scales with the number of cells rather than
with the lattice size.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cubes import DyadicCube, GridSet, decode_keys, encode_coords
from .errors import ConfigError, InstanceTooLargeError

BRUTE_FORCE_CELL_LIMIT = 64


def check_delta(delta: float, n: int) -> float:
    delta = float(delta)
    if not 0.0 < delta <= n:
        raise ConfigError(f"delta must lie in (0, {n}], got {delta}")
    return delta


@dataclass(frozen=True)
class ContentResult:
    """Value and a minimizing cover for one content query."""

    value: float
    delta: float
    optimal_cover: tuple[DyadicCube, ...]


def _cover_table(E: GridSet, delta: float):
    """Bottom-up cost table, finest level first.

    Each entry is (extent, keys, child_sums, costs) for the nonempty cubes at
    that level; child_sums is None at the finest level.  The walk stops as
    soon as a single cube remains (ancestors above it can only cost more).
    """
    n = E.n
    extent = E.extent
    side = E.cell_side
    keys = E.keys
    costs = np.full(keys.size, side ** delta)
    table = [(extent, keys, None, costs)]
    while keys.size > 1:
        parents = decode_keys(keys, extent, n) >> 1
        extent >>= 1
        side *= 2.0
        uniq, inverse = np.unique(encode_coords(parents, extent), return_inverse=True)
        sums = np.bincount(inverse, weights=costs)
        costs = np.minimum(side ** delta, sums)
        keys = uniq
        table.append((extent, keys, sums, costs))
    return table


def content_value(E: GridSet, delta: float) -> float:
    """The exact content, without cover reconstruction."""
    delta = check_delta(delta, E.n)
    if E.is_empty:
        return 0.0
    return float(_cover_table(E, delta)[-1][3][0])


def dyadic_content(E: GridSet, delta: float) -> ContentResult:
    """Exact content together with a minimizing cover.

    Ties between a cube and its children are resolved in favor of the single
    cube, so the reported cover is the coarsest minimizer and the result is
    deterministic.
    """
    delta = check_delta(delta, E.n)
    if E.is_empty:
        return ContentResult(0.0, delta, ())
    table = _cover_table(E, delta)
    n = E.n
    cover: list[DyadicCube] = []
    stack = [(len(table) - 1, 0)]
    while stack:
        j, pos = stack.pop()
        extent, keys, sums, _ = table[j]
        level = E.finest_level + j
        if j == 0 or (2.0 ** level) ** delta <= sums[pos]:
            local = decode_keys(keys[pos:pos + 1], extent, n)[0]
            coords = tuple(int(r * extent + c) for r, c in zip(E.root.coords, local))
            cover.append(DyadicCube(level, coords))
            continue
        child_extent, child_keys, _, _ = table[j - 1]
        base = decode_keys(keys[pos:pos + 1], extent, n)[0] * 2
        for off in itertools.product((0, 1), repeat=n):
            coords = np.asarray([base + np.asarray(off)], dtype=np.int64)
            key = encode_coords(coords, child_extent)[0]
            child_pos = int(np.searchsorted(child_keys, key))
            if child_pos < child_keys.size and child_keys[child_pos] == key:
                stack.append((j - 1, child_pos))
    cover.sort(key=lambda q: (-q.level, q.coords))
    value = float(table[-1][3][0])
    return ContentResult(value, delta, tuple(cover))


def brute_force_content(E: GridSet, delta: float) -> float:
    """Minimum cover cost by explicit enumeration of every antichain cover.

    Verification oracle for `dyadic_content`; only feasible on tiny lattices.
    """
    delta = check_delta(delta, E.n)
    total = E.extent ** E.n
    if total > BRUTE_FORCE_CELL_LIMIT:
        raise InstanceTooLargeError(
            f"lattice has {total} cells, exhaustive limit is {BRUTE_FORCE_CELL_LIMIT}")
    if E.is_empty:
        return 0.0

    n = E.n

    def covers(block: np.ndarray, side: float) -> list[list[float]]:
        """All antichain covers of the block's cells, as lists of cube sides."""
        if not block.any():
            return [[]]
        options = [[side]]
        if block.size > 1:
            half = block.shape[0] // 2
            child_lists = []
            for off in itertools.product((0, 1), repeat=n):
                sl = tuple(slice(o * half, (o + 1) * half) for o in off)
                child_lists.append(covers(block[sl], side / 2.0))
            for combo in itertools.product(*child_lists):
                options.append([s for part in combo for s in part])
        return options

    best = math.inf
    for option in covers(E.mask, 2.0 ** E.root.level):
        cost = math.fsum(s ** delta for s in option)
        if cost < best:
            best = cost
    return best


def ball_content_bounds(radius: float, n: int, delta: float) -> tuple[float, float]:
    """Analytic two-sided bounds c_low * r^delta <= content(B(x, r)) <= c_high * r^delta.

    Lower constant: a dyadic cube of side >= r / (2 sqrt(n)) fits inside any
    ball of radius r, and a single cube's content equals its side^delta.
    Upper constant: a ball of radius r meets at most 2^n dyadic cubes at the
    first level whose side is in [2r, 4r), which cover it.
    """
    delta = check_delta(delta, n)
    if radius <= 0:
        raise ConfigError("radius must be positive")
    lower = (2.0 * math.sqrt(n)) ** (-delta) * radius ** delta
    upper = 2.0 ** n * 4.0 ** delta * radius ** delta
    return lower, upper
