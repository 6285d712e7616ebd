"""Choquet integration against the dyadic content, via the layer-cake formula.

The integral of a non-negative grid function f over a region is the area
under its distribution function t -> content({f > t}).  On a grid f takes
finitely many values, the distribution is a right-continuous decreasing step
function, and the integral is an exact finite sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .content import check_delta, content_value
from .cubes import GridFunction, GridSet
from .errors import ConfigError


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous decreasing step function on [0, inf).

    The value on [breakpoints[i-1], breakpoints[i]) is plateaus[i-1]; beyond
    the last breakpoint the value is 0.  breakpoints[0] is always 0.
    """

    breakpoints: tuple[float, ...]
    plateaus: tuple[float, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.plateaus) + 1:
            raise ConfigError("need exactly one plateau per breakpoint interval")
        if self.breakpoints and self.breakpoints[0] != 0.0:
            raise ConfigError("breakpoints must start at 0")
        for a, b in zip(self.breakpoints, self.breakpoints[1:]):
            if not a < b:
                raise ConfigError("breakpoints must be strictly increasing")
        for a, b in zip(self.plateaus, self.plateaus[1:]):
            if b > a:
                raise ConfigError("plateau values must be nonincreasing")
        if any(v < 0 for v in self.plateaus):
            raise ConfigError("plateau values must be non-negative")

    @property
    def is_zero(self) -> bool:
        return not self.plateaus

    def integral(self) -> float:
        return math.fsum(
            (b - a) * v
            for a, b, v in zip(self.breakpoints, self.breakpoints[1:], self.plateaus))

    def value_at(self, t: float) -> float:
        if t < 0:
            raise ConfigError("the distribution is defined on [0, inf)")
        for b, v in zip(self.breakpoints[1:], self.plateaus):
            if t < b:
                return v
        return 0.0

    def rows(self) -> list[tuple[float, float]]:
        """(threshold, content) pairs for CSV export, one per plateau plus the tail."""
        out = [(a, v) for a, v in zip(self.breakpoints, self.plateaus)]
        if self.breakpoints:
            out.append((self.breakpoints[-1], 0.0))
        return out


def _region_values(f: GridFunction, omega: GridSet) -> np.ndarray:
    vals = f.values_on(omega)
    if vals.size and vals.min() < 0:
        raise ConfigError("integration requires a non-negative function on the region")
    return vals


def distribution(f: GridFunction, omega: GridSet, delta: float) -> StepFunction:
    """Distribution function t -> content({x in omega : f(x) > t}).

    Exact: between consecutive distinct values of f the superlevel set does
    not change, so the plateau on [t_{i-1}, t_i) carries content({f >= t_i}).
    """
    delta = check_delta(delta, f.n)
    vals = _region_values(f, omega)
    levels = np.unique(vals)
    levels = levels[levels > 0]
    if levels.size == 0:
        return StepFunction((0.0,), ())
    plateaus = []
    for t in levels:
        superlevel = GridSet(omega.root, omega.finest_level, omega.keys[vals >= t])
        plateaus.append(content_value(superlevel, delta))
    return StepFunction((0.0, *map(float, levels)), tuple(plateaus))


def choquet_integral(f: GridFunction, omega: GridSet, delta: float) -> float:
    """Exact layer-cake integral of f over omega against the delta-content."""
    return distribution(f, omega, delta).integral()


def nl1_norm(f: GridFunction, delta: float) -> float:
    """The integral of |f| over the whole root; a norm on grid functions."""
    return choquet_integral(f.abs(), f.domain(), delta)


def midpoint_layer_cake(f: GridFunction, omega: GridSet, delta: float,
                        samples: int = 10_000) -> float:
    """Quadrature cross-check of `choquet_integral`.

    Composite midpoint rule over [0, max f] with `samples` nodes, allocated
    across the intervals between consecutive distinct values of f so that no
    node straddles a jump of the integrand.  The integrand is re-evaluated at
    every node as the content of the strict superlevel set, independently of
    the step-sum path (identical superlevel sets share one evaluation).
    """
    delta = check_delta(delta, f.n)
    vals = _region_values(f, omega)
    levels = np.unique(vals)
    levels = levels[levels > 0]
    if levels.size == 0:
        return 0.0
    edges = [0.0, *map(float, levels)]
    total_span = edges[-1]
    cache: dict[bytes, float] = {}

    def content_above(t: float) -> float:
        keys = omega.keys[vals > t]
        tag = keys.tobytes()
        if tag not in cache:
            cache[tag] = content_value(GridSet(omega.root, omega.finest_level, keys), delta)
        return cache[tag]

    acc = []
    for a, b in zip(edges, edges[1:]):
        width = b - a
        k = max(1, int(round(samples * width / total_span)))
        h = width / k
        acc.extend(h * content_above(a + (i + 0.5) * h) for i in range(k))
    return math.fsum(acc)


# ---------------------------------------------------------------------------
# Property checks
# ---------------------------------------------------------------------------

def check_sublinearity(fs: list[GridFunction], omega: GridSet, delta: float,
                       tol: float = 1e-9) -> dict:
    """Integral of a finite sum never exceeds the sum of the integrals."""
    if not fs:
        raise ConfigError("need at least one function")
    total = fs[0]
    for g in fs[1:]:
        total = total + g
    lhs = choquet_integral(total, omega, delta)
    rhs = math.fsum(choquet_integral(g, omega, delta) for g in fs)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + tol}


def check_monotone_convergence(chain: list[GridFunction], omega: GridSet, delta: float,
                               tol: float = 1e-9) -> dict:
    """For a cellwise increasing chain the integrals increase to the integral
    of the final element, which at fixed resolution is the pointwise limit."""
    if not chain:
        raise ConfigError("need a non-empty chain")
    for f, g in zip(chain, chain[1:]):
        if (g.values < f.values).any():
            raise ConfigError("chain is not cellwise nondecreasing")
    integrals = [choquet_integral(g, omega, delta) for g in chain]
    limit = choquet_integral(chain[-1], omega, delta)
    nondecreasing = all(b >= a - tol for a, b in zip(integrals, integrals[1:]))
    return {
        "integrals": integrals,
        "limit_integral": limit,
        "holds": nondecreasing and abs(integrals[-1] - limit) <= tol,
    }


def check_fatou(cycle: list[GridFunction], omega: GridSet, delta: float,
                tol: float = 1e-9) -> dict:
    """Fatou inequality for an eventually periodic sequence given by one cycle:
    the integral of the cellwise infimum is at most the smallest integral."""
    if not cycle:
        raise ConfigError("need a non-empty cycle")
    liminf = cycle[0]
    for g in cycle[1:]:
        liminf = liminf.pointwise_min(g)
    lhs = choquet_integral(liminf, omega, delta)
    rhs = min(choquet_integral(g, omega, delta) for g in cycle)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + tol}


def chebyshev_bound(f: GridFunction, omega: GridSet, delta: float, t: float,
                    tol: float = 1e-9) -> dict:
    """content({f > t}) <= integral(f) / t."""
    if t <= 0:
        raise ConfigError("threshold must be positive")
    delta = check_delta(delta, f.n)
    vals = _region_values(f, omega)
    superlevel = GridSet(omega.root, omega.finest_level, omega.keys[vals > t])
    content_superlevel = content_value(superlevel, delta)
    bound = choquet_integral(f, omega, delta) / t
    return {
        "content_superlevel": content_superlevel,
        "bound": bound,
        "holds": content_superlevel <= bound + tol,
    }


def lebesgue_comparability(f: GridFunction, delta: float, tol: float = 1e-9) -> dict:
    """At delta = n the content of a cell set is its volume, so the Choquet
    integral over the root coincides with the plain cell-sum integral."""
    if float(delta) != float(f.n):
        raise ConfigError("comparability check requires delta = n")
    if (f.values < 0).any():
        raise ConfigError("requires a non-negative function")
    choquet = choquet_integral(f, f.domain(), float(f.n))
    lebesgue = float(np.sum(f.values) * f.cell_side ** f.n)
    ratio = 1.0 if choquet == lebesgue else choquet / lebesgue
    return {
        "choquet": choquet,
        "lebesgue": lebesgue,
        "ratio": ratio,
        "holds": abs(choquet - lebesgue) <= tol * max(1.0, abs(lebesgue)),
    }
