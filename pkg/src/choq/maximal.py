"""Content-normalized ball averages and centred maximal operators.

The average of f over B(x, r) is the Choquet integral of f over the
outer-rasterized ball divided by the content of that same rasterized ball.
Using the computed content of the raster (rather than the analytic r^delta)
in the denominator makes the average of a constant exactly that constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .content import check_delta, content_value
from .cubes import GridFunction, GridSet
from .errors import ConfigError, GeometryError
from .integral import choquet_integral, nl1_norm
from .shapes import rasterize_ball

ADMISSIBILITY_CELLS = 4  # smallest usable radius, in finest cell sides


@dataclass(frozen=True)
class RadialProfile:
    """Per-radius averages around one center, radii strictly decreasing."""

    center: tuple[float, ...]
    radii: tuple[float, ...]
    averages: tuple[float, ...]
    delta: float

    def __post_init__(self):
        if len(self.radii) != len(self.averages):
            raise ConfigError("need one average per radius")
        for a, b in zip(self.radii, self.radii[1:]):
            if not b < a:
                raise ConfigError("radii must be strictly decreasing")
        if any(v < 0 or not math.isfinite(v) for v in self.averages):
            raise ConfigError("averages must be finite and non-negative")

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.radii, self.averages))


def admissible_floor(finest_level: int) -> float:
    return ADMISSIBILITY_CELLS * 2.0 ** finest_level


def geometric_radii(r_max: float, finest_level: int, count: int | None = None) -> tuple[float, ...]:
    """Radii r_max, r_max/2, r_max/4, ... truncated at the admissibility floor."""
    if r_max <= 0:
        raise ConfigError("r_max must be positive")
    floor = admissible_floor(finest_level)
    out = []
    r = float(r_max)
    while r >= floor and (count is None or len(out) < count):
        out.append(r)
        r /= 2.0
    if not out:
        raise GeometryError(f"no admissible radii below {r_max} at floor {floor}")
    return tuple(out)


def ball_average(f: GridFunction, x: Sequence[float], r: float, delta: float) -> float:
    """Content-normalized average of f over the outer-rasterized ball B(x, r)."""
    delta = check_delta(delta, f.n)
    if r < admissible_floor(f.finest_level):
        raise GeometryError(
            f"radius {r} below the admissibility floor {admissible_floor(f.finest_level)}")
    for v, lo, hi in zip(x, f.root.lower(), f.root.upper()):
        if v - r < lo or v + r > hi:
            raise GeometryError("ball escapes root")
    ball = rasterize_ball(x, r, f.root, f.finest_level, mode="outer")
    denominator = content_value(ball, delta)
    numerator = choquet_integral(f, ball, delta)
    return numerator / denominator


def maximal(f: GridFunction, x: Sequence[float], delta: float,
            radii: Sequence[float]) -> float:
    """Largest ball average of |f| centred at x over the given radii.

    A finite radii list makes this a certified lower bound for the supremum
    over all radii.
    """
    if not radii:
        raise ConfigError("need at least one radius")
    g = f.abs()
    return max(ball_average(g, x, r, delta) for r in radii)


def radial_profile(f: GridFunction, x: Sequence[float], delta: float,
                   radii: Sequence[float]) -> RadialProfile:
    radii = tuple(sorted(set(float(r) for r in radii), reverse=True))
    g = f.abs()
    averages = tuple(ball_average(g, x, r, delta) for r in radii)
    return RadialProfile(tuple(float(v) for v in x), radii, averages, float(delta))


def weak_type_ratio(f: GridFunction, delta: float, t: float,
                    sample_grid: Sequence[Sequence[float]],
                    radii: Sequence[float]) -> dict:
    """Empirical weak-type quotient for the centred maximal operator.

    The superlevel set {maximal > t} is estimated by marking the cell of each
    sample point where the sampled maximal value exceeds t; the report carries
    t * content(superlevel) / norm(f), which the weak-type inequality bounds
    by a constant.
    """
    return _weak_type(f, delta, float(delta), t, sample_grid, radii)


def weak_type_cross(f: GridFunction, delta: float, t: float,
                    sample_grid: Sequence[Sequence[float]],
                    radii: Sequence[float]) -> dict:
    """Weak-type quotient with full-dimensional averages measured in a lower
    content: the maximal operator averages at exponent n while the superlevel
    content and the norm use delta < n."""
    if not float(delta) < f.n:
        raise ConfigError("cross estimate requires delta < n")
    return _weak_type(f, delta, float(f.n), t, sample_grid, radii)


def _weak_type(f, delta, avg_delta, t, sample_grid, radii) -> dict:
    delta = check_delta(delta, f.n)
    check_delta(avg_delta, f.n)
    if t <= 0:
        raise ConfigError("threshold must be positive")
    exceed = [tuple(float(v) for v in x) for x in sample_grid
              if maximal(f, x, avg_delta, radii) > t]
    marked = GridSet.from_points(f.root, f.finest_level, exceed)
    content_est = content_value(marked, delta)
    norm = nl1_norm(f, delta)
    bound_ratio = 0.0 if content_est == 0.0 else t * content_est / norm
    return {
        "threshold": t,
        "delta": delta,
        "average_delta": avg_delta,
        "samples": len(list(sample_grid)),
        "exceed_count": len(exceed),
        "content_est": content_est,
        "norm": norm,
        "bound_ratio": bound_ratio,
        "radii": [float(r) for r in radii],
    }


def pointwise_domination(f: GridFunction, x: Sequence[float], delta: float,
                         radii: Sequence[float]) -> dict:
    """Compare the full-dimensional maximal value against the delta-power
    route (maximal at delta of f^(delta/n), raised back to n/delta)."""
    delta = check_delta(delta, f.n)
    if not delta < f.n:
        raise ConfigError("domination estimate requires delta < n")
    if (f.values < 0).any():
        raise ConfigError("requires a non-negative function")
    n = float(f.n)
    lhs = maximal(f, x, n, radii)
    core = maximal(f.power(delta / n), x, delta, radii)
    rhs_core = core ** (n / delta)
    if rhs_core > 0.0:
        ratio = lhs / rhs_core
    else:
        ratio = 0.0 if lhs == 0.0 else math.inf
    return {"lhs": lhs, "rhs_core": rhs_core, "ratio": ratio}
