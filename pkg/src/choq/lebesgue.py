"""Lebesgue-point defect and classification scans.

The defect of f at x is the largest average of |f - f(x)| over a tail window
of shrinking admissible radii; it is the finite-resolution surrogate for the
limit superior of shrinking-ball averages.  A point is a discrete Lebesgue
point when the defect is below a scale-aware threshold, and defective when
every tail average clears the threshold.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .content import check_delta, content_value
from .cubes import GridFunction, GridSet, cell_of_point
from .errors import ConfigError
from .integral import nl1_norm
from .maximal import ball_average, maximal

DEFAULT_TAIL = 3
DEFAULT_THRESHOLD_FRACTION = 0.01


@dataclass(frozen=True)
class LebesguePointReport:
    point: tuple[float, ...]
    delta: float
    fstar_estimate: float
    tail_radii: tuple[float, ...]
    classification: str  # "lebesgue" | "defective" | "inconclusive"
    lower_bound: float | None = None

    def __post_init__(self):
        if self.fstar_estimate < 0:
            raise ConfigError("defect estimate must be non-negative")
        if self.classification == "defective" and not self.lower_bound:
            raise ConfigError("a defective point needs a positive lower bound")


def tail_window(radii: Sequence[float], tail: int = DEFAULT_TAIL) -> tuple[float, ...]:
    """The `tail` smallest radii, in decreasing order."""
    if tail < 1:
        raise ConfigError("tail must be >= 1")
    ordered = sorted(set(float(r) for r in radii), reverse=True)
    if len(ordered) < tail:
        raise ConfigError(f"need at least {tail} admissible radii, got {len(ordered)}")
    return tuple(ordered[-tail:])


def _difference_to_value(f: GridFunction, x: Sequence[float]) -> tuple[GridFunction, float]:
    fx = f.value_at(x)
    return GridFunction(f.root, f.finest_level, np.abs(f.values - fx)), fx


def tail_averages(f: GridFunction, x: Sequence[float], delta: float,
                  radii: Sequence[float], tail: int = DEFAULT_TAIL) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """(tail radii, averages of |f - f(x)| at those radii)."""
    window = tail_window(radii, tail)
    g, _ = _difference_to_value(f, x)
    return window, tuple(ball_average(g, x, r, delta) for r in window)


def fstar(f: GridFunction, x: Sequence[float], delta: float,
          radii: Sequence[float], tail: int = DEFAULT_TAIL) -> float:
    """Lebesgue-point defect: the largest tail-window average of |f - f(x)|."""
    _, averages = tail_averages(f, x, delta, radii, tail)
    return max(averages)


def average_limsup(f: GridFunction, x: Sequence[float], delta: float,
                   radii: Sequence[float], tail: int = DEFAULT_TAIL) -> float:
    """Tail-window supremum of the plain ball averages of f."""
    if (f.values < 0).any():
        raise ConfigError("requires a non-negative function")
    window = tail_window(radii, tail)
    return max(ball_average(f, x, r, delta) for r in window)


def fstar_bounds_check(f: GridFunction, x: Sequence[float], delta: float,
                       radii: Sequence[float], tail: int = DEFAULT_TAIL,
                       sample_points: Sequence[Sequence[float]] | None = None,
                       lambdas: Sequence[float] | None = None,
                       weak_constant: float | None = None,
                       tol: float = 1e-9) -> dict:
    """Check the defect against its two upper bounds.

    Pointwise: fstar(f, x) <= maximal(f, x) + f(x) at matched radii.  When a
    sample grid, thresholds and an empirical constant C are supplied, also
    check content({fstar > lambda}) <= C * norm(f) / lambda for each lambda.
    """
    delta = check_delta(delta, f.n)
    window = tail_window(radii, tail)
    value = fstar(f, x, delta, radii, tail)
    dominator = maximal(f, x, delta, window) + f.value_at(x)
    report = {
        "fstar": value,
        "maximal_plus_value": dominator,
        "pointwise_holds": value <= dominator + tol,
        "tail_radii": list(window),
    }
    if sample_points is not None:
        if lambdas is None or weak_constant is None:
            raise ConfigError("grid check needs lambdas and a weak constant")
        defects = [fstar(f, p, delta, radii, tail) for p in sample_points]
        norm = nl1_norm(f, delta)
        rows = []
        for lam in lambdas:
            if lam <= 0:
                raise ConfigError("lambda must be positive")
            exceed = [p for p, d in zip(sample_points, defects) if d > lam]
            marked = GridSet.from_points(f.root, f.finest_level, exceed)
            c_est = content_value(marked, delta)
            rows.append({
                "lam": float(lam),
                "content": c_est,
                "bound": weak_constant * norm / lam,
                "holds": c_est <= weak_constant * norm / lam + tol,
            })
        report["grid_rows"] = rows
        report["grid_holds"] = all(r["holds"] for r in rows)
    return report


def translation_invariance_check(f: GridFunction, phi: GridFunction,
                                 x: Sequence[float], delta: float,
                                 radii: Sequence[float],
                                 tail: int = DEFAULT_TAIL) -> dict:
    """Subtracting a function that is constant on the largest ball leaves the
    defect unchanged, exactly: on the ball the integrands coincide cellwise."""
    from .shapes import rasterize_ball

    f._check_compatible(phi)
    window = tail_window(radii, tail)
    ball = rasterize_ball(x, max(window), f.root, f.finest_level, mode="outer")
    phi_vals = phi.values_on(ball)
    if phi_vals.size and (phi_vals != phi_vals[0]).any():
        raise ConfigError("phi is not locally constant on the largest ball")
    shifted = fstar(f - phi, x, delta, window, tail)
    original = fstar(f, x, delta, window, tail)
    return {
        "fstar_shifted": shifted,
        "fstar_original": original,
        "equal": shifted == original,
    }


def lebesgue_scan(f: GridFunction, delta: float,
                  sample_grid: Sequence[Sequence[float]],
                  radii: Sequence[float],
                  threshold: float | None = None,
                  tail: int = DEFAULT_TAIL,
                  workers: int = 1) -> tuple[list[LebesguePointReport], dict]:
    """Classify every sample point and measure the defective set.

    A point is defective only when every tail-window average clears the
    threshold; the defective set is the union of the cells containing the
    defective points and is reported with its delta-content.
    """
    delta = check_delta(delta, f.n)
    if threshold is None:
        spread = f.max_value() - f.min_value()
        threshold = DEFAULT_THRESHOLD_FRACTION * spread
    if threshold < 0:
        raise ConfigError("threshold must be non-negative")
    points = [tuple(float(v) for v in p) for p in sample_grid]

    def classify(point) -> LebesguePointReport:
        window, averages = tail_averages(f, point, delta, radii, tail)
        estimate = max(averages)
        if estimate < threshold or threshold == 0.0 and estimate == 0.0:
            kind, low = "lebesgue", None
        elif min(averages) >= threshold and threshold > 0.0:
            kind, low = "defective", min(averages)
        else:
            kind, low = "inconclusive", None
        return LebesguePointReport(point, delta, estimate, window, kind, low)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(classify, points))
    else:
        reports = [classify(p) for p in points]

    defective = [r.point for r in reports if r.classification == "defective"]
    marked = GridSet.from_points(f.root, f.finest_level, defective)
    summary = {
        "delta": delta,
        "threshold": threshold,
        "radii": [float(r) for r in radii],
        "tail": tail,
        "samples": len(points),
        "counts": {
            kind: sum(1 for r in reports if r.classification == kind)
            for kind in ("lebesgue", "defective", "inconclusive")
        },
        "defective_content": content_value(marked, delta),
    }
    return reports, summary


def quasicontinuity_defect(f: GridFunction, delta: float, epsilon_budget: float) -> dict:
    """Greedy quasicontinuity witness.

    Cells are ranked by their largest jump to a face neighbor and removed in
    that order while the content of the removed set stays within the budget;
    the report carries the largest jump surviving between remaining neighbors.
    A larger budget removes a longer prefix, so the reported oscillation is
    nonincreasing in the budget.
    """
    delta = check_delta(delta, f.n)
    if epsilon_budget < 0:
        raise ConfigError("budget must be non-negative")

    vals = f.values
    n = f.n
    jump = np.zeros_like(vals)
    pair_slices = []
    for axis in range(n):
        lo = [slice(None)] * n
        hi = [slice(None)] * n
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        lo_t, hi_t = tuple(lo), tuple(hi)
        d = np.abs(vals[lo_t] - vals[hi_t])
        np.maximum(jump[lo_t], d, out=jump[lo_t])
        np.maximum(jump[hi_t], d, out=jump[hi_t])
        pair_slices.append((lo_t, hi_t, d))

    flat_jump = jump.ravel()
    candidates = np.flatnonzero(flat_jump > 0)
    order = candidates[np.lexsort((candidates, -flat_jump[candidates]))]

    removed: list[int] = []
    removed_content = 0.0
    for key in order:
        trial = GridSet(f.root, f.finest_level, np.asarray(removed + [int(key)]))
        cost = content_value(trial, delta)
        if cost > epsilon_budget + 1e-12:
            break
        removed.append(int(key))
        removed_content = cost

    removed_set = GridSet(f.root, f.finest_level, np.asarray(removed, dtype=np.int64))
    keep = ~removed_set.mask
    oscillation = 0.0
    for lo_t, hi_t, d in pair_slices:
        both = keep[lo_t] & keep[hi_t]
        if both.any():
            oscillation = max(oscillation, float(d[both].max()))
    return {
        "removed": removed_set,
        "removed_content": removed_content,
        "oscillation": oscillation,
        "budget": float(epsilon_budget),
    }
