"""Command-line surface.

Subcommands: content, integrate, maximal, lebesgue-scan, counterexample,
quasidefect.  Outputs are deterministic: identical configuration (including
seeds) produces identical bytes, and every report embeds the configuration
that produced it.  Exit codes: 0 success, 2 invalid configuration, 3
infeasible geometry, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field

from . import io as gio
from .content import check_delta, dyadic_content
from .cubes import DyadicCube, GridFunction, GridSet, grid_points
from .errors import ConfigError, GeometryError, InstanceTooLargeError, SchemaError
from .integral import choquet_integral, distribution, nl1_norm
from .lebesgue import lebesgue_scan, quasicontinuity_defect, tail_averages
from .maximal import geometric_radii, radial_profile
from .shapes import (koch_dimension, koch_polygon, koch_region, random_function,
                     rasterize_ball, staircase_function)

BUILTINS = ("ball", "koch", "staircase", "random")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_INTERNAL = 4


@dataclass
class RunConfig:
    """Resolved parameters of one CLI run; embedded into every output."""

    command: str
    n: int = 2
    delta: float = 1.0
    resolution: int = -6
    builtin: str | None = None
    input: str | None = None
    seed: int = 0
    which: str | None = None
    depth: int = 4
    ratio: float = 0.35
    point: tuple[float, ...] | None = None
    r_max: float | None = None
    radii_count: int | None = None
    grid_per_axis: int = 8
    grid_margin: float | None = None
    threshold: float | None = None
    budget: float | None = None
    t: float | None = None
    out: str | None = None
    report: str | None = None
    distribution_csv: str | None = None
    workers: int = 1

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["point"] is not None:
            d["point"] = list(d["point"])
        return d


def default_root(n: int) -> DyadicCube:
    return DyadicCube(0, (0,) * n)


def _builtin_function(cfg: RunConfig, root: DyadicCube) -> GridFunction:
    if cfg.builtin == "ball":
        center = tuple(lo + root.side / 2 for lo in root.lower())
        ball = rasterize_ball(center, 0.4 * root.side, root, cfg.resolution, "outer")
        return GridFunction.indicator(ball)
    if cfg.builtin == "koch":
        if root.n != 2:
            raise ConfigError("the koch builtin requires n = 2")
        return GridFunction.indicator(
            koch_region(cfg.ratio, cfg.depth, root, cfg.resolution))
    if cfg.builtin == "staircase":
        return staircase_function(root, cfg.resolution)
    if cfg.builtin == "random":
        return random_function(root, cfg.resolution, cfg.seed)
    raise ConfigError(f"unknown builtin {cfg.builtin!r}, expected one of {BUILTINS}")


def _load_input(cfg: RunConfig):
    obj = gio.load_grid(cfg.input)
    return obj


def resolve_function(cfg: RunConfig) -> GridFunction:
    if (cfg.builtin is None) == (cfg.input is None):
        raise ConfigError("provide exactly one of --builtin or --input")
    if cfg.builtin is not None:
        return _builtin_function(cfg, default_root(cfg.n))
    obj = _load_input(cfg)
    if isinstance(obj, GridSet):
        return GridFunction.indicator(obj)
    return obj


def resolve_set(cfg: RunConfig) -> GridSet:
    if (cfg.builtin is None) == (cfg.input is None):
        raise ConfigError("provide exactly one of --builtin or --input")
    if cfg.builtin is not None:
        return _builtin_function(cfg, default_root(cfg.n)).support()
    obj = _load_input(cfg)
    if isinstance(obj, GridFunction):
        return obj.support()
    return obj


def _radii(cfg: RunConfig, f: GridFunction) -> tuple[float, ...]:
    r_max = cfg.r_max if cfg.r_max is not None else 0.25 * f.root.side
    return geometric_radii(r_max, f.finest_level, cfg.radii_count)


def _out_path(cfg: RunConfig, attr: str) -> str:
    path = getattr(cfg, attr)
    if path is None:
        raise ConfigError(f"--{attr.replace('_', '-')} is required for this command")
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_content(cfg: RunConfig) -> None:
    E = resolve_set(cfg)
    check_delta(cfg.delta, E.n)
    result = dyadic_content(E, cfg.delta)
    gio.write_json({
        "command": "content",
        "config": cfg.to_dict(),
        "value": result.value,
        "delta": result.delta,
        "cover": [{"level": q.level, "coords": list(q.coords)} for q in result.optimal_cover],
        "cells": E.cell_count,
    }, _out_path(cfg, "out"))


def cmd_integrate(cfg: RunConfig) -> None:
    f = resolve_function(cfg)
    omega = f.domain()
    dist = distribution(f, omega, cfg.delta)
    report = {
        "command": "integrate",
        "config": cfg.to_dict(),
        "integral": dist.integral(),
        "norm": nl1_norm(f, cfg.delta),
        "plateau_count": len(dist.plateaus),
    }
    gio.write_json(report, _out_path(cfg, "out"))
    if cfg.distribution_csv is not None:
        gio.write_csv(dist.rows(), ["t", "content"], cfg.distribution_csv)


def cmd_maximal(cfg: RunConfig) -> None:
    f = resolve_function(cfg)
    if cfg.point is None:
        raise ConfigError("--point is required for the maximal command")
    radii = _radii(cfg, f)
    profile = radial_profile(f, cfg.point, cfg.delta, radii)
    gio.write_csv(profile.rows(), ["r", "average"], _out_path(cfg, "out"))
    if cfg.report is not None:
        gio.write_json({
            "command": "maximal",
            "config": cfg.to_dict(),
            "maximal": max(profile.averages),
            "radii": list(profile.radii),
            "averages": list(profile.averages),
        }, cfg.report)


def _scan_rows(reports, n: int):
    coord_names = ["x", "y", "z"][:n]
    header = coord_names + ["fx", "fstar_estimate", "classification"]
    rows = []
    for r, fx in reports:
        rows.append([*r.point, fx, r.fstar_estimate, r.classification])
    return header, rows


def cmd_lebesgue_scan(cfg: RunConfig) -> None:
    f = resolve_function(cfg)
    radii = _radii(cfg, f)
    margin = cfg.grid_margin if cfg.grid_margin is not None else max(radii)
    points = grid_points(f.root, cfg.grid_per_axis, margin)
    reports, summary = lebesgue_scan(f, cfg.delta, points, radii,
                                     threshold=cfg.threshold, workers=cfg.workers)
    header, rows = _scan_rows([(r, f.value_at(r.point)) for r in reports], f.n)
    gio.write_csv(rows, header, _out_path(cfg, "out"))
    summary = {"command": "lebesgue-scan", "config": cfg.to_dict(), **summary}
    if cfg.report is not None:
        gio.write_json(summary, cfg.report)


def counterexample_ball(resolution: int, delta: float, boundary_points: int = 16):
    """Indicator of the unit disk in the root [0, 4)^2, with circle samples
    nudged one coarse cell outward so the sampled cell value is exactly 0."""
    root = DyadicCube(2, (0, 0))
    center = (2.0, 2.0)
    disk = rasterize_ball(center, 1.0, root, resolution, "outer")
    f = GridFunction.indicator(disk)
    rho = 1.0 + 2.0 ** -6
    import math
    points = [
        (center[0] + rho * math.cos(2 * math.pi * k / boundary_points),
         center[1] + rho * math.sin(2 * math.pi * k / boundary_points))
        for k in range(boundary_points)
    ]
    radii = geometric_radii(0.5, resolution)
    return f, points, radii


def counterexample_koch(resolution: int, ratio: float, depth: int):
    """Indicator of the snowflake region in the root [0, 4)^2, sampled at the
    polygon vertices."""
    root = DyadicCube(2, (0, 0))
    region = koch_region(ratio, depth, root, resolution)
    f = GridFunction.indicator(region)
    vertices = koch_polygon(ratio, depth, (2.0, 2.0), 0.35 * root.side)
    points = [tuple(map(float, v)) for v in vertices]
    radii = geometric_radii(0.25, resolution)
    return f, points, radii


def cmd_counterexample(cfg: RunConfig) -> None:
    if cfg.which == "ball":
        resolution = cfg.resolution if cfg.resolution != -6 else -7
        f, points, radii = counterexample_ball(resolution, cfg.delta)
        profiles = []
        rows = []
        for k, p in enumerate(points):
            window, averages = tail_averages(f, p, cfg.delta, radii)
            prof = radial_profile(f, p, cfg.delta, radii)
            profiles.append((p, window, averages))
            for r, a in prof.rows():
                rows.append([k, p[0], p[1], r, a])
        floor = min(min(avg) for _, _, avg in profiles)
        gio.write_csv(rows, ["point", "x", "y", "r", "average"], _out_path(cfg, "out"))
        if cfg.report is not None:
            gio.write_json({
                "command": "counterexample",
                "config": cfg.to_dict(),
                "which": "ball",
                "floor": floor,
                "per_point": [
                    {"point": list(p), "tail_radii": list(w), "tail_averages": list(a),
                     "fstar": max(a)}
                    for p, w, a in profiles
                ],
            }, cfg.report)
        return
    if cfg.which == "koch":
        resolution = cfg.resolution if cfg.resolution != -6 else -7
        delta = cfg.delta if cfg.delta != 1.0 else koch_dimension(cfg.ratio)
        f, points, radii = counterexample_koch(resolution, cfg.ratio, cfg.depth)
        reports, summary = lebesgue_scan(f, delta, points, radii,
                                         threshold=cfg.threshold, workers=cfg.workers)
        header, rows = _scan_rows([(r, f.value_at(r.point)) for r in reports], 2)
        gio.write_csv(rows, header, _out_path(cfg, "out"))
        if cfg.report is not None:
            defective = GridSet.from_points(
                f.root, f.finest_level,
                [r.point for r in reports if r.classification == "defective"])
            from .content import content_value
            gio.write_json({
                "command": "counterexample",
                "config": cfg.to_dict(),
                "which": "koch",
                "delta": delta,
                "boundary_dimension": koch_dimension(cfg.ratio),
                **summary,
                "defective_content_full_dim": content_value(defective, 2.0),
            }, cfg.report)
        return
    raise ConfigError("--which must be 'ball' or 'koch'")


def cmd_quasidefect(cfg: RunConfig) -> None:
    f = resolve_function(cfg)
    if cfg.budget is None:
        raise ConfigError("--budget is required for the quasidefect command")
    report = quasicontinuity_defect(f, cfg.delta, cfg.budget)
    gio.write_json({
        "command": "quasidefect",
        "config": cfg.to_dict(),
        "removed_cells": [int(k) for k in report["removed"].keys],
        "removed_content": report["removed_content"],
        "oscillation": report["oscillation"],
        "budget": report["budget"],
    }, _out_path(cfg, "out"))


COMMANDS = {
    "content": cmd_content,
    "integrate": cmd_integrate,
    "maximal": cmd_maximal,
    "lebesgue-scan": cmd_lebesgue_scan,
    "counterexample": cmd_counterexample,
    "quasidefect": cmd_quasidefect,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _parse_point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse point {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="choq",
        description="Dyadic Hausdorff content and Choquet integration toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, function_source=True):
        p.add_argument("--n", type=int, default=2, choices=(1, 2, 3))
        p.add_argument("--delta", type=float, default=1.0)
        p.add_argument("--resolution", type=int, default=-6,
                       help="finest dyadic level (negative)")
        if function_source:
            p.add_argument("--builtin", choices=BUILTINS)
            p.add_argument("--input", help="path to a grid JSON file")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--depth", type=int, default=4)
            p.add_argument("--ratio", type=float, default=0.35)
        p.add_argument("--out", required=True)

    p = sub.add_parser("content", help="exact content of a grid set")
    common(p)

    p = sub.add_parser("integrate", help="Choquet integral over the root")
    common(p)
    p.add_argument("--distribution-csv")

    p = sub.add_parser("maximal", help="radial averages and maximal value at a point")
    common(p)
    p.add_argument("--point", type=_parse_point, required=True)
    p.add_argument("--r-max", type=float)
    p.add_argument("--radii-count", type=int)
    p.add_argument("--report")

    p = sub.add_parser("lebesgue-scan", help="classify sample points by defect")
    common(p)
    p.add_argument("--r-max", type=float)
    p.add_argument("--radii-count", type=int)
    p.add_argument("--grid-per-axis", type=int, default=8)
    p.add_argument("--grid-margin", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--report")

    p = sub.add_parser("counterexample", help="boundary defect reproductions")
    p.add_argument("--which", required=True, choices=("ball", "koch"))
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--resolution", type=int, default=-6)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--ratio", type=float, default=0.35)
    p.add_argument("--threshold", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--report")

    p = sub.add_parser("quasidefect", help="greedy quasicontinuity witness")
    common(p)
    p.add_argument("--budget", type=float, required=True)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for key, value in vars(args).items():
        attr = key.replace("-", "_")
        if hasattr(cfg, attr) and value is not None:
            setattr(cfg, attr, value)
    cfg.workers = int(os.environ.get("CHOQ_WORKERS", "1"))
    if cfg.workers < 1:
        raise ConfigError("CHOQ_WORKERS must be >= 1")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = config_from_args(args)
        COMMANDS[cfg.command](cfg)
        return EXIT_OK
    except (ConfigError, SchemaError) as exc:
        _emit_error(EXIT_CONFIG, exc)
        return EXIT_CONFIG
    except (GeometryError, InstanceTooLargeError) as exc:
        _emit_error(EXIT_GEOMETRY, exc)
        return EXIT_GEOMETRY
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports everything
        _emit_error(EXIT_INTERNAL, exc)
        return EXIT_INTERNAL


def _emit_error(code: int, exc: Exception) -> None:
    sys.stdout.write(gio.canonical_json(
        {"error": {"code": code, "type": type(exc).__name__, "message": str(exc)}}))


if __name__ == "__main__":
    sys.exit(main())
