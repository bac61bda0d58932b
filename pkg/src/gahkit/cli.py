"""Command-line entry point: reproducible experiments with file outputs.

Each command validates its configuration before any computation, writes
delimited data (CSV/JSON) plus a rendered figure into the output directory,
and is byte-deterministic for the data files across repeated runs.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import plots
from .config import RunConfig, load_config, load_preset, preset_names
from .dynsys import integrate
from .errors import ConfigError, GahkitError
from .gah_model import (
    GahModelParams,
    RectRegion,
    check_star,
    export_region_clouds_csv,
    iterate_region,
)
from .gah_system import (
    TransversalSquare,
    default_gah_config,
    export_rz_csv,
    gah_poincare_image,
)
from .section import export_crossings_csv, find_crossings
from .trapping import export_clouds_csv, verify_trapping


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gahkit",
        description="Poincare sections, return maps and horseshoe trapping regions",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="key-value config file")
        sp.add_argument("--preset", help=f"named preset ({', '.join(preset_names())})")
        sp.add_argument("--system", choices=("rossler", "gah_system", "gah_model"))
        sp.add_argument("--angle", type=float, help="section rotation angle (radians)")
        sp.add_argument("--cut", type=float, help="cut value of the rotated coordinate")
        sp.add_argument(
            "--direction", choices=("ascending", "descending", "both"),
            help="crossing direction filter",
        )
        sp.add_argument(
            "--quad", help="quadrilateral vertices 'x1,y1:x2,y2:x3,y3:x4,y4'"
        )
        sp.add_argument("--iters", type=int, help="return-map iterations")
        sp.add_argument("--points-per-edge", type=int, dest="points_per_edge")
        sp.add_argument("--out-dir", dest="out_dir", help="output directory")
        sp.add_argument("--t-span", dest="t_span", help="integration span 't0,t1'")
        sp.add_argument("--x0", help="initial state 'x,y,z'")
        sp.add_argument("--rel-tol", dest="rel_tol", type=float)
        sp.add_argument("--abs-tol", dest="abs_tol", type=float)
        sp.add_argument("--max-step", dest="max_step", type=float)
        sp.add_argument("--grid-n", dest="grid_n", type=int, help="seed grid size")
        sp.add_argument(
            "--no-figures", action="store_true", help="skip figure rendering"
        )

    for name, fn in (
        ("simulate", cmd_simulate),
        ("section", cmd_section),
        ("trap", cmd_trap),
        ("gah-demo", cmd_gah_demo),
    ):
        sp = sub.add_parser(name)
        add_common(sp)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("serve", help="run the local HTTP API")
    add_common(sp)
    sp.add_argument("--port", type=int, default=None)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--timeout", type=float, default=120.0, help="compute timeout (s)")
    sp.set_defaults(func=cmd_serve)
    return p


def _resolve_config(args) -> RunConfig:
    if args.preset:
        cfg = load_preset(args.preset)
    elif args.config:
        cfg = load_config(args.config)
    else:
        cfg = RunConfig()

    overrides = {}
    if args.system:
        overrides["system"] = args.system
        if args.system != cfg.system:
            from .config import _DEFAULT_PARAMS

            overrides["params"] = dict(_DEFAULT_PARAMS.get(args.system, {}))
    for key in ("iters", "points_per_edge", "out_dir", "rel_tol", "abs_tol",
                "max_step", "grid_n"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    if args.t_span:
        try:
            a, b = (float(v) for v in args.t_span.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --t-span {args.t_span!r}: {exc}")
        overrides["t_span"] = (a, b)
    if args.x0:
        try:
            x, y, z = (float(v) for v in args.x0.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --x0 {args.x0!r}: {exc}")
        overrides["initial_state"] = (x, y, z)
    if args.quad:
        from .config import _parse_quad

        overrides["quad"] = _parse_quad(args.quad)
    cfg = cfg.with_overrides(**overrides)
    if args.angle is not None or args.cut is not None or args.direction is not None:
        from dataclasses import replace as _rp

        plane = cfg.plane
        kw = {}
        if args.angle is not None:
            kw["rotation_angle"] = args.angle
        if args.cut is not None:
            kw["cut_value"] = args.cut
        if args.direction is not None:
            kw["direction"] = args.direction
        cfg = cfg.with_overrides(plane=_rp(plane, **kw))
    return cfg.validate()


def _cyl_to_cartesian(ys: np.ndarray) -> np.ndarray:
    r, th, z = ys[:, 0], ys[:, 1], ys[:, 2]
    return np.column_stack([r * np.cos(th), r * np.sin(th), z])


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    out = cfg.ensure_out_dir()
    if cfg.system == "gah_model":
        raise ConfigError("simulate needs a flow system (rossler or gah_system)")
    rhs = cfg.make_rhs()
    icfg = cfg.integrator_config()
    if cfg.system == "gah_system":
        import math

        n = int(np.ceil((cfg.t_span[1] - cfg.t_span[0]) / math.pi))
        breaks = tuple(
            b for b in (cfg.t_span[0] + math.pi * i for i in range(1, n))
            if b < cfg.t_span[1]
        )
        from dataclasses import replace as _rp

        icfg = _rp(icfg, t_breaks=breaks)
    traj = integrate(rhs, icfg)
    ys = traj.ys
    if cfg.system == "gah_system":
        ys = _cyl_to_cartesian(ys)
    rotated = cfg.plane.rotation_angle != 0.0
    ys_out = cfg.plane.to_plane_frame(ys) if rotated else ys

    from .dynsys import Trajectory

    out_traj = Trajectory(traj.ts, ys_out)
    csv_path = f"{out}/trajectory.csv"
    out_traj.to_csv(csv_path)
    out_traj.to_json(f"{out}/trajectory.json")
    print(f"wrote {csv_path} ({len(out_traj)} samples)")
    if not args.no_figures:
        print(f"wrote {plots.plot_trajectory(ys_out, f'{out}/trajectory.png', rotated)}")
    return 0


def cmd_section(args) -> int:
    cfg = _resolve_config(args)
    out = cfg.ensure_out_dir()
    if cfg.system != "rossler":
        raise ConfigError("section runs on the rossler system")
    rhs = cfg.make_rhs()
    traj = integrate(rhs, cfg.integrator_config())
    crossings = find_crossings(traj, cfg.plane, refine="dense_bisection")
    csv_path = f"{out}/crossings.csv"
    export_crossings_csv(crossings, csv_path)
    print(f"wrote {csv_path} ({len(crossings)} crossings)")
    if not args.no_figures:
        uv = np.array(
            [cfg.plane.project(c.point.to_array()) for c in crossings]
        ).reshape(-1, 2)
        print(f"wrote {plots.plot_section_scatter(uv, f'{out}/section.png')}")
    return 0


def cmd_trap(args) -> int:
    cfg = _resolve_config(args)
    out = cfg.ensure_out_dir()
    if cfg.system != "rossler":
        raise ConfigError("trap runs on the rossler system")
    if cfg.quad is None:
        raise ConfigError("trap needs a quadrilateral (config [quad] or --quad)")
    rhs = cfg.make_rhs()
    result = verify_trapping(
        cfg.quad,
        cfg.plane,
        rhs,
        cfg.integrator_config(),
        points_per_edge=cfg.points_per_edge,
        k=cfg.iters,
    )
    report_path = f"{out}/report.json"
    result.report.to_json(report_path)
    with open(f"{out}/seeds.csv", "w", newline="") as fh:
        fh.write("x_hat,y_hat\n")
        for u, v in result.seeds:
            fh.write(f"{float(u)!r},{float(v)!r}\n")
    export_clouds_csv(result.clouds, f"{out}/clouds.csv")
    verdict = "verified" if result.report.passes() else "NOT verified"
    print(f"wrote {report_path} (trapping {verdict})")
    if not args.no_figures:
        print(
            "wrote "
            + plots.plot_trap_overlay(
                result.seeds, result.clouds, cfg.quad.as_array(), f"{out}/trap.png"
            )
        )
    return 0


def _model_params_from_config(values: dict) -> GahModelParams:
    """Build planar-model parameters from flat key-value config entries."""
    kw = {}
    scalars = ("lambda_v", "lambda_h", "fold_squeeze", "cap_line", "cap_center_y")
    for key in scalars:
        if key in values:
            kw[key] = float(values[key])
    defaults = GahModelParams()
    if "fold_center_x" in values or "fold_center_y" in values:
        kw["fold_center"] = (
            float(values.get("fold_center_x", defaults.fold_center[0])),
            float(values.get("fold_center_y", defaults.fold_center[1])),
        )
    if "translate_x" in values or "translate_y" in values:
        kw["translate"] = (
            float(values.get("translate_x", defaults.translate[0])),
            float(values.get("translate_y", defaults.translate[1])),
        )
    try:
        return GahModelParams(**kw)
    except ValueError as exc:
        raise ConfigError(f"bad gah_model params: {exc}") from exc


def cmd_gah_demo(args) -> int:
    cfg = _resolve_config(args)
    out = cfg.ensure_out_dir()
    if cfg.system == "gah_model":
        params = _model_params_from_config(cfg.params)
        region = RectRegion()
        clouds = iterate_region(params, region, n=cfg.iters, grid=cfg.grid_n)
        export_region_clouds_csv(clouds, f"{out}/model_clouds.csv")
        star = check_star(params, region)
        star_path = f"{out}/star.json"
        with open(star_path, "w") as fh:
            json.dump(
                {
                    "holds": star.holds,
                    "fixed_point": list(map(float, star.fixed_point)),
                    "witness": list(map(float, star.witness)),
                    "max_image_x": star.max_image_x,
                },
                fh,
                indent=2,
                sort_keys=True,
            )
            fh.write("\n")
        print(f"wrote {out}/model_clouds.csv and {star_path} (star holds: {star.holds})")
        if not args.no_figures:
            print(f"wrote {plots.plot_model_clouds(clouds, region, f'{out}/gah_model.png')}")
        return 0

    square = TransversalSquare()
    seeds = square.grid(cfg.grid_n)
    icfg = default_gah_config()
    from dataclasses import replace as _rp

    icfg = _rp(icfg, rel_tol=cfg.rel_tol, max_step=cfg.max_step)
    result = gah_poincare_image(seeds, icfg)
    export_rz_csv(result.seeds, f"{out}/gah_seeds.csv")
    export_rz_csv(result.images, f"{out}/gah_images.csv")
    margins = result.margins(square)
    print(
        f"wrote {out}/gah_seeds.csv and {out}/gah_images.csv "
        f"(min interior margin {np.nanmin(margins):.4f}, failures {len(result.failed)})"
    )
    if not args.no_figures:
        print(
            "wrote "
            + plots.plot_gah_demo(result.seeds, result.images, square, f"{out}/gah_demo.png")
        )
    return 0


def cmd_serve(args) -> int:
    import os

    import uvicorn

    from .service import create_app

    port = args.port or int(os.environ.get("GAHKIT_PORT", "8710"))
    app = create_app(compute_timeout=args.timeout)
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except GahkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
