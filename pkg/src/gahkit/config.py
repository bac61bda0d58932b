"""Run configuration: plain-text key-value files, presets, validation.

One config format drives the CLI, the HTTP service and the explorer UI's
preset export, so a file written by any of them reproduces the same run
byte for byte.  Sections: ``[system]``, ``[plane]``, ``[quad]`` (optional)
and ``[run]``; flags override file values.
"""
from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field, replace
from importlib import resources

from .dynsys import IntegratorConfig, RosslerParams, State3, make_rossler_rhs
from .errors import ConfigError
from .gah_system import make_gah_rhs
from .section import SectionPlane
from .trapping import Quadrilateral

__all__ = [
    "RunConfig",
    "load_config",
    "parse_config_text",
    "render_config",
    "preset_names",
    "load_preset",
    "SYSTEMS",
]

SYSTEMS = ("rossler", "gah_system", "gah_model")

_DEFAULT_PARAMS = {
    "rossler": {"a": 0.2, "b": 0.1, "c": 10.0},
    "gah_system": {},
    "gah_model": {},
}


def fmt_float(v: float) -> str:
    """Canonical float text: shortest round-trip repr."""
    return repr(float(v))


@dataclass
class RunConfig:
    """Everything one reproducible experiment needs."""

    system: str = "rossler"
    params: dict = field(default_factory=lambda: dict(_DEFAULT_PARAMS["rossler"]))
    plane: SectionPlane = field(
        default_factory=lambda: SectionPlane(
            rotation_angle=2 * math.pi / 5,
            rotation_axis="z",
            cut_coord=3,
            cut_value=5.0,
            direction="both",
        )
    )
    quad: Quadrilateral | None = None
    t_span: tuple[float, float] = (0.0, 1000.0)
    initial_state: tuple[float, float, float] = (0.0, 1.0, 0.0)
    rel_tol: float = 1e-9
    abs_tol: float = 1e-9
    max_step: float = 0.05
    points_per_edge: int = 1000
    iters: int = 1
    grid_n: int = 20
    out_dir: str = "out"

    def validate(self) -> "RunConfig":
        if self.system not in SYSTEMS:
            raise ConfigError(f"unknown system {self.system!r}; expected one of {SYSTEMS}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigError("tolerances must be positive")
        if not self.max_step > 0:
            raise ConfigError("max_step must be positive")
        t0, t1 = self.t_span
        if not (math.isfinite(t0) and math.isfinite(t1) and t1 > t0):
            raise ConfigError(f"t_span must be increasing, got {self.t_span}")
        if self.iters < 1:
            raise ConfigError("iters must be >= 1")
        if self.points_per_edge < 0:
            raise ConfigError("points_per_edge must be >= 0")
        if self.grid_n < 2:
            raise ConfigError("grid_n must be >= 2")
        if self.system == "rossler":
            try:
                RosslerParams(**self.params)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad rossler params: {exc}") from exc
        return self

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_step=self.max_step,
            t_span=self.t_span,
            initial_state=State3(*self.initial_state),
        )

    def make_rhs(self):
        if self.system == "rossler":
            return make_rossler_rhs(RosslerParams(**self.params))
        if self.system == "gah_system":
            return make_gah_rhs()
        raise ConfigError(f"system {self.system!r} does not define a flow field")

    def ensure_out_dir(self) -> str:
        try:
            os.makedirs(self.out_dir, exist_ok=True)
            probe = os.path.join(self.out_dir, ".write_probe")
            with open(probe, "w") as fh:
                fh.write("")
            os.remove(probe)
        except OSError as exc:
            raise ConfigError(f"output directory {self.out_dir!r} is not writable: {exc}")
        return self.out_dir

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


def _parse_quad(text: str) -> Quadrilateral:
    try:
        pairs = [tuple(float(x) for x in part.split(",")) for part in text.split(":")]
        if len(pairs) != 4 or any(len(p) != 2 for p in pairs):
            raise ValueError("need exactly 4 x,y pairs separated by ':'")
        return Quadrilateral(tuple(pairs))
    except ValueError as exc:
        raise ConfigError(f"bad quad {text!r}: {exc}") from exc


def _quad_text(q: Quadrilateral) -> str:
    return ":".join(f"{fmt_float(x)},{fmt_float(y)}" for x, y in q.vertices)


def parse_config_text(text: str) -> RunConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    cfg = RunConfig()
    try:
        if cp.has_section("system"):
            sec = cp["system"]
            system = sec.get("name", cfg.system)
            params = {
                k: float(v) for k, v in sec.items() if k != "name"
            }
            cfg = replace(
                cfg,
                system=system,
                params=params or dict(_DEFAULT_PARAMS.get(system, {})),
            )
        if cp.has_section("plane"):
            sec = cp["plane"]
            cfg = replace(
                cfg,
                plane=SectionPlane(
                    rotation_angle=sec.getfloat("angle", cfg.plane.rotation_angle),
                    rotation_axis=sec.get("axis", cfg.plane.rotation_axis),
                    cut_coord=sec.getint("coord", cfg.plane.cut_coord),
                    cut_value=sec.getfloat("value", cfg.plane.cut_value),
                    direction=sec.get("direction", cfg.plane.direction),
                ),
            )
        if cp.has_section("quad"):
            cfg = replace(cfg, quad=_parse_quad(cp["quad"]["vertices"]))
        if cp.has_section("run"):
            sec = cp["run"]
            if "t_span" in sec:
                a, b = (float(x) for x in sec["t_span"].split(","))
                cfg = replace(cfg, t_span=(a, b))
            if "initial_state" in sec:
                x, y, z = (float(v) for v in sec["initial_state"].split(","))
                cfg = replace(cfg, initial_state=(x, y, z))
            cfg = replace(
                cfg,
                rel_tol=sec.getfloat("rel_tol", cfg.rel_tol),
                abs_tol=sec.getfloat("abs_tol", cfg.abs_tol),
                max_step=sec.getfloat("max_step", cfg.max_step),
                points_per_edge=sec.getint("points_per_edge", cfg.points_per_edge),
                iters=sec.getint("iters", cfg.iters),
                grid_n=sec.getint("grid_n", cfg.grid_n),
            )
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    return cfg.validate()


def render_config(cfg: RunConfig) -> str:
    """Canonical text form; sections and keys in fixed order."""
    lines = ["[system]", f"name = {cfg.system}"]
    for k in sorted(cfg.params):
        lines.append(f"{k} = {fmt_float(cfg.params[k])}")
    lines += [
        "",
        "[plane]",
        f"angle = {fmt_float(cfg.plane.rotation_angle)}",
        f"axis = {cfg.plane.rotation_axis}",
        f"coord = {cfg.plane.cut_coord}",
        f"value = {fmt_float(cfg.plane.cut_value)}",
        f"direction = {cfg.plane.direction}",
    ]
    if cfg.quad is not None:
        lines += ["", "[quad]", f"vertices = {_quad_text(cfg.quad)}"]
    lines += [
        "",
        "[run]",
        f"t_span = {fmt_float(cfg.t_span[0])},{fmt_float(cfg.t_span[1])}",
        "initial_state = "
        + ",".join(fmt_float(v) for v in cfg.initial_state),
        f"rel_tol = {fmt_float(cfg.rel_tol)}",
        f"abs_tol = {fmt_float(cfg.abs_tol)}",
        f"max_step = {fmt_float(cfg.max_step)}",
        f"points_per_edge = {cfg.points_per_edge}",
        f"iters = {cfg.iters}",
        f"grid_n = {cfg.grid_n}",
        "",
    ]
    return "\n".join(lines)


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config_text(text)


def preset_names() -> list[str]:
    files = resources.files("gahkit").joinpath("presets")
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".cfg"))


def load_preset(name: str) -> RunConfig:
    files = resources.files("gahkit").joinpath("presets")
    path = files.joinpath(f"{name}.cfg")
    try:
        text = path.read_text()
    except (FileNotFoundError, OSError) as exc:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        ) from exc
    return parse_config_text(text)
