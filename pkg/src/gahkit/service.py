"""Local HTTP JSON API: simulate/section/iterate/trap for the explorer UI.

Requests are fully validated before any computation (validation failures
return 400), integration failures return 422, and long computations are
cut off by a configurable timeout (504).  Every request's computation is
independent, so concurrent identical requests return identical payloads.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutTimeout

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .dynsys import IntegratorConfig, RosslerParams, State3, integrate, make_rossler_rhs
from .errors import GahkitError, NonFiniteState, StepSizeUnderflow
from .gah_model import GahModelParams
from .section import SectionPlane, find_crossings, iterate_map_batch
from .trapping import Quadrilateral, verify_trapping

__all__ = ["create_app"]

DEFAULT_PORT = 8710


class PlaneSpec(BaseModel):
    angle: float
    axis: str = "z"
    coord: int = Field(default=3, ge=1, le=3)
    value: float
    direction: str = "both"

    def to_plane(self) -> SectionPlane:
        return SectionPlane(
            rotation_angle=self.angle,
            rotation_axis=self.axis,
            cut_coord=self.coord,
            cut_value=self.value,
            direction=self.direction,
        )


class SectionRequest(BaseModel):
    system: str = "rossler"
    params: dict[str, float] | None = None
    angle: float
    cut: float
    direction: str = "both"
    t_span: tuple[float, float] = (0.0, 1000.0)
    initial_state: tuple[float, float, float] = (0.0, 1.0, 0.0)
    rel_tol: float = Field(default=1e-9, gt=0)
    abs_tol: float = Field(default=1e-9, gt=0)
    max_step: float = Field(default=0.05, gt=0)


class TrapRequest(BaseModel):
    system: str = "rossler"
    params: dict[str, float] | None = None
    plane: PlaneSpec
    quad: list[tuple[float, float]] = Field(min_length=4, max_length=4)
    iters: int = Field(ge=1, le=16)
    points_per_edge: int = Field(ge=0)
    t_span: tuple[float, float] = (0.0, 1000.0)
    rel_tol: float = Field(default=1e-9, gt=0)
    abs_tol: float = Field(default=1e-9, gt=0)
    max_step: float = Field(default=0.05, gt=0)


class IterateRequest(BaseModel):
    system: str = "rossler"
    params: dict[str, float] | None = None
    plane: PlaneSpec
    seeds: list[tuple[float, float]] = Field(min_length=1)
    k: int = Field(ge=1, le=64)
    t_span: tuple[float, float] = (0.0, 1000.0)
    rel_tol: float = Field(default=1e-9, gt=0)
    abs_tol: float = Field(default=1e-9, gt=0)
    max_step: float = Field(default=0.05, gt=0)


def _rossler_rhs(params: dict | None):
    p = RosslerParams(**params) if params else RosslerParams()
    return make_rossler_rhs(p)


def _validation_message(exc: RequestValidationError) -> str:
    first = exc.errors()[0]
    loc = ".".join(str(p) for p in first.get("loc", ()))
    return f"{loc}: {first.get('msg', 'invalid')}"


def create_app(compute_timeout: float = 120.0, points_cap: int = 1000) -> FastAPI:
    """Build the API app; computations run in a worker pool with a timeout."""
    app = FastAPI(title="gahkit service", version="0.1.0")
    pool = ThreadPoolExecutor(max_workers=max(2, (os.cpu_count() or 2)))

    origins = os.environ.get(
        "GAHKIT_UI_ORIGIN", "http://localhost:5173,http://127.0.0.1:5173"
    ).split(",")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[o.strip() for o in origins if o.strip()],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def on_validation(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": _validation_message(exc)})

    def run(fn):
        fut = pool.submit(fn)
        try:
            return fut.result(timeout=compute_timeout)
        except FutTimeout:
            fut.cancel()
            raise

    def guard(fn):
        """Map compute outcomes onto the API's status-code contract."""
        try:
            return run(fn)
        except FutTimeout:
            return JSONResponse(status_code=504, content={"error": "compute timeout"})
        except (StepSizeUnderflow, NonFiniteState, GahkitError) as exc:
            return JSONResponse(
                status_code=422, content={"error": f"{type(exc).__name__}: {exc}"}
            )
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/systems")
    def systems():
        return {
            "systems": [
                {
                    "name": "rossler",
                    "params": {"a": 0.2, "b": 0.1, "c": 10.0},
                    "kind": "flow",
                },
                {"name": "gah_system", "params": {}, "kind": "flow"},
                {
                    "name": "gah_model",
                    "params": {
                        "lambda_v": GahModelParams().lambda_v,
                        "lambda_h": GahModelParams().lambda_h,
                    },
                    "kind": "map",
                },
            ],
            "defaults": {
                "plane": {
                    "angle": 2 * math.pi / 5,
                    "axis": "z",
                    "coord": 3,
                    "value": 5.0,
                    "direction": "both",
                }
            },
        }

    @app.post("/section")
    def section(req: SectionRequest):
        if req.system != "rossler":
            return JSONResponse(
                status_code=400, content={"error": "section supports system 'rossler'"}
            )

        def work():
            rhs = _rossler_rhs(req.params)
            cfg = IntegratorConfig(
                rel_tol=req.rel_tol,
                abs_tol=req.abs_tol,
                max_step=req.max_step,
                t_span=req.t_span,
                initial_state=State3(*req.initial_state),
            )
            plane = SectionPlane(
                rotation_angle=req.angle,
                cut_value=req.cut,
                direction=req.direction,
            )
            traj = integrate(rhs, cfg)
            crossings = find_crossings(traj, plane, refine="dense_bisection")
            return {
                "points": [
                    [c.t, c.point.x, c.point.y, c.point.z] for c in crossings
                ],
                "request": req.model_dump(),
            }

        return guard(work)

    @app.post("/trap")
    def trap(req: TrapRequest):
        if req.system != "rossler":
            return JSONResponse(
                status_code=400, content={"error": "trap supports system 'rossler'"}
            )
        if req.points_per_edge > points_cap:
            return JSONResponse(
                status_code=400,
                content={"error": f"points_per_edge exceeds cap {points_cap}"},
            )

        def work():
            rhs = _rossler_rhs(req.params)
            quad = Quadrilateral(tuple(req.quad))
            cfg = IntegratorConfig(
                rel_tol=req.rel_tol,
                abs_tol=req.abs_tol,
                max_step=req.max_step,
                t_span=req.t_span,
            )
            result = verify_trapping(
                quad,
                req.plane.to_plane(),
                rhs,
                cfg,
                points_per_edge=req.points_per_edge,
                k=req.iters,
            )
            return {
                "report": result.report.to_dict(),
                "seeds": result.seeds.tolist(),
                "clouds": [c.tolist() for c in result.clouds],
                "request": req.model_dump(),
            }

        return guard(work)

    @app.post("/iterate")
    def iterate(req: IterateRequest):
        if req.system != "rossler":
            return JSONResponse(
                status_code=400, content={"error": "iterate supports system 'rossler'"}
            )

        def work():
            rhs = _rossler_rhs(req.params)
            cfg = IntegratorConfig(
                rel_tol=req.rel_tol,
                abs_tol=req.abs_tol,
                max_step=req.max_step,
                t_span=req.t_span,
            )
            plane = req.plane.to_plane()
            batch = iterate_map_batch(np.asarray(req.seeds), plane, rhs, cfg, req.k)
            planar = batch.planar(plane)
            orbits = []
            for j in range(len(req.seeds)):
                n = int(batch.counts[j])
                orbits.append(planar[:n, j, :].tolist())
            return {
                "orbits": orbits,
                "counts": batch.counts.tolist(),
                "flight_times": [
                    [
                        float(batch.flights[i, j])
                        for i in range(int(batch.counts[j]))
                    ]
                    for j in range(len(req.seeds))
                ],
                "request": req.model_dump(),
            }

        return guard(work)

    return app


def main() -> None:
    import uvicorn

    port = int(os.environ.get("GAHKIT_PORT", str(DEFAULT_PORT)))
    uvicorn.run(create_app(), host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
