import type { ExplorerState, TrapResult } from "./types.js";

/** Thin JSON client for the local compute service. */

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

const DEFAULT_BASE = "http://127.0.0.1:8710";

export function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("api") ?? DEFAULT_BASE;
}

async function post(base: string, path: string, body: unknown): Promise<any> {
  let resp: Response;
  try {
    resp = await fetch(`${base}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  } catch (err) {
    throw new ApiError(0, `service unreachable: ${String(err)}`);
  }
  const payload = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    const detail = payload?.error ?? payload?.detail ?? resp.statusText;
    throw new ApiError(resp.status, `${resp.status}: ${JSON.stringify(detail)}`);
  }
  return payload;
}

export function sectionRequestBody(state: ExplorerState) {
  return {
    system: state.system,
    params: state.params,
    angle: state.plane.angle,
    cut: state.plane.value,
    direction: state.plane.direction,
    t_span: state.run.tSpan,
    initial_state: state.run.initialState,
    rel_tol: state.run.relTol,
    abs_tol: state.run.absTol,
    max_step: state.run.maxStep,
  };
}

export function trapRequestBody(state: ExplorerState) {
  return {
    system: state.system,
    params: state.params,
    plane: {
      angle: state.plane.angle,
      axis: state.plane.axis,
      coord: state.plane.coord,
      value: state.plane.value,
      direction: state.plane.direction,
    },
    quad: state.quad,
    iters: state.run.iters,
    points_per_edge: state.run.pointsPerEdge,
    t_span: state.run.tSpan,
    rel_tol: state.run.relTol,
    abs_tol: state.run.absTol,
    max_step: state.run.maxStep,
  };
}

export async function fetchSection(
  base: string,
  state: ExplorerState,
): Promise<number[][]> {
  const payload = await post(base, "/section", sectionRequestBody(state));
  return payload.points as number[][];
}

export async function fetchTrap(base: string, state: ExplorerState): Promise<TrapResult> {
  const payload = await post(base, "/trap", trapRequestBody(state));
  return {
    report: payload.report,
    seeds: payload.seeds,
    clouds: payload.clouds,
  };
}
