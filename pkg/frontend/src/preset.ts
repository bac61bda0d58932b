import { pyFloatRepr } from "./pyfloat.js";
import type { ExplorerState, PlaneState, RunState, Vertex } from "./types.js";

/**
 * Render the explorer state as a config file, byte-compatible with the CLI's
 * canonical writer: fixed section order, fixed key order, Python float repr.
 */
export function renderConfig(state: ExplorerState): string {
  const lines: string[] = ["[system]", `name = ${state.system}`];
  for (const key of Object.keys(state.params).sort()) {
    lines.push(`${key} = ${pyFloatRepr(state.params[key])}`);
  }
  const p = state.plane;
  lines.push(
    "",
    "[plane]",
    `angle = ${pyFloatRepr(p.angle)}`,
    `axis = ${p.axis}`,
    `coord = ${p.coord}`,
    `value = ${pyFloatRepr(p.value)}`,
    `direction = ${p.direction}`,
  );
  if (state.quad !== null) {
    const verts = state.quad
      .map(([x, y]) => `${pyFloatRepr(x)},${pyFloatRepr(y)}`)
      .join(":");
    lines.push("", "[quad]", `vertices = ${verts}`);
  }
  const r = state.run;
  lines.push(
    "",
    "[run]",
    `t_span = ${pyFloatRepr(r.tSpan[0])},${pyFloatRepr(r.tSpan[1])}`,
    `initial_state = ${r.initialState.map(pyFloatRepr).join(",")}`,
    `rel_tol = ${pyFloatRepr(r.relTol)}`,
    `abs_tol = ${pyFloatRepr(r.absTol)}`,
    `max_step = ${pyFloatRepr(r.maxStep)}`,
    `points_per_edge = ${r.pointsPerEdge}`,
    `iters = ${r.iters}`,
    `grid_n = ${r.gridN}`,
    "",
  );
  return lines.join("\n");
}

interface Sections {
  [name: string]: Record<string, string>;
}

function parseIni(text: string): Sections {
  const out: Sections = {};
  let current: Record<string, string> | null = null;
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim();
    if (!line || line.startsWith("#") || line.startsWith(";")) continue;
    const head = line.match(/^\[(.+)\]$/);
    if (head) {
      current = out[head[1]] = out[head[1]] ?? {};
      continue;
    }
    const kv = line.match(/^([^=]+)=(.*)$/);
    if (kv && current) {
      current[kv[1].trim()] = kv[2].trim();
    }
  }
  return out;
}

function parseQuad(text: string): Vertex[] {
  const pairs = text.split(":").map((part) => {
    const nums = part.split(",").map(Number);
    if (nums.length !== 2 || nums.some((v) => !Number.isFinite(v))) {
      throw new Error(`bad quad vertex '${part}'`);
    }
    return [nums[0], nums[1]] as Vertex;
  });
  if (pairs.length !== 4) throw new Error("quad needs exactly 4 vertices");
  return pairs;
}

/** Parse a config file into the pieces of explorer state it determines. */
export function parseConfig(text: string): {
  system: string;
  params: Record<string, number>;
  plane: PlaneState;
  quad: Vertex[] | null;
  run: RunState;
} {
  const sec = parseIni(text);
  const system = sec.system?.name ?? "rossler";
  const params: Record<string, number> = {};
  for (const [k, v] of Object.entries(sec.system ?? {})) {
    if (k !== "name") params[k] = Number(v);
  }
  const planeSec = sec.plane ?? {};
  const plane: PlaneState = {
    angle: Number(planeSec.angle ?? (2 * Math.PI) / 5),
    axis: (planeSec.axis ?? "z") as PlaneState["axis"],
    coord: Number(planeSec.coord ?? 3) as PlaneState["coord"],
    value: Number(planeSec.value ?? 5),
    direction: (planeSec.direction ?? "both") as PlaneState["direction"],
  };
  const quad = sec.quad?.vertices ? parseQuad(sec.quad.vertices) : null;
  const runSec = sec.run ?? {};
  const span = (runSec.t_span ?? "0.0,1000.0").split(",").map(Number);
  const x0 = (runSec.initial_state ?? "0.0,1.0,0.0").split(",").map(Number);
  const run: RunState = {
    tSpan: [span[0], span[1]],
    initialState: [x0[0], x0[1], x0[2]],
    relTol: Number(runSec.rel_tol ?? 1e-9),
    absTol: Number(runSec.abs_tol ?? 1e-9),
    maxStep: Number(runSec.max_step ?? 0.05),
    pointsPerEdge: Number(runSec.points_per_edge ?? 1000),
    iters: Number(runSec.iters ?? 1),
    gridN: Number(runSec.grid_n ?? 20),
  };
  return { system, params, plane, quad, run };
}
