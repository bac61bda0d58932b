import { ApiError, apiBase, fetchSection, fetchTrap } from "./api.js";
import { render } from "./canvas.js";
import { fitBounds, pan, screenToWorld, zoomAt } from "./geometry.js";
import type { Transform } from "./geometry.js";
import {
  buildContainmentOverlay,
  buildQuadLayer,
  buildScatterLayer,
} from "./overlay.js";
import type { DrawItem } from "./overlay.js";
import { renderConfig } from "./preset.js";
import {
  applyError,
  applyScatter,
  applyTrap,
  beginRequest,
  initialState,
  loadPresetText,
  moveQuadVertex,
  setAngle,
  setCut,
  setDirection,
  setIters,
  setPointsPerEdge,
} from "./state.js";
import { hitVertex } from "./quad.js";
import type { ExplorerState, Vertex } from "./types.js";

const FIG3 = `[system]
name = rossler
a = 0.2
b = 0.1
c = 10.0

[plane]
angle = 1.2566370614359172
axis = z
coord = 3
value = 5.0
direction = both

[quad]
vertices = -3.55,-27.0:11.91,-6.6:12.0,0.0:-8.5,3.5

[run]
t_span = 0.0,1000.0
initial_state = 0.0,1.0,0.0
rel_tol = 1e-09
abs_tol = 1e-09
max_step = 0.05
points_per_edge = 1000
iters = 1
grid_n = 20
`;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function debounce<A extends unknown[]>(fn: (...args: A) => void, ms: number) {
  let handle: number | undefined;
  return (...args: A) => {
    window.clearTimeout(handle);
    handle = window.setTimeout(() => fn(...args), ms);
  };
}

let state: ExplorerState = loadPresetText(initialState(), FIG3);
let transform: Transform | null = null;
const base = apiBase();

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

function layers(): DrawItem[][] {
  const out: DrawItem[][] = [];
  if (state.trap && state.quad) {
    out.push(buildContainmentOverlay(state.trap, state.quad).items);
  } else if (state.scatter) {
    out.push(buildScatterLayer(state.scatter));
  }
  if (state.quad) {
    out.push(buildQuadLayer(state.quad, state.quadValid));
  }
  return out;
}

function allWorldPoints(): Vertex[] {
  const pts: Vertex[] = [];
  if (state.scatter) for (const p of state.scatter) pts.push([p[1], p[2]]);
  if (state.quad) pts.push(...state.quad);
  if (state.trap) for (const c of state.trap.clouds) pts.push(...c);
  return pts;
}

function redraw(): void {
  if (!transform) {
    transform = fitBounds(allWorldPoints(), canvas.width, canvas.height);
  }
  render(ctx, canvas.width, canvas.height, transform, layers());
  renderPanel();
}

function renderPanel(): void {
  const banner = $("error-banner");
  banner.textContent = state.error ?? "";
  banner.style.display = state.error ? "block" : "none";

  $("busy").textContent = state.busy.section || state.busy.trap ? "computing..." : "";
  ($("quad-status") as HTMLElement).textContent = state.quadValid
    ? ""
    : "quadrilateral is self-intersecting";

  const report = $("report");
  if (!state.trap) {
    report.innerHTML = state.scatter
      ? `<p>${state.scatter.length} crossings` +
        (state.scatter.length === 0 ? " - try another angle or cut" : "") +
        "</p>"
      : "<p>no results yet</p>";
    return;
  }
  const rep = state.trap.report;
  const rows = rep.per_iteration
    .map(
      (s, i) =>
        `<tr><td>${i + 1}</td><td>${s.returned}</td><td>${s.inside}</td>` +
        `<td>${s.escaped}</td><td>${s.no_return}</td>` +
        `<td>${s.min_margin.toFixed(4)}</td></tr>`,
    )
    .join("");
  report.innerHTML =
    `<p>trapping ${rep.trapping_verified ? "VERIFIED" : "NOT verified"} ` +
    `(${rep.total_seeds} seeds)</p>` +
    `<table><tr><th>iter</th><th>returned</th><th>inside</th><th>escaped</th>` +
    `<th>no return</th><th>min margin</th></tr>${rows}</table>`;
}

async function runSection(): Promise<void> {
  const begun = beginRequest(state, "section");
  state = begun.state;
  renderPanel();
  try {
    const points = await fetchSection(base, state);
    state = applyScatter(state, begun.id, points);
    transform = null; // refit to the new scatter
  } catch (err) {
    const msg = err instanceof ApiError ? err.message : String(err);
    state = applyError(state, "section", begun.id, msg);
  }
  redraw();
}

async function runContainment(): Promise<void> {
  if (!state.quad || !state.quadValid) {
    state = { ...state, error: "fix the quadrilateral before running" };
    renderPanel();
    return;
  }
  const begun = beginRequest(state, "trap");
  state = begun.state;
  renderPanel();
  try {
    const result = await fetchTrap(base, state);
    state = applyTrap(state, begun.id, result);
  } catch (err) {
    const msg = err instanceof ApiError ? err.message : String(err);
    state = applyError(state, "trap", begun.id, msg);
  }
  redraw();
}

const debouncedSection = debounce(runSection, 300);

function wireControls(): void {
  const angle = $("angle") as HTMLInputElement;
  const angleNum = $("angle-num") as HTMLInputElement;
  const cut = $("cut") as HTMLInputElement;
  const direction = $("direction") as HTMLSelectElement;
  const iters = $("iters") as HTMLInputElement;
  const ppe = $("ppe") as HTMLInputElement;

  const sync = () => {
    angle.value = String(state.plane.angle);
    angleNum.value = state.plane.angle.toFixed(4);
    cut.value = String(state.plane.value);
    direction.value = state.plane.direction;
    iters.value = String(state.run.iters);
    ppe.value = String(state.run.pointsPerEdge);
  };
  sync();

  angle.addEventListener("input", () => {
    state = setAngle(state, Number(angle.value));
    angleNum.value = state.plane.angle.toFixed(4);
    debouncedSection();
  });
  angleNum.addEventListener("change", () => {
    state = setAngle(state, Number(angleNum.value));
    angle.value = String(state.plane.angle);
    debouncedSection();
  });
  cut.addEventListener("change", () => {
    state = setCut(state, Number(cut.value));
    debouncedSection();
  });
  direction.addEventListener("change", () => {
    state = setDirection(state, direction.value as ExplorerState["plane"]["direction"]);
    debouncedSection();
  });
  iters.addEventListener("change", () => {
    state = setIters(state, Number(iters.value));
    iters.value = String(state.run.iters);
  });
  ppe.addEventListener("change", () => {
    state = setPointsPerEdge(state, Number(ppe.value));
    ppe.value = String(state.run.pointsPerEdge);
  });

  $("run-section").addEventListener("click", () => void runSection());
  $("run-trap").addEventListener("click", () => void runContainment());
  $("load-fig3").addEventListener("click", () => {
    state = loadPresetText(state, FIG3);
    transform = null;
    sync();
    redraw();
  });
  $("export").addEventListener("click", () => {
    const text = renderConfig(state);
    const blob = new Blob([text], { type: "text/plain" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "explorer.cfg";
    a.click();
    URL.revokeObjectURL(a.href);
  });
}

function wireCanvas(): void {
  let dragVertex = -1;
  let panning = false;
  let last: Vertex = [0, 0];

  canvas.addEventListener("mousedown", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const sx = ev.clientX - rect.left;
    const sy = ev.clientY - rect.top;
    if (state.quad && transform) {
      dragVertex = hitVertex(state.quad, transform, sx, sy);
    }
    if (dragVertex < 0) {
      panning = true;
    }
    last = [sx, sy];
  });
  canvas.addEventListener("mousemove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const sx = ev.clientX - rect.left;
    const sy = ev.clientY - rect.top;
    if (dragVertex >= 0 && transform) {
      state = moveQuadVertex(state, dragVertex, screenToWorld(transform, [sx, sy]));
      redraw();
    } else if (panning && transform) {
      transform = pan(transform, sx - last[0], sy - last[1]);
      redraw();
    }
    last = [sx, sy];
  });
  window.addEventListener("mouseup", () => {
    dragVertex = -1;
    panning = false;
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    if (!transform) return;
    const rect = canvas.getBoundingClientRect();
    const factor = ev.deltaY < 0 ? 1.15 : 1 / 1.15;
    transform = zoomAt(transform, factor, ev.clientX - rect.left, ev.clientY - rect.top);
    redraw();
  });
}

wireControls();
wireCanvas();
redraw();
void runSection();
