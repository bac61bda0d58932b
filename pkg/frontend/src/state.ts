import { isSimpleQuad } from "./geometry.js";
import { parseConfig } from "./preset.js";
import type { ExplorerState, TrapResult, Vertex } from "./types.js";

/**
 * Explorer state and its pure update functions.  One request may be in
 * flight per action category; every request gets an id, and responses that
 * arrive after a newer request started are discarded by id mismatch.
 */

export function initialState(): ExplorerState {
  return {
    system: "rossler",
    params: { a: 0.2, b: 0.1, c: 10.0 },
    plane: {
      angle: (2 * Math.PI) / 5,
      axis: "z",
      coord: 3,
      value: 5.0,
      direction: "both",
    },
    quad: null,
    quadValid: true,
    run: {
      tSpan: [0.0, 1000.0],
      initialState: [0.0, 1.0, 0.0],
      relTol: 1e-9,
      absTol: 1e-9,
      maxStep: 0.05,
      pointsPerEdge: 1000,
      iters: 1,
      gridN: 20,
    },
    scatter: null,
    trap: null,
    busy: { section: false, trap: false },
    reqIds: { section: 0, trap: 0 },
    error: null,
  };
}

export function loadPresetText(state: ExplorerState, text: string): ExplorerState {
  const cfg = parseConfig(text);
  return {
    ...state,
    system: cfg.system,
    params: cfg.params,
    plane: cfg.plane,
    quad: cfg.quad,
    quadValid: cfg.quad === null ? true : isSimpleQuad(cfg.quad),
    run: cfg.run,
    scatter: null,
    trap: null,
    error: null,
  };
}

export function setAngle(state: ExplorerState, angle: number): ExplorerState {
  return { ...state, plane: { ...state.plane, angle } };
}

export function setCut(state: ExplorerState, value: number): ExplorerState {
  return { ...state, plane: { ...state.plane, value } };
}

export function setDirection(
  state: ExplorerState,
  direction: ExplorerState["plane"]["direction"],
): ExplorerState {
  return { ...state, plane: { ...state.plane, direction } };
}

export function setIters(state: ExplorerState, iters: number): ExplorerState {
  const k = Math.max(1, Math.round(iters)); // invariant: k >= 1
  return { ...state, run: { ...state.run, iters: k } };
}

export function setPointsPerEdge(state: ExplorerState, n: number): ExplorerState {
  return { ...state, run: { ...state.run, pointsPerEdge: Math.max(0, Math.round(n)) } };
}

export function moveQuadVertex(
  state: ExplorerState,
  index: number,
  to: Vertex,
): ExplorerState {
  if (state.quad === null) return state;
  const quad = state.quad.map((v, i) => (i === index ? to : v)) as Vertex[];
  return { ...state, quad, quadValid: isSimpleQuad(quad) };
}

export function beginRequest(
  state: ExplorerState,
  category: "section" | "trap",
): { state: ExplorerState; id: number } {
  const id = state.reqIds[category] + 1;
  return {
    state: {
      ...state,
      busy: { ...state.busy, [category]: true },
      reqIds: { ...state.reqIds, [category]: id },
      error: null,
    },
    id,
  };
}

function isCurrent(state: ExplorerState, category: "section" | "trap", id: number): boolean {
  return state.reqIds[category] === id;
}

export function applyScatter(
  state: ExplorerState,
  id: number,
  points: number[][],
): ExplorerState {
  if (!isCurrent(state, "section", id)) return state; // stale response
  return { ...state, scatter: points, busy: { ...state.busy, section: false } };
}

export function applyTrap(
  state: ExplorerState,
  id: number,
  result: TrapResult,
): ExplorerState {
  if (!isCurrent(state, "trap", id)) return state; // stale response
  return { ...state, trap: result, busy: { ...state.busy, trap: false } };
}

export function applyError(
  state: ExplorerState,
  category: "section" | "trap",
  id: number,
  message: string,
): ExplorerState {
  if (!isCurrent(state, category, id)) return state;
  return {
    ...state,
    error: message,
    busy: { ...state.busy, [category]: false },
  };
}
