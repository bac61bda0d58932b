export type Direction = "ascending" | "descending" | "both";
export type Axis = "x" | "y" | "z";

export interface PlaneState {
  angle: number;
  axis: Axis;
  coord: 1 | 2 | 3;
  value: number;
  direction: Direction;
}

export interface RunState {
  tSpan: [number, number];
  initialState: [number, number, number];
  relTol: number;
  absTol: number;
  maxStep: number;
  pointsPerEdge: number;
  iters: number;
  gridN: number;
}

export type Vertex = [number, number];

export interface IterationStats {
  returned: number;
  inside: number;
  escaped: number;
  no_return: number;
  min_margin: number;
}

export interface TrapReport {
  total_seeds: number;
  trapping_verified: boolean;
  per_iteration: IterationStats[];
}

export interface TrapResult {
  report: TrapReport;
  seeds: Vertex[];
  clouds: Vertex[][];
}

export interface ExplorerState {
  system: string;
  params: Record<string, number>;
  plane: PlaneState;
  quad: Vertex[] | null;
  quadValid: boolean;
  run: RunState;
  scatter: number[][] | null; // rows [t, x_hat, y_hat, z_hat]
  trap: TrapResult | null;
  busy: { section: boolean; trap: boolean };
  reqIds: { section: number; trap: number };
  error: string | null;
}
