// View state and its pure mapping onto server queries.
// The same state must always produce the same query string: the server is
// the single source of truth and the UI never recomputes statistics.

export interface ViewState {
  weights: number[]; // one slider weight per objective, clamped to (0.01, 0.99)
  pair: [number, number]; // kept indices for the 2-D slice, distinct
  alphas: number[]; // quantile band levels shown
  target: number[] | null; // chosen target point in raw units, if any
}

export const WEIGHT_MIN = 0.01;
export const WEIGHT_MAX = 0.99;
export const ALPHA_CHOICES = [0.05, 0.25, 0.5, 0.75, 0.95];
export const DEFAULT_ALPHAS: [number, number] = [0.05, 0.95];

export function clampWeight(w: number): number {
  if (Number.isNaN(w)) return 0.5;
  return Math.min(WEIGHT_MAX, Math.max(WEIGHT_MIN, w));
}

export function initialState(m: number): ViewState {
  if (m < 2) throw new Error("need at least two objectives");
  return {
    weights: new Array(m).fill(0.5),
    pair: [0, 1],
    alphas: [...DEFAULT_ALPHAS],
    target: null,
  };
}

export function withWeight(state: ViewState, index: number, value: number): ViewState {
  const weights = state.weights.slice();
  weights[index] = clampWeight(value);
  return { ...state, weights };
}

export function withPair(state: ViewState, i: number, j: number): ViewState {
  if (i === j) return state; // distinct indices invariant: ignore the no-op
  return { ...state, pair: [i, j] };
}

function fmt(x: number): string {
  // fixed formatting keeps the state -> query mapping a pure function
  return Number(x.toFixed(6)).toString();
}

export function marginalQuery(state: ViewState): string {
  const weights = state.weights.map(fmt).join(",");
  const alphas = state.alphas.map(fmt).join(",");
  return `weights=${weights}&alphas=${alphas}`;
}

export function sliceQuery(state: ViewState, subK = 181): string {
  const [i, j] = state.pair;
  const weights = state.weights.map(fmt).join(",");
  const alphas = state.alphas.map(fmt).join(",");
  return `i=${i}&j=${j}&weights=${weights}&alphas=${alphas}&sub_k=${subK}`;
}

export function quantileKeys(alphas: number[]): string[] {
  // the server names quantile stats q<alpha> with trailing zeros trimmed
  return alphas.map((a) => `q${Number(a.toFixed(6))}`);
}
