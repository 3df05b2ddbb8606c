// Chart geometry as pure data transforms: scales, SVG path strings and the
// coordinate math for the parallel-coordinates and 2-D slice views. DOM
// writing stays in main.ts so everything here is unit-testable.

import type { MarginalResponse, SliceResponse } from "./api.js";

export interface Scale {
  (x: number): number;
  invert(px: number): number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  const f = ((x: number) => r0 + ((x - d0) / span) * (r1 - r0)) as Scale;
  f.invert = (px: number) => d0 + ((px - r0) / (r1 - r0)) * span;
  return f;
}

export function pathFrom(points: Array<[number, number]>): string {
  return points
    .map(([x, y], idx) => `${idx === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`)
    .join("");
}

export function bandPath(
  upper: Array<[number, number]>,
  lower: Array<[number, number]>,
): string {
  if (upper.length === 0 || lower.length === 0) return "";
  return `${pathFrom(upper)}${pathFrom(lower.slice().reverse()).replace(/^M/, "L")}Z`;
}

export interface SliceView {
  meanLengths: number[]; // the plotted projected lengths
  meanPath: string;
  bandPathD: string;
  points: Array<[number, number]>; // screen coords of the mean polyline
  raw: number[][]; // raw-unit mean points, aligned with `points`
  xScale: Scale;
  yScale: Scale;
}

export function buildSliceView(
  res: SliceResponse,
  qLow: string,
  qHigh: string,
  width: number,
  height: number,
  pad = 36,
): SliceView {
  const mean = res.polylines["mean"];
  const low = res.polylines[qLow] ?? mean;
  const high = res.polylines[qHigh] ?? mean;
  const all = mean.points_raw.concat(low.points_raw, high.points_raw);
  const xs = all.map((p) => p[0]);
  const ys = all.map((p) => p[1]);
  const xScale = linearScale(Math.min(...xs), Math.max(...xs), pad, width - pad);
  const yScale = linearScale(Math.min(...ys), Math.max(...ys), height - pad, pad);
  const project = (pts: number[][]): Array<[number, number]> =>
    pts.map((p) => [xScale(p[0]), yScale(p[1])]);
  const meanPts = project(mean.points_raw);
  return {
    meanLengths: mean.lengths,
    meanPath: pathFrom(meanPts),
    bandPathD: bandPath(project(high.points_raw), project(low.points_raw)),
    points: meanPts,
    raw: mean.points_raw,
    xScale,
    yScale,
  };
}

export function nearestIndex(points: Array<[number, number]>, x: number, y: number): number {
  let best = 0;
  let bestDist = Infinity;
  points.forEach(([px, py], idx) => {
    const d = (px - x) * (px - x) + (py - y) * (py - y);
    if (d < bestDist) {
      bestDist = d;
      best = idx;
    }
  });
  return best;
}

// Reassemble the full M-dimensional point under the slice: kept coordinates
// come from the clicked polyline vertex, the remaining ones from the
// server-reported fixed trace at the same vertex.
export function targetFromSliceVertex(res: SliceResponse, vertex: number, m: number): number[] {
  const mean = res.polylines["mean"];
  const kept = [res.i, res.j].slice().sort((a, b) => a - b);
  const complement: number[] = [];
  for (let k = 0; k < m; k += 1) if (!kept.includes(k)) complement.push(k);
  const out = new Array(m).fill(0);
  const keptPoint =
    res.i <= res.j ? mean.points_raw[vertex] : [mean.points_raw[vertex][1], mean.points_raw[vertex][0]];
  out[kept[0]] = keptPoint[0];
  out[kept[1]] = keptPoint[1];
  complement.forEach((c, idx) => {
    out[c] = mean.fixed_raw[vertex][idx];
  });
  return out;
}

export interface MarginalView {
  axes: Array<{ label: string; x: number; scale: Scale }>;
  meanPath: string;
  bandPathD: string;
}

export function buildMarginalView(
  res: MarginalResponse,
  labels: string[],
  lower: number[],
  upper: number[],
  qLow: string,
  qHigh: string,
  width: number,
  height: number,
  pad = 28,
): MarginalView {
  const m = labels.length;
  const axisX = (idx: number) => pad + (idx * (width - 2 * pad)) / Math.max(1, m - 1);
  const axes = labels.map((label, idx) => ({
    label,
    x: axisX(idx),
    scale: linearScale(lower[idx], upper[idx], height - pad, pad),
  }));
  const lineFor = (stat: string): Array<[number, number]> => {
    const entry = res.stats[stat] ?? res.stats["mean"];
    return entry.point.map((value, idx) => [axes[idx].x, axes[idx].scale(value)]);
  };
  return {
    axes,
    meanPath: pathFrom(lineFor("mean")),
    bandPathD: bandPath(lineFor(qHigh), lineFor(qLow)),
  };
}
