// Dashboard wiring: sliders and drop-downs drive the marginal and slice
// views through debounced, latest-wins requests; clicking the slice chart
// picks a target and asks the server which input reaches it best.

import {
  ALPHA_CHOICES,
  DEFAULT_ALPHAS,
  ViewState,
  initialState,
  marginalQuery,
  quantileKeys,
  sliceQuery,
  withPair,
  withWeight,
} from "./state.js";
import { Channel, DecideResponse, MarginalResponse, Meta, SliceResponse, getMeta, postDecide } from "./api.js";
import {
  SliceView,
  buildMarginalView,
  buildSliceView,
  nearestIndex,
  targetFromSliceVertex,
} from "./charts.js";
import { debounce } from "./debounce.js";

const BASE = "";
const DEBOUNCE_MS = 100;
const SLICE_W = 520;
const SLICE_H = 440;
const MARGINAL_W = 640;
const MARGINAL_H = 320;

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

class Dashboard {
  private state: ViewState;
  private readonly marginalChannel = new Channel(BASE);
  private readonly sliceChannel = new Channel(BASE);
  private lastSlice: SliceResponse | null = null;
  private lastSliceView: SliceView | null = null;
  private readonly refreshDebounced = debounce(() => void this.refresh(), DEBOUNCE_MS);

  constructor(
    private readonly meta: Meta,
    private readonly root: HTMLElement,
  ) {
    this.state = initialState(meta.M);
    this.buildControls();
    void this.refresh();
  }

  private buildControls(): void {
    const controls = el("div", { class: "controls" });
    this.meta.labels.forEach((label, idx) => {
      const row = el("div", { class: "slider-row" });
      row.appendChild(el("label", {}, label));
      const slider = el("input", {
        type: "range",
        min: "0.01",
        max: "0.99",
        step: "0.01",
        value: "0.5",
        "data-index": String(idx),
      });
      slider.addEventListener("input", () => {
        this.state = withWeight(this.state, idx, Number(slider.value));
        this.refreshDebounced();
      });
      row.appendChild(slider);
      controls.appendChild(row);
    });

    const pairRow = el("div", { class: "pair-row" });
    const selects: HTMLSelectElement[] = [];
    (["first axis", "second axis"] as const).forEach((name, which) => {
      pairRow.appendChild(el("label", {}, name));
      const select = el("select", { "data-which": String(which) });
      this.meta.labels.forEach((label, idx) => {
        const opt = el("option", { value: String(idx) }, label);
        if (idx === this.state.pair[which]) opt.setAttribute("selected", "selected");
        select.appendChild(opt);
      });
      select.addEventListener("change", () => {
        const i = Number(selects[0].value);
        const j = Number(selects[1].value);
        this.state = withPair(this.state, i, j);
        selects[0].value = String(this.state.pair[0]);
        selects[1].value = String(this.state.pair[1]);
        this.refreshDebounced();
      });
      selects.push(select);
      pairRow.appendChild(select);
    });
    controls.appendChild(pairRow);

    const alphaRow = el("div", { class: "alpha-row" });
    alphaRow.appendChild(el("label", {}, "band"));
    const alphaSelect = el("select", {});
    ALPHA_CHOICES.filter((a) => a < 0.5).forEach((a) => {
      const label = `${a} / ${1 - a}`;
      const opt = el("option", { value: String(a) }, label);
      if (a === DEFAULT_ALPHAS[0]) opt.setAttribute("selected", "selected");
      alphaSelect.appendChild(opt);
    });
    alphaSelect.addEventListener("change", () => {
      const a = Number(alphaSelect.value);
      this.state = { ...this.state, alphas: [a, Number((1 - a).toFixed(6))] };
      this.refreshDebounced();
    });
    alphaRow.appendChild(alphaSelect);
    controls.appendChild(alphaRow);

    this.root.appendChild(controls);
    this.root.appendChild(el("div", { id: "marginal-chart", class: "chart" }));
    this.root.appendChild(el("div", { id: "slice-chart", class: "chart" }));
    const panel = el("div", { id: "decide-panel" });
    panel.appendChild(
      el(
        "p",
        { class: "hint" },
        this.meta.has_table_source
          ? "click the slice to pick a target and find the best input"
          : "input decisions disabled: ensemble has no objective-table source",
      ),
    );
    this.root.appendChild(panel);
  }

  private async refresh(): Promise<void> {
    const [qLow, qHigh] = quantileKeys(this.state.alphas);
    try {
      const marginal = await this.marginalChannel.get<MarginalResponse>(
        `/marginal?${marginalQuery(this.state)}`,
      );
      this.renderMarginal(marginal, qLow, qHigh);
    } catch (err) {
      if (!(err instanceof DOMException && err.name === "AbortError")) {
        this.showError("marginal", err);
      }
    }
    if (this.meta.M >= 3) {
      try {
        const slice = await this.sliceChannel.get<SliceResponse>(`/slice?${sliceQuery(this.state)}`);
        this.lastSlice = slice;
        this.renderSlice(slice, qLow, qHigh);
      } catch (err) {
        if (!(err instanceof DOMException && err.name === "AbortError")) {
          this.showError("slice", err);
        }
      }
    }
  }

  private showError(which: string, err: unknown): void {
    const target = document.getElementById(`${which}-chart`);
    if (target) target.textContent = `${which} request failed: ${String(err)}`;
  }

  private renderMarginal(res: MarginalResponse, qLow: string, qHigh: string): void {
    const view = buildMarginalView(
      res,
      this.meta.labels,
      this.meta.bounds.lower,
      this.meta.bounds.upper,
      qLow,
      qHigh,
      MARGINAL_W,
      MARGINAL_H,
    );
    const svg = svgEl("svg", {
      width: String(MARGINAL_W),
      height: String(MARGINAL_H),
      viewBox: `0 0 ${MARGINAL_W} ${MARGINAL_H}`,
    });
    view.axes.forEach((axis) => {
      svg.appendChild(
        svgEl("line", {
          x1: String(axis.x),
          x2: String(axis.x),
          y1: "20",
          y2: String(MARGINAL_H - 20),
          class: "axis",
        }),
      );
      const text = svgEl("text", { x: String(axis.x), y: "14", class: "axis-label" });
      text.textContent = axis.label;
      svg.appendChild(text);
    });
    svg.appendChild(svgEl("path", { d: view.bandPathD, class: "band" }));
    svg.appendChild(svgEl("path", { d: view.meanPath, class: "mean-line" }));
    const holder = document.getElementById("marginal-chart");
    if (holder) {
      holder.replaceChildren(svg);
    }
  }

  private renderSlice(res: SliceResponse, qLow: string, qHigh: string): void {
    const view = buildSliceView(res, qLow, qHigh, SLICE_W, SLICE_H);
    this.lastSliceView = view;
    const svg = svgEl("svg", {
      width: String(SLICE_W),
      height: String(SLICE_H),
      viewBox: `0 0 ${SLICE_W} ${SLICE_H}`,
    });
    svg.appendChild(svgEl("path", { d: view.bandPathD, class: "band" }));
    svg.appendChild(svgEl("path", { d: view.meanPath, class: "mean-line" }));
    if (this.meta.has_table_source) {
      svg.addEventListener("click", (event) => {
        const rect = (svg as unknown as SVGGraphicsElement).getBoundingClientRect();
        void this.pickTarget(event.clientX - rect.left, event.clientY - rect.top);
      });
    }
    const holder = document.getElementById("slice-chart");
    if (holder) {
      holder.replaceChildren(svg);
      const [i, j] = this.state.pair;
      holder.appendChild(
        el(
          "p",
          { class: "caption" },
          `slice ${this.meta.labels[i]} vs ${this.meta.labels[j]}; fixed-direction norm ${Math.hypot(
            ...res.v,
          ).toFixed(3)}`,
        ),
      );
      holder.appendChild(this.traceMini(res));
    }
  }

  // mini parallel-coordinates of the fixed components, so the viewer sees
  // how the off-slice coordinates drift along the polyline
  private traceMini(res: SliceResponse): HTMLElement {
    const holder = el("div", { class: "trace-mini" });
    const fixed = res.polylines["mean"].fixed_raw;
    if (fixed.length === 0 || fixed[0].length === 0) return holder;
    const width = 220;
    const height = 120;
    const svg = svgEl("svg", { width: String(width), height: String(height) });
    const cols = fixed[0].length;
    for (let c = 0; c < cols; c += 1) {
      const series = fixed.map((row) => row[c]);
      const lo = Math.min(...series);
      const hi = Math.max(...series);
      const span = hi - lo || 1;
      const pts = series.map(
        (value, idx) =>
          [
            10 + (idx * (width - 20)) / Math.max(1, series.length - 1),
            height - 12 - ((value - lo) / span) * (height - 24),
          ] as [number, number],
      );
      svg.appendChild(
        svgEl("path", {
          d: pts.map(([x, y], idx) => `${idx === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`).join(""),
          class: "trace-line",
        }),
      );
    }
    holder.appendChild(el("p", { class: "caption" }, "fixed components along the slice"));
    holder.appendChild(svg);
    return holder;
  }

  private async pickTarget(x: number, y: number): Promise<void> {
    if (!this.lastSlice || !this.lastSliceView) return;
    const vertex = nearestIndex(this.lastSliceView.points, x, y);
    const target = targetFromSliceVertex(this.lastSlice, vertex, this.meta.M);
    this.state = { ...this.state, target };
    const panel = document.getElementById("decide-panel");
    try {
      const decision: DecideResponse = await postDecide(BASE, target);
      if (panel) {
        panel.replaceChildren(
          el("p", {}, `target ${target.map((v) => v.toFixed(3)).join(", ")}`),
          el("p", { class: "decision" }, `best input: ${decision.input_id} (loss ${decision.loss.toExponential(2)})`),
          el(
            "p",
            { class: "caption" },
            `sampled outcomes of ${decision.input_id}: ${decision.samples
              .slice(0, 3)
              .map((s) => `[${s.map((v) => v.toFixed(2)).join(", ")}]`)
              .join(" ")}${decision.samples.length > 3 ? " …" : ""}`,
          ),
        );
      }
    } catch (err) {
      if (panel) panel.replaceChildren(el("p", { class: "error" }, `decide failed: ${String(err)}`));
    }
  }
}

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  try {
    const meta = await getMeta(BASE);
    root.replaceChildren();
    new Dashboard(meta, root);
  } catch (err) {
    root.textContent = `failed to load metadata: ${String(err)}`;
  }
}

void start();
