import { Table, checkSchema, column } from "./csv";
import {
  Frame, Svg, drawFrame, heatColor, linearScale, logScale, ticksLinear,
  xTicksLog,
} from "./svg";

export const FIGURES = ["fig2a", "fig2b", "fig3a", "fig3b", "fig4", "bloch"] as const;
export type FigureName = (typeof FIGURES)[number];

const WIDTH = 640;
const HEIGHT = 440;
const FRAME: Frame = { x0: 70, x1: WIDTH - 30, y0: 40, y1: HEIGHT - 60 };

const TIER_COLORS = ["#7b3fb3", "#2f8f4e", "#c93434"];

function finitePairs(xs: number[], ys: number[]): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  for (let i = 0; i < xs.length; i++) {
    if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) out.push([xs[i], ys[i]]);
  }
  return out;
}

function inputCount(name: FigureName): number {
  return name === "fig3b" ? 3 : name === "fig4" ? 2 : 1;
}

export function expectedInputs(name: FigureName): string {
  switch (name) {
    case "fig3b":
      return "dynamics CSV, boundary-table CSV, boundary-grid CSV";
    case "fig4":
      return "scaling CSV, tier-table CSV";
    default:
      return "one scenario CSV";
  }
}

// --- individual figures ------------------------------------------------------

function figContour(table: Table): string {
  checkSchema(table, ["xi", "a0_over_db", "f*"], "fig2a");
  const fCol = table.header[2];
  const xi = column(table, "xi");
  const a0 = column(table, "a0_over_db");
  const f = column(table, fCol);
  const xs = [...new Set(xi)].sort((a, b) => a - b);
  const ys = [...new Set(a0)].sort((a, b) => a - b);
  const sx = linearScale(xs[0], xs[xs.length - 1], FRAME.x0, FRAME.x1);
  const sy = linearScale(ys[0], ys[ys.length - 1], FRAME.y1, FRAME.y0);
  const dx = (FRAME.x1 - FRAME.x0) / Math.max(xs.length - 1, 1);
  const dy = (FRAME.y1 - FRAME.y0) / Math.max(ys.length - 1, 1);
  const svg = new Svg(WIDTH, HEIGHT);
  for (let i = 0; i < xi.length; i++) {
    svg.rect(sx(xi[i]) - dx / 2, sy(a0[i]) - dy / 2, dx, dy, heatColor(f[i]));
  }
  // contour-style emphasis of the high-fidelity ridge
  for (let i = 0; i < xi.length; i++) {
    if (f[i] >= 0.99) svg.circle(sx(xi[i]), sy(a0[i]), 2.5, "#ffffff", "ridge");
  }
  drawFrame(svg, FRAME, "aspect ratio", "spacing / blockade radius",
            `stationary ${fCol} over the interaction plane`);
  ticksLinear(svg, FRAME, sx, xs[0], xs[xs.length - 1], "x");
  ticksLinear(svg, FRAME, sy, ys[0], ys[ys.length - 1], "y");
  return svg.toString();
}

function figDynamics(table: Table, fidCol: string, name: string): string {
  const t = column(table, "t");
  const fid = column(table, fidCol);
  const tPos = t.map((v) => Math.max(v, 1e-2));
  const sx = logScale(1e-2, Math.max(...t), FRAME.x0, FRAME.x1);
  const sy = linearScale(0, 1, FRAME.y1, FRAME.y0);
  const svg = new Svg(WIDTH, HEIGHT);
  svg.polyline(finitePairs(tPos.map(sx), fid.map(sy)), "#1f5fbf", 2, undefined,
               "fidelity");
  if (table.header.includes("concurrence")) {
    const c = column(table, "concurrence");
    svg.polyline(finitePairs(tPos.map(sx), c.map(sy)), "#c93434", 2, "6,3",
                 "concurrence");
    svg.text(FRAME.x1 - 10, FRAME.y0 + 34, "concurrence", 11, "end", "#c93434");
  }
  svg.text(FRAME.x1 - 10, FRAME.y0 + 18, fidCol, 11, "end", "#1f5fbf");
  drawFrame(svg, FRAME, "pumping time", "fidelity", name);
  xTicksLog(svg, FRAME, sx, 1e-2, Math.max(...t));
  ticksLinear(svg, FRAME, sy, 0, 1, "y");
  return svg.toString();
}

function boundaryCurves(boundaries: Table, grid: Table):
    { y: number[]; tiers: Map<number, number[]> } {
  checkSchema(boundaries, ["k_minus_1", "delta_b_zero", "ambiguous", "delta_b_yc_*"],
              "boundaries");
  checkSchema(grid, ["y_c"], "boundary grid");
  const y = column(grid, "y_c");
  const curveCols = boundaries.header.filter((h) => h.startsWith("delta_b_yc_"));
  if (curveCols.length !== y.length) {
    throw new Error(
      `boundary table has ${curveCols.length} curve columns for ${y.length} grid points`,
    );
  }
  const tiers = new Map<number, number[]>();
  for (const row of boundaries.rows) {
    const k = row[0];
    tiers.set(k, curveCols.map((_, i) => row[3 + i]));
  }
  return { y, tiers };
}

function figWitnessPlane(traj: Table, boundaries: Table, grid: Table): string {
  checkSchema(traj, ["t", "f4", "delta", "y_c", "p0", "p1", "p_ge2"], "fig3b");
  const { y, tiers } = boundaryCurves(boundaries, grid);
  const yLo = Math.min(...y);
  const yHi = Math.max(...y);
  const sx = logScale(yLo, yHi, FRAME.x0, FRAME.x1);
  const sy = linearScale(0, 0.8, FRAME.y1, FRAME.y0);
  const svg = new Svg(WIDTH, HEIGHT);

  for (const tier of [1, 2, 3]) {
    const curve = tiers.get(tier);
    if (!curve) throw new Error(`boundary table missing tier ${tier}`);
    const pts = finitePairs(y.map(sx), curve.map(sy));
    svg.polyline(pts, TIER_COLORS[tier - 1], 1.6, "7,4", `boundary-${tier}`);
    svg.text(FRAME.x0 + 8, sy(curve[0]) - 4, `depth ${tier + 1}`, 10, "start",
             TIER_COLORS[tier - 1]);
  }

  const t = column(traj, "t");
  const yc = column(traj, "y_c");
  const delta = column(traj, "delta");
  const clampedY = yc.map((v) => (Number.isFinite(v) ? Math.min(Math.max(v, yLo), yHi) : NaN));
  svg.polyline(finitePairs(clampedY.map(sx), delta.map(sy)), "#111111", 2,
               undefined, "trajectory");

  // entry markers: first permanently certified sample per tier
  const interp = (yq: number, curve: number[]) => {
    const lq = Math.log10(Math.min(Math.max(yq, yLo), yHi));
    for (let i = 1; i < y.length; i++) {
      if (lq <= Math.log10(y[i])) {
        const f = (lq - Math.log10(y[i - 1])) /
          (Math.log10(y[i]) - Math.log10(y[i - 1]));
        return curve[i - 1] + f * (curve[i] - curve[i - 1]);
      }
    }
    return curve[curve.length - 1];
  };
  const crossT: number[] = [];
  for (const tier of [1, 2, 3]) {
    const curve = tiers.get(tier)!;
    const certified = t.map((_, i) =>
      Number.isFinite(yc[i]) && delta[i] < interp(yc[i], curve));
    let idx = -1;
    if (certified[certified.length - 1]) {
      let lastBad = -1;
      certified.forEach((c, i) => {
        if (!c) lastBad = i;
      });
      idx = lastBad + 1 < t.length ? lastBad + 1 : -1;
    }
    if (idx >= 0) {
      crossT.push(t[idx]);
      svg.circle(sx(clampedY[idx]), sy(delta[idx]), 5, TIER_COLORS[tier - 1],
                 `crossing-${tier}`);
    }
  }
  if (crossT.length === 3 && !(crossT[0] <= crossT[1] && crossT[1] <= crossT[2])) {
    throw new Error(`crossings out of time order: ${crossT.join(", ")}`);
  }

  drawFrame(svg, FRAME, "higher-order statistic y_c", "projector variance",
            "certification plane with producibility boundaries");
  xTicksLog(svg, FRAME, sx, yLo, yHi);
  ticksLinear(svg, FRAME, sy, 0, 0.8, "y");
  return svg.toString();
}

function figScaling(scan: Table, tiers: Table): string {
  checkSchema(scan, ["n", "xi", "family", "n_dark", "k", "delta", "k_min",
                     "pattern_match", "reservoir_rule"], "fig4");
  checkSchema(tiers, ["k_minus_1", "delta_b_zero", "ambiguous"], "fig4 tiers");
  const n = column(scan, "n");
  const delta = column(scan, "delta");
  const matched = column(scan, "pattern_match");
  const nMax = Math.max(...n);
  const sx = linearScale(0, nMax * 1.05, FRAME.x0, FRAME.x1);
  const sy = linearScale(0, 1, FRAME.y1, FRAME.y0);
  const svg = new Svg(WIDTH, HEIGHT);

  const tierK = column(tiers, "k_minus_1");
  const tierV = column(tiers, "delta_b_zero");
  for (let k = 20; k <= tierK.length; k += 20) {
    const idx = tierK.indexOf(k - 1);
    if (idx < 0) continue;
    const yv = sy(tierV[idx]);
    svg.line(FRAME.x0, yv, FRAME.x1, yv, "#888888", 1, "5,4");
    svg.text(FRAME.x1 - 4, yv - 4, `${k}-partite`, 9, "end", "#666");
  }
  for (let i = 0; i < n.length; i++) {
    if (matched[i] > 0 && Number.isFinite(delta[i])) {
      svg.circle(sx(n[i]), sy(delta[i]), 4, "#1f5fbf", "scan-point");
    }
  }
  drawFrame(svg, FRAME, "chain length", "projector variance",
            "dark-state witness value against producibility tiers");
  ticksLinear(svg, FRAME, sx, 0, nMax * 1.05, "x");
  ticksLinear(svg, FRAME, sy, 0, 1, "y");
  return svg.toString();
}

function figBloch(table: Table): string {
  checkSchema(table, ["t", "re_sigma_ge", "im_sigma_ge", "re_sigma_gr",
                      "im_sigma_gr", "population"], "bloch");
  const t = column(table, "t");
  const pop = column(table, "population");
  const re = column(table, "re_sigma_gr");
  const sx = linearScale(0, Math.max(...t), FRAME.x0, FRAME.x1);
  const sy = linearScale(0, 1, FRAME.y1, FRAME.y0);
  const svg = new Svg(WIDTH, HEIGHT);
  svg.polyline(finitePairs(t.map(sx), pop.map(sy)), "#1f5fbf", 2, undefined,
               "population");
  svg.polyline(finitePairs(t.map(sx), re.map(sy)), "#2f8f4e", 1.5, "5,3",
               "coherence");
  svg.text(FRAME.x1 - 10, FRAME.y0 + 18, "|coherence|^2", 11, "end", "#1f5fbf");
  svg.text(FRAME.x1 - 10, FRAME.y0 + 34, "Re coherence", 11, "end", "#2f8f4e");
  drawFrame(svg, FRAME, "time (bare-decay units)", "amplitude",
            "dressed-state coherence decay");
  ticksLinear(svg, FRAME, sx, 0, Math.max(...t), "x");
  ticksLinear(svg, FRAME, sy, 0, 1, "y");
  return svg.toString();
}

// --- dispatch ----------------------------------------------------------------

export function renderFigure(name: FigureName, tables: Table[]): string {
  if (tables.length !== inputCount(name)) {
    throw new Error(
      `${name} needs ${inputCount(name)} input(s): ${expectedInputs(name)}`,
    );
  }
  switch (name) {
    case "fig2a":
      return figContour(tables[0]);
    case "fig2b":
      checkSchema(tables[0], ["t", "f2", "delta", "y_c", "p0", "p1", "p_ge2",
                              "concurrence"], "fig2b");
      return figDynamics(tables[0], "f2", "pumping dynamics, four sites");
    case "fig3a":
      checkSchema(tables[0], ["t", "f4", "delta", "y_c", "p0", "p1", "p_ge2"],
                  "fig3a");
      return figDynamics(tables[0], "f4", "pumping dynamics, six sites");
    case "fig3b":
      return figWitnessPlane(tables[0], tables[1], tables[2]);
    case "fig4":
      return figScaling(tables[0], tables[1]);
    case "bloch":
      return figBloch(tables[0]);
  }
}
