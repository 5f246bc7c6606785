/** Minimal deterministic SVG scene builder (no timestamps, fixed precision). */

export type Scale = (v: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

const fmt = (v: number) => (Math.abs(v) < 1e-12 ? "0" : v.toPrecision(6));

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       width = 1, dash?: string): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5,
           dash?: string, cls?: string): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    const c = cls ? ` class="${cls}"` : "";
    this.parts.push(
      `<polyline${c} points="${pts}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${width}"${d}/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string, cls?: string): void {
    const c = cls ? ` class="${cls}"` : "";
    this.parts.push(
      `<circle${c} cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
        `fill="${fill}"/>`,
    );
  }

  text(x: number, y: number, s: string, size = 11, anchor = "middle",
       fill = "#222"): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" ` +
        `text-anchor="${anchor}" fill="${fill}">${s}</text>`,
    );
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export interface Frame {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

export function drawFrame(svg: Svg, f: Frame, xLabel: string, yLabel: string,
                          title: string): void {
  svg.line(f.x0, f.y1, f.x1, f.y1, "#222");
  svg.line(f.x0, f.y0, f.x0, f.y1, "#222");
  svg.text((f.x0 + f.x1) / 2, f.y1 + 32, xLabel, 12);
  svg.text(f.x0 - 40, (f.y0 + f.y1) / 2, yLabel, 12);
  svg.text((f.x0 + f.x1) / 2, f.y0 - 10, title, 13);
}

export function xTicksLog(svg: Svg, f: Frame, scale: Scale, lo: number,
                          hi: number): void {
  for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi * 1.0001; e++) {
    const v = Math.pow(10, e);
    const x = scale(v);
    svg.line(x, f.y1, x, f.y1 + 4, "#222");
    svg.text(x, f.y1 + 16, `1e${e}`, 9);
  }
}

export function ticksLinear(svg: Svg, f: Frame, scale: Scale, lo: number,
                            hi: number, axis: "x" | "y", count = 5): void {
  for (let i = 0; i <= count; i++) {
    const v = lo + ((hi - lo) * i) / count;
    const p = scale(v);
    const label = Math.abs(v) >= 1000 ? v.toFixed(0) : v.toPrecision(3);
    if (axis === "x") {
      svg.line(p, f.y1, p, f.y1 + 4, "#222");
      svg.text(p, f.y1 + 16, label, 9);
    } else {
      svg.line(f.x0 - 4, p, f.x0, p, "#222");
      svg.text(f.x0 - 8, p + 3, label, 9, "end");
    }
  }
}

/** Blue-to-red map for fidelity heatmaps. */
export function heatColor(v: number): string {
  const t = Math.max(0, Math.min(1, v));
  const r = Math.round(30 + 225 * t);
  const g = Math.round(60 + 80 * Math.sin(Math.PI * t));
  const b = Math.round(255 - 225 * t);
  return `rgb(${r},${g},${b})`;
}
