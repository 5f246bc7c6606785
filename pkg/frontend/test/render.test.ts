import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { parseCsv } from "../src/csv";
import { renderFigure } from "../src/figures";

const FIX = join(__dirname, "..", "fixtures");

function load(name: string) {
  return parseCsv(readFileSync(join(FIX, name), "utf8"));
}

describe("figure rendering from pinned fixtures", () => {
  it("renders the fidelity contour", () => {
    const svg = renderFigure("fig2a", [load("fig2a.csv")]);
    expect(svg).toContain("<svg");
    expect((svg.match(/<rect/g) ?? []).length).toBeGreaterThan(40);
    expect(svg).toContain("class=\"ridge\"");
  });

  it("renders the four-site dynamics trace with a bounded fidelity axis", () => {
    const svg = renderFigure("fig2b", [load("fig2b.csv")]);
    expect(svg).toContain("class=\"fidelity\"");
    expect(svg).toContain("class=\"concurrence\"");
  });

  it("renders the six-site dynamics trace", () => {
    const svg = renderFigure("fig3a", [load("fig3_master.csv")]);
    expect(svg).toContain("class=\"fidelity\"");
  });

  it("renders the witness plane with three boundaries and ordered crossings", () => {
    const svg = renderFigure("fig3b", [
      load("fig3_master.csv"),
      load("fig3_boundaries.csv"),
      load("fig3_boundary_grid.csv"),
    ]);
    expect(svg).toContain("class=\"boundary-1\"");
    expect(svg).toContain("class=\"boundary-2\"");
    expect(svg).toContain("class=\"boundary-3\"");
    expect(svg).toContain("class=\"trajectory\"");
    const crossings = svg.match(/class="crossing-\d"/g) ?? [];
    expect(crossings.length).toBe(3);
  });

  it("renders the scaling scatter with dashed tier lines", () => {
    const svg = renderFigure("fig4", [load("fig4.csv"), load("fig4_boundaries.csv")]);
    expect(svg).toContain("class=\"scan-point\"");
    expect(svg).toContain("stroke-dasharray");
    expect(svg).toContain("20-partite");
  });

  it("renders the dressed-decay series", () => {
    const svg = renderFigure("bloch", [load("bloch.csv")]);
    expect(svg).toContain("class=\"population\"");
  });

  it("is deterministic for identical inputs", () => {
    const a = renderFigure("fig2b", [load("fig2b.csv")]);
    const b = renderFigure("fig2b", [load("fig2b.csv")]);
    expect(a).toBe(b);
  });
});

describe("schema validation", () => {
  it("rejects a header mismatch", () => {
    const bad = parseCsv("t,wrong\n0,1\n");
    expect(() => renderFigure("fig2b", [bad])).toThrow(/expected/);
  });

  it("rejects the wrong number of inputs", () => {
    expect(() => renderFigure("fig3b", [load("fig3_master.csv")])).toThrow(
      /needs 3 input/,
    );
  });

  it("rejects a boundary table inconsistent with its grid", () => {
    const grid = parseCsv("y_c\n0.1\n");
    expect(() =>
      renderFigure("fig3b", [load("fig3_master.csv"), load("fig3_boundaries.csv"), grid]),
    ).toThrow(/curve columns/);
  });
});

describe("geometry sanity", () => {
  function allCoords(svg: string): number[] {
    const out: number[] = [];
    for (const m of svg.matchAll(/points="([^"]+)"/g)) {
      for (const pair of m[1].split(" ")) {
        const [x, y] = pair.split(",").map(Number);
        out.push(x, y);
      }
    }
    for (const m of svg.matchAll(/c[xy]="([-\d.e]+)"/g)) out.push(Number(m[1]));
    return out;
  }

  it("keeps every plotted element inside the canvas", () => {
    const figures: Array<[string, string[]]> = [
      ["fig2a", ["fig2a.csv"]],
      ["fig2b", ["fig2b.csv"]],
      ["fig3a", ["fig3_master.csv"]],
      ["fig3b", ["fig3_master.csv", "fig3_boundaries.csv", "fig3_boundary_grid.csv"]],
      ["fig4", ["fig4.csv", "fig4_boundaries.csv"]],
      ["bloch", ["bloch.csv"]],
    ];
    for (const [name, files] of figures) {
      const svg = renderFigure(name as never, files.map(load));
      for (const v of allCoords(svg)) {
        expect(Number.isFinite(v)).toBe(true);
        expect(v).toBeGreaterThanOrEqual(-1);
        expect(v).toBeLessThanOrEqual(641);
      }
    }
  });
});
