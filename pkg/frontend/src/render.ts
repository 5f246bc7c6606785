#!/usr/bin/env node
/**
 * Render a figure from rydpump CSV outputs.
 *
 * Usage:
 *   node dist/render.js --figure fig3b \
 *     --in fig3_master.csv,fig3_boundaries.csv,fig3_boundary_grid.csv \
 *     --out fig3b.svg
 */

import { writeFileSync } from "fs";

import { loadCsv } from "./csv";
import { FIGURES, FigureName, expectedInputs, renderFigure } from "./figures";

function parseArgs(argv: string[]): { figure: FigureName; inputs: string[]; out: string } {
  let figure: string | undefined;
  let inputs: string[] = [];
  let out: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--figure":
        figure = argv[++i];
        break;
      case "--in":
        inputs = (argv[++i] ?? "").split(",").filter((s) => s.length > 0);
        break;
      case "--out":
        out = argv[++i];
        break;
      default:
        throw new Error(`unknown argument: ${argv[i]}`);
    }
  }
  if (!figure || !(FIGURES as readonly string[]).includes(figure)) {
    throw new Error(`--figure must be one of: ${FIGURES.join(", ")}`);
  }
  if (inputs.length === 0) {
    throw new Error(`--in is required (${expectedInputs(figure as FigureName)})`);
  }
  if (!out) throw new Error("--out is required");
  return { figure: figure as FigureName, inputs, out };
}

export function main(argv: string[]): number {
  try {
    const { figure, inputs, out } = parseArgs(argv);
    const tables = inputs.map(loadCsv);
    const svg = renderFigure(figure, tables);
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
