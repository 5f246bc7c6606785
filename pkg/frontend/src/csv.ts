import { readFileSync } from "fs";

export interface Table {
  header: string[];
  rows: number[][];
}

/** Parse a numeric CSV; "nan" cells become NaN. */
export function parseCsv(text: string): Table {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length < 1) throw new Error("empty CSV");
  const header = lines[0].split(",").map((s) => s.trim());
  const rows = lines.slice(1).map((line) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`row width ${cells.length} != header width ${header.length}`);
    }
    return cells.map((c) => {
      const t = c.trim().toLowerCase();
      if (t === "nan" || t === "") return NaN;
      if (t === "edges" || t === "pattern_zeros") return t === "edges" ? 0 : 1;
      const v = Number(c);
      if (Number.isNaN(v)) throw new Error(`non-numeric cell: ${c}`);
      return v;
    });
  });
  return { header, rows };
}

export function loadCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"));
}

/**
 * Reject inputs whose header row does not match the documented scenario
 * columns.  `spec` entries ending in "*" match any column with that prefix
 * (used by the boundary tables, whose curve columns are enumerated).
 */
export function checkSchema(table: Table, spec: string[], name: string): void {
  const fixed = spec.filter((s) => !s.endsWith("*"));
  const prefixes = spec.filter((s) => s.endsWith("*")).map((s) => s.slice(0, -1));
  for (let i = 0; i < fixed.length; i++) {
    if (table.header[i] !== fixed[i]) {
      throw new Error(
        `${name}: column ${i} is "${table.header[i]}", expected "${fixed[i]}"`,
      );
    }
  }
  const rest = table.header.slice(fixed.length);
  if (prefixes.length === 0) {
    if (rest.length > 0) {
      throw new Error(`${name}: unexpected trailing columns ${rest.join(",")}`);
    }
    return;
  }
  for (const col of rest) {
    if (!prefixes.some((p) => col.startsWith(p))) {
      throw new Error(`${name}: unexpected column "${col}"`);
    }
  }
}

export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) throw new Error(`missing column "${name}"`);
  return table.rows.map((r) => r[idx]);
}
