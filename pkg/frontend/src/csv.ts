import { readFileSync } from "fs";
import Papa from "papaparse";

/** The exact header the experiment harness writes. */
export const RECORD_HEADER = [
  "experiment",
  "m",
  "trial",
  "out_dim",
  "out_values",
  "dE",
  "df",
  "dmu",
  "diag",
  "wall_ms",
] as const;

export interface TrialRow {
  experiment: string;
  m: number;
  trial: number;
  outDim: number;
  outValues: number[];
  dE: number | null;
  df: number | null;
  dmu: number | null;
  diag: number | null;
  wallMs: number | null;
}

function numOrNull(cell: string, path: string, column: string, line: number): number | null {
  if (cell === "" || cell === undefined) return null;
  const v = Number(cell);
  if (!Number.isFinite(v)) {
    throw new Error(`${path}:${line}: column '${column}' is not numeric: '${cell}'`);
  }
  return v;
}

/** Parse a records CSV, enforcing the exact harness header. */
export function parseRecords(path: string): TrialRow[] {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new Error(`${path}: ${parsed.errors[0].message}`);
  }
  const lines = parsed.data;
  if (lines.length === 0) {
    throw new Error(`${path}: empty file, expected the record header`);
  }
  const header = lines[0];
  for (const column of RECORD_HEADER) {
    if (!header.includes(column)) {
      throw new Error(`${path}: missing column '${column}'`);
    }
  }
  if (header.length !== RECORD_HEADER.length) {
    const extra = header.filter((h) => !(RECORD_HEADER as readonly string[]).includes(h));
    throw new Error(`${path}: unexpected column(s) ${extra.join(", ")}`);
  }
  const rows: TrialRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i];
    if (cells.length === 1 && cells[0] === "") continue;
    if (cells.length !== RECORD_HEADER.length) {
      throw new Error(`${path}:${i + 1}: expected ${RECORD_HEADER.length} cells, got ${cells.length}`);
    }
    rows.push({
      experiment: cells[0],
      m: Number(cells[1]),
      trial: Number(cells[2]),
      outDim: Number(cells[3]),
      outValues: cells[4].split(";").map(Number),
      dE: numOrNull(cells[5], path, "dE", i + 1),
      df: numOrNull(cells[6], path, "df", i + 1),
      dmu: numOrNull(cells[7], path, "dmu", i + 1),
      diag: numOrNull(cells[8], path, "diag", i + 1),
      wallMs: numOrNull(cells[9], path, "wall_ms", i + 1),
    });
  }
  if (rows.length === 0) {
    throw new Error(`${path}: no rows`);
  }
  return rows;
}

/** File stem, used as the default series label. */
export function stem(path: string): string {
  const base = path.split(/[\\/]/).pop() ?? path;
  return base.replace(/\.[^.]+$/, "");
}
