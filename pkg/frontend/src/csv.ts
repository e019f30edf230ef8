/**
 * CSV reader that keeps both parsed numbers (for positioning geometry) and
 * the raw cell strings (for anything displayed as text, so displayed values
 * stay byte-identical to the file).
 */

export class PlotkitError extends Error {}

export interface CsvTable {
  path: string;
  header: string[];
  /** raw cell text, row-major */
  raw: string[][];
  /** parsed columns keyed by header name */
  cols: Map<string, number[]>;
  /** raw token columns keyed by header name */
  rawCols: Map<string, string[]>;
}

export function parseCsv(text: string, path: string): CsvTable {
  const lines = text.split("\n").map((l) => l.trim()).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new PlotkitError(`${path}: empty CSV`);
  }
  const header = lines[0].split(",");
  const raw: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new PlotkitError(
        `${path}: malformed CSV: row ${i} has ${cells.length} cells, header has ${header.length}`);
    }
    raw.push(cells);
  }
  const cols = new Map<string, number[]>();
  const rawCols = new Map<string, string[]>();
  header.forEach((name, j) => {
    const parsed = raw.map((r) => Number(r[j]));
    parsed.forEach((v, i) => {
      if (Number.isNaN(v) && raw[i][j] !== "nan") {
        throw new PlotkitError(`${path}: malformed CSV: non-numeric cell "${raw[i][j]}" in column ${name}`);
      }
    });
    cols.set(name, parsed);
    rawCols.set(name, raw.map((r) => r[j]));
  });
  return { path, header, raw, cols, rawCols };
}

export function requireColumns(table: CsvTable, names: string[]): void {
  for (const name of names) {
    if (!table.cols.has(name)) {
      throw new PlotkitError(`${table.path}: missing required column "${name}"`);
    }
  }
}

export function unknownColumns(table: CsvTable, known: (string | RegExp)[]): string[] {
  return table.header.filter((h) =>
    !known.some((k) => (typeof k === "string" ? k === h : k.test(h))));
}
