/**
 * The five figure kinds, each reading only the published file contracts of a
 * run directory: steady.csv / steady_summary.json, diagnostics.csv /
 * summary.json, check_report.json. Nothing is recomputed; geometry comes from
 * parsed values and every displayed number is a verbatim file token.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { CsvTable, PlotkitError, parseCsv, requireColumns, unknownColumns } from "./csv.js";
import { rawToken } from "./jsontext.js";
import { Bar, barChart, color, lineChart } from "./svg.js";

export const FIGURE_KINDS = [
  "steady-profile", "energy-trace", "virial-trace", "decay-curves",
  "admissibility-margins",
] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface Figure {
  kind: FigureKind;
  svg: string;
  warnings: string[];
}

const DIAG_KNOWN: (string | RegExp)[] = [
  "t", "E", "I", "dIdt_fd", "dIdt_formula", "H1w_v1", "L2w_v2", "sech_cross",
  "cum_integral", /^local_/, "sech_cross_fd", "sech_cross_rate",
  "orbital_norm", "even_part",
];

function readText(runDir: string, name: string): string {
  const p = path.join(runDir, name);
  if (!fs.existsSync(p)) {
    throw new PlotkitError(`${p}: input file not found`);
  }
  return fs.readFileSync(p, "utf-8");
}

function diagnostics(runDir: string): { table: CsvTable; warnings: string[] } {
  const table = parseCsv(readText(runDir, "diagnostics.csv"),
                         path.join(runDir, "diagnostics.csv"));
  requireColumns(table, ["t", "E", "I", "dIdt_fd", "dIdt_formula", "H1w_v1",
                         "L2w_v2", "sech_cross", "cum_integral"]);
  const unknown = unknownColumns(table, DIAG_KNOWN);
  const warnings = unknown.length
    ? [`ignoring unknown diagnostics columns: ${unknown.join(", ")}`]
    : [];
  return { table, warnings };
}

function endTokens(table: CsvTable, col: string): { min: string; max: string } {
  const vals = table.cols.get(col)!;
  const raw = table.rawCols.get(col)!;
  let iMin = 0;
  let iMax = 0;
  vals.forEach((v, i) => {
    if (Number.isFinite(v)) {
      if (!Number.isFinite(vals[iMin]) || v < vals[iMin]) iMin = i;
      if (!Number.isFinite(vals[iMax]) || v > vals[iMax]) iMax = i;
    }
  });
  return { min: raw[iMin], max: raw[iMax] };
}

export function steadyProfile(runDir: string): Figure {
  const table = parseCsv(readText(runDir, "steady.csv"),
                         path.join(runDir, "steady.csv"));
  requireColumns(table, ["y", "U", "U_prime", "residual"]);
  const summaryText = readText(runDir, "steady_summary.json");
  const y = table.cols.get("y")!;
  const U = table.cols.get("U")!;
  const Up = table.cols.get("U_prime")!;
  const xi = Number(rawToken(summaryText, ["xi"]) ?? "0");
  const kTok = rawToken(summaryText, ["decay_check", "k"]);
  const cTok = rawToken(summaryText, ["decay_check", "sup_weighted_U"]);
  const series = [
    { label: "U(y)", x: y, y: U, color: color(0) },
    { label: "U'(y)", x: y, y: Up, color: color(1) },
  ];
  const annotations: { label: string; token: string }[] = [];
  if (kTok !== null && cTok !== null) {
    const k = Number(kTok);
    const C = Number(cTok);
    if (Number.isFinite(k) && Number.isFinite(C) && C > 0) {
      const env = y.map((v) => xi + C * Math.exp(-k * Math.abs(v)));
      const envLo = y.map((v) => xi - C * Math.exp(-k * Math.abs(v)));
      series.push({ label: "envelope", x: y, y: env, color: "#888",
                    dash: "4 3" } as never);
      series.push({ label: "", x: y, y: envLo, color: "#888",
                    dash: "4 3" } as never);
      annotations.push({ label: "envelope C =", token: cTok });
      annotations.push({ label: "rate k =", token: kTok });
    }
  }
  const ey = endTokens(table, "y");
  const svg = lineChart({
    title: "steady profile", xLabel: "y", yLabel: "U",
    series, annotations,
    endLabels: { xMin: ey.min, xMax: ey.max },
  });
  return { kind: "steady-profile", svg, warnings: [] };
}

export function energyTrace(runDir: string): Figure {
  const { table, warnings } = diagnostics(runDir);
  const t = table.cols.get("t")!;
  const E = table.cols.get("E")!;
  const et = endTokens(table, "E");
  const svg = lineChart({
    title: "energy trace", xLabel: "t", yLabel: "E",
    series: [{ label: "E(t)", x: t, y: E, color: color(0) }],
    endLabels: { xMin: endTokens(table, "t").min,
                 xMax: endTokens(table, "t").max,
                 yMin: et.min, yMax: et.max },
  });
  return { kind: "energy-trace", svg, warnings };
}

export function virialTrace(runDir: string): Figure {
  const { table, warnings } = diagnostics(runDir);
  const t = table.cols.get("t")!;
  const svg = lineChart({
    title: "virial functional and its rate", xLabel: "t", yLabel: "value",
    series: [
      { label: "I(t)", x: t, y: table.cols.get("I")!, color: color(0) },
      { label: "dI/dt formula", x: t, y: table.cols.get("dIdt_formula")!,
        color: color(1) },
      { label: "dI/dt centered fd", x: t, y: table.cols.get("dIdt_fd")!,
        color: color(2), dash: "5 3" },
    ],
    endLabels: { xMin: endTokens(table, "t").min,
                 xMax: endTokens(table, "t").max },
  });
  return { kind: "virial-trace", svg, warnings };
}

export function decayCurves(runDir: string): Figure {
  const { table, warnings } = diagnostics(runDir);
  const t = table.cols.get("t")!;
  const localCols = table.header.filter((h) => h.startsWith("local_"));
  if (localCols.length === 0) {
    throw new PlotkitError(`${table.path}: missing required column "local_*"`);
  }
  let summaryText: string | null = null;
  try {
    summaryText = readText(runDir, "summary.json");
  } catch {
    warnings.push("summary.json not found: floor line omitted");
  }
  const series = localCols.map((c, i) => ({
    label: c, x: t, y: table.cols.get(c)!, color: color(i),
  }));
  const annotations: { label: string; token: string }[] = [];
  if (summaryText !== null) {
    for (const c of localCols) {
      const tok = rawToken(summaryText, ["intervals", c, "decay_factor"]);
      if (tok !== null) annotations.push({ label: `${c} decay`, token: tok });
    }
  }
  const top = lineChart({
    title: "local norms", xLabel: "t", yLabel: "||v||_I", logY: true,
    series, annotations,
    endLabels: { xMin: endTokens(table, "t").min,
                 xMax: endTokens(table, "t").max },
  });

  const H1w = table.cols.get("H1w_v1")!;
  const rate = table.cols.get("dIdt_formula")!.map((v) => -v);
  const scatterSeries = [{ label: "(-dI/dt) vs ||v1||^2", x: H1w, y: rate,
                           color: color(0), scatter: true }];
  const floorAnn: { label: string; token: string }[] = [];
  if (summaryText !== null) {
    const floorTok = rawToken(summaryText, ["floor"]);
    if (floorTok !== null && Number.isFinite(Number(floorTok))) {
      const floor = Number(floorTok);
      const xmax = Math.max(...H1w.filter(Number.isFinite));
      scatterSeries.push({ label: "floor line", x: [0, xmax],
                           y: [0, floor * xmax], color: color(1),
                           scatter: false } as never);
      floorAnn.push({ label: "floor", token: floorTok });
    }
  }
  const bottom = lineChart({
    title: "rate coercivity", xLabel: "||v1||^2_H1w", yLabel: "-dI/dt",
    series: scatterSeries, annotations: floorAnn,
  });
  const svg = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="660" height="760" viewBox="0 0 660 760">`,
    `<g>`, top, `</g>`,
    `<g transform="translate(0 380)">`, bottom, `</g>`,
    `</svg>`,
  ].join("\n");
  return { kind: "decay-curves", svg, warnings };
}

export function admissibilityMargins(runDir: string): Figure {
  const text = readText(runDir, "check_report.json");
  const parsed = JSON.parse(text) as { checks?: Record<string, unknown> };
  if (!parsed.checks || Object.keys(parsed.checks).length === 0) {
    throw new PlotkitError(`${path.join(runDir, "check_report.json")}: no checks recorded`);
  }
  const bars: Bar[] = [];
  for (const name of Object.keys(parsed.checks)) {
    const tok = rawToken(text, ["checks", name, "worst_margin"]);
    if (tok !== null) {
      bars.push({ label: name, value: Number(tok), rawValue: tok });
      continue;
    }
    // the decay check reports a fitted rate instead of a margin
    const kTok = rawToken(text, ["checks", name, "k"]);
    if (kTok !== null) {
      bars.push({ label: `${name} (rate)`, value: Number(kTok), rawValue: kTok });
    }
  }
  if (bars.length === 0) {
    throw new PlotkitError("check_report.json has no margin values");
  }
  return { kind: "admissibility-margins",
           svg: barChart("admissibility margins (worst per check)", bars),
           warnings: [] };
}

const BUILDERS: Record<FigureKind, (runDir: string) => Figure> = {
  "steady-profile": steadyProfile,
  "energy-trace": energyTrace,
  "virial-trace": virialTrace,
  "decay-curves": decayCurves,
  "admissibility-margins": admissibilityMargins,
};

export function buildFigure(kind: FigureKind, runDir: string): Figure {
  return BUILDERS[kind](runDir);
}
