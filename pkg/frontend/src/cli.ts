/**
 * plotkit --run DIR [--only KIND] [--out DIR]
 *
 * Renders figure_<kind>.svg files and summary.html from a vcfield run
 * directory. Read-only on the run data; outputs default to <run>/report.
 * Exit codes mirror the producer: 0 ok, 1 rendering failure, 2 usage error.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { PlotkitError } from "./csv.js";
import { FIGURE_KINDS, Figure, FigureKind, buildFigure } from "./figures.js";
import { renderSummary } from "./html.js";

interface Args {
  run: string;
  only: FigureKind | null;
  out: string | null;
}

function parseArgs(argv: string[]): Args {
  let run: string | null = null;
  let only: string | null = null;
  let out: string | null = null;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--run") run = argv[++i] ?? null;
    else if (argv[i] === "--only") only = argv[++i] ?? null;
    else if (argv[i] === "--out") out = argv[++i] ?? null;
    else throw new PlotkitError(`unknown argument: ${argv[i]}`);
  }
  if (run === null) throw new PlotkitError("--run DIR is required");
  if (only !== null && !FIGURE_KINDS.includes(only as FigureKind)) {
    throw new PlotkitError(
      `unknown figure kind ${only}; known: ${FIGURE_KINDS.join(", ")}`);
  }
  return { run, only: only as FigureKind | null, out };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error(`usage error: ${(e as Error).message}`);
    return 2;
  }
  if (!fs.existsSync(args.run) || !fs.statSync(args.run).isDirectory()) {
    console.error(`usage error: run directory not found: ${args.run}`);
    return 2;
  }
  const kinds: FigureKind[] = args.only ? [args.only] : [...FIGURE_KINDS];
  const outDir = args.out ?? path.join(args.run, "report");
  const figures: Figure[] = [];
  const warnings: string[] = [];
  for (const kind of kinds) {
    try {
      figures.push(buildFigure(kind, args.run));
    } catch (e) {
      if (args.only) {
        console.error(`render failure [${kind}]: ${(e as Error).message}`);
        return 1;
      }
      warnings.push(`${kind}: ${(e as Error).message}`);
    }
  }
  if (figures.length === 0) {
    console.error(`render failure: nothing renderable in ${args.run}`);
    for (const w of warnings) console.error(`  ${w}`);
    return 1;
  }
  fs.mkdirSync(outDir, { recursive: true });
  for (const fig of figures) {
    const p = path.join(outDir, `figure_${fig.kind}.svg`);
    fs.writeFileSync(p, fig.svg);
    console.log(p);
    warnings.push(...fig.warnings.map((w) => `${fig.kind}: ${w}`));
  }
  if (!args.only) {
    const html = renderSummary(args.run, figures, warnings);
    const p = path.join(outDir, "summary.html");
    fs.writeFileSync(p, html);
    console.log(p);
  }
  for (const w of warnings) console.warn(`warning: ${w}`);
  return 0;
}

const invokedDirectly = process.argv[1] !== undefined
  && path.resolve(process.argv[1]) === path.resolve(
    new URL(import.meta.url).pathname);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
