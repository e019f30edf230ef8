/**
 * Single-page HTML report: summary tables with verbatim scalar tokens, the
 * rendered figures inline, and any warnings collected along the way.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { Figure } from "./figures.js";
import { scalarLeaves } from "./jsontext.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function table(title: string, rows: [string, string][]): string {
  if (rows.length === 0) return "";
  const body = rows.map(([k, v]) =>
    `<tr><td>${esc(k)}</td><td class="scalar" data-scalar="1">${esc(v)}</td></tr>`)
    .join("\n");
  return `<section><h2>${esc(title)}</h2><table>${body}</table></section>`;
}

export function renderSummary(runDir: string, figures: Figure[],
                              warnings: string[]): string {
  const sections: string[] = [];
  for (const name of ["summary.json", "steady_summary.json",
                      "check_report.json"]) {
    const p = path.join(runDir, name);
    if (!fs.existsSync(p)) {
      warnings = [...warnings, `${name} not present; table omitted`];
      continue;
    }
    const text = fs.readFileSync(p, "utf-8");
    const rows = scalarLeaves(text).filter(([, v]) => v !== "null");
    sections.push(table(name, rows));
  }
  const figureBlocks = figures.map((f) =>
    `<section><h2>figure: ${f.kind}</h2>${f.svg}</section>`).join("\n");
  const warnBlock = warnings.length
    ? `<section><h2>warnings</h2><ul>${warnings.map((w) => `<li>${esc(w)}</li>`).join("")}</ul></section>`
    : "";
  return `<!doctype html>
<html lang="en">
<head>
<meta charset="utf-8"/>
<title>vcfield run report: ${esc(path.basename(runDir))}</title>
<style>
body { font-family: monospace; margin: 24px; color: #222; }
h1 { font-size: 18px; } h2 { font-size: 14px; margin-top: 24px; }
table { border-collapse: collapse; }
td { border: 1px solid #ccc; padding: 3px 8px; font-size: 12px; }
td.scalar { text-align: right; }
svg { border: 1px solid #eee; margin: 4px 0; }
</style>
</head>
<body>
<h1>vcfield run report: ${esc(runDir)}</h1>
${warnBlock}
${sections.join("\n")}
${figureBlocks}
</body>
</html>
`;
}
