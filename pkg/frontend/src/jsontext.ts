/**
 * Positional JSON walker: resolves a path to the exact source span of the
 * value, so scalars can be displayed byte-for-byte as they appear on disk.
 */

import { PlotkitError } from "./csv.js";

interface Span {
  start: number;
  end: number;   // exclusive
}

function skipWs(s: string, i: number): number {
  while (i < s.length && /\s/.test(s[i])) i++;
  return i;
}

function scanString(s: string, i: number): number {
  // s[i] === '"'
  i++;
  while (i < s.length) {
    if (s[i] === "\\") i += 2;
    else if (s[i] === '"') return i + 1;
    else i++;
  }
  throw new PlotkitError("unterminated string in JSON");
}

function scanScalar(s: string, i: number): number {
  while (i < s.length && !/[\s,\]}]/.test(s[i])) i++;
  return i;
}

/** span of the JSON value starting at index i */
function scanValue(s: string, i: number): Span {
  i = skipWs(s, i);
  const start = i;
  const ch = s[i];
  if (ch === '"') return { start, end: scanString(s, i) };
  if (ch === "{" || ch === "[") {
    const close = ch === "{" ? "}" : "]";
    let depth = 0;
    while (i < s.length) {
      if (s[i] === '"') {
        i = scanString(s, i);
        continue;
      }
      if (s[i] === ch) depth++;
      else if (s[i] === close) {
        depth--;
        if (depth === 0) return { start, end: i + 1 };
      }
      i++;
    }
    throw new PlotkitError("unbalanced JSON container");
  }
  return { start, end: scanScalar(s, i) };
}

/** span of the value at key within the object span */
function memberValue(s: string, obj: Span, key: string): Span | null {
  let i = skipWs(s, obj.start);
  if (s[i] !== "{") return null;
  i++;
  while (true) {
    i = skipWs(s, i);
    if (s[i] === "}") return null;
    if (s[i] !== '"') throw new PlotkitError("expected object key");
    const keyEnd = scanString(s, i);
    const k = JSON.parse(s.slice(i, keyEnd));
    i = skipWs(s, keyEnd);
    if (s[i] !== ":") throw new PlotkitError("expected ':' in object");
    const val = scanValue(s, i + 1);
    if (k === key) return val;
    i = skipWs(s, val.end);
    if (s[i] === ",") i++;
    else if (s[i] === "}") return null;
  }
}

function elementValue(s: string, arr: Span, index: number): Span | null {
  let i = skipWs(s, arr.start);
  if (s[i] !== "[") return null;
  i++;
  let n = 0;
  while (true) {
    i = skipWs(s, i);
    if (s[i] === "]") return null;
    const val = scanValue(s, i);
    if (n === index) return val;
    n++;
    i = skipWs(s, val.end);
    if (s[i] === ",") i++;
    else if (s[i] === "]") return null;
  }
}

/**
 * Raw source text of the value at the path, or null when absent.
 * Example: rawToken(text, ["intervals", "local_-5_5", "decay_factor"]).
 */
export function rawToken(jsonText: string, path: (string | number)[]): string | null {
  let span: Span | null = scanValue(jsonText, 0);
  for (const step of path) {
    if (span === null) return null;
    span = typeof step === "number"
      ? elementValue(jsonText, span, step)
      : memberValue(jsonText, span, step);
  }
  return span === null ? null : jsonText.slice(span.start, span.end);
}

/** every scalar leaf of the JSON object as [path-label, raw token] pairs */
export function scalarLeaves(jsonText: string, prefix = ""): [string, string][] {
  const parsed = JSON.parse(jsonText);
  const out: [string, string][] = [];
  const walk = (node: unknown, path: (string | number)[], label: string) => {
    if (node !== null && typeof node === "object") {
      if (Array.isArray(node)) {
        node.forEach((v, i) => walk(v, [...path, i], `${label}[${i}]`));
      } else {
        for (const k of Object.keys(node)) {
          walk((node as Record<string, unknown>)[k], [...path, k],
               label ? `${label}.${k}` : k);
        }
      }
      return;
    }
    const token = rawToken(jsonText, path);
    if (token !== null) out.push([label, token]);
  };
  walk(parsed, [], prefix);
  return out;
}
