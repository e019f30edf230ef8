/**
 * Minimal deterministic SVG charts. Geometry is computed; any number shown
 * as text is a raw token passed in by the caller, never reformatted here.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: string;
  scatter?: boolean;
}

export interface AxisEndLabels {
  xMin?: string;
  xMax?: string;
  yMin?: string;
  yMax?: string;
}

export interface Annotation {
  label: string;   // plain text prefix
  token: string;   // verbatim file token, rendered in its own element
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logY?: boolean;
  width?: number;
  height?: number;
  endLabels?: AxisEndLabels;
  annotations?: Annotation[];
}

const PALETTE = ["#2a6fb0", "#c24d2c", "#3c8d52", "#8252a1", "#b58a00", "#546e7a"];

export function color(i: number): string {
  return PALETTE[i % PALETTE.length];
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fin(values: number[]): number[] {
  return values.filter((v) => Number.isFinite(v));
}

export function lineChart(opts: ChartOptions): string {
  const W = opts.width ?? 640;
  const H = opts.height ?? 360;
  const M = { l: 70, r: 16, t: 34, b: 46 };
  const iw = W - M.l - M.r;
  const ih = H - M.t - M.b;

  const xs = fin(opts.series.flatMap((s) => s.x));
  let ys = fin(opts.series.flatMap((s) => s.y));
  if (opts.logY) ys = ys.filter((v) => v > 0);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  let y0 = Math.min(...ys);
  let y1 = Math.max(...ys);
  if (!Number.isFinite(x0) || !Number.isFinite(y0)) {
    y0 = 0; y1 = 1;
  }
  if (y0 === y1) { y0 -= 0.5; y1 += 0.5; }
  const ty = (v: number) => (opts.logY ? Math.log10(v) : v);
  const ly0 = ty(y0);
  const ly1 = ty(y1);

  const px = (v: number) => M.l + ((v - x0) / (x1 - x0 || 1)) * iw;
  const py = (v: number) => M.t + ih - ((ty(v) - ly0) / (ly1 - ly0 || 1)) * ih;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="monospace" font-size="11">`);
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(`<text x="${M.l}" y="18" font-size="13">${esc(opts.title)}</text>`);
  // frame and quarter gridlines
  parts.push(`<rect x="${M.l}" y="${M.t}" width="${iw}" height="${ih}" fill="none" stroke="#999"/>`);
  for (let k = 1; k < 4; k++) {
    const gx = M.l + (iw * k) / 4;
    const gy = M.t + (ih * k) / 4;
    parts.push(`<line x1="${gx}" y1="${M.t}" x2="${gx}" y2="${M.t + ih}" stroke="#eee"/>`);
    parts.push(`<line x1="${M.l}" y1="${gy}" x2="${M.l + iw}" y2="${gy}" stroke="#eee"/>`);
  }
  // axis end labels: verbatim tokens only
  const e = opts.endLabels ?? {};
  if (e.xMin) parts.push(`<text x="${M.l}" y="${H - 28}" class="scalar" data-scalar="1">${esc(e.xMin)}</text>`);
  if (e.xMax) parts.push(`<text x="${W - M.r}" y="${H - 28}" text-anchor="end" class="scalar" data-scalar="1">${esc(e.xMax)}</text>`);
  if (e.yMin) parts.push(`<text x="${M.l - 4}" y="${M.t + ih}" text-anchor="end" class="scalar" data-scalar="1">${esc(e.yMin)}</text>`);
  if (e.yMax) parts.push(`<text x="${M.l - 4}" y="${M.t + 10}" text-anchor="end" class="scalar" data-scalar="1">${esc(e.yMax)}</text>`);
  parts.push(`<text x="${M.l + iw / 2}" y="${H - 10}" text-anchor="middle">${esc(opts.xLabel)}</text>`);
  parts.push(`<text x="14" y="${M.t + ih / 2}" transform="rotate(-90 14 ${M.t + ih / 2})" text-anchor="middle">${esc(opts.yLabel)}${opts.logY ? " (log)" : ""}</text>`);

  for (const s of opts.series) {
    if (s.scatter) {
      const dots = s.x.map((xv, i) => {
        const yv = s.y[i];
        if (!Number.isFinite(xv) || !Number.isFinite(yv) || (opts.logY && yv <= 0)) return "";
        return `<circle cx="${px(xv).toFixed(2)}" cy="${py(yv).toFixed(2)}" r="2.4" fill="${s.color}" fill-opacity="0.7"/>`;
      }).join("");
      parts.push(dots);
    } else {
      const pts = s.x.map((xv, i) => {
        const yv = s.y[i];
        if (!Number.isFinite(xv) || !Number.isFinite(yv) || (opts.logY && yv <= 0)) return null;
        return `${px(xv).toFixed(2)},${py(yv).toFixed(2)}`;
      }).filter((p) => p !== null).join(" ");
      parts.push(`<polyline points="${pts}" fill="none" stroke="${s.color}"`
        + (s.dash ? ` stroke-dasharray="${s.dash}"` : "") + ` stroke-width="1.4"/>`);
    }
  }
  // legend
  opts.series.forEach((s, i) => {
    const lx = M.l + 8;
    const lyy = M.t + 14 + 14 * i;
    parts.push(`<line x1="${lx}" y1="${lyy - 4}" x2="${lx + 18}" y2="${lyy - 4}" stroke="${s.color}"`
      + (s.dash ? ` stroke-dasharray="${s.dash}"` : "") + ` stroke-width="2"/>`);
    parts.push(`<text x="${lx + 24}" y="${lyy}">${esc(s.label)}</text>`);
  });
  (opts.annotations ?? []).forEach((a, i) => {
    parts.push(`<text x="${W - M.r}" y="${M.t + 14 + 14 * i}" text-anchor="end">${esc(a.label)} <tspan class="scalar" data-scalar="1">${esc(a.token)}</tspan></text>`);
  });
  parts.push("</svg>");
  return parts.join("\n");
}

export interface Bar {
  label: string;
  value: number;
  rawValue: string;
}

export function barChart(title: string, bars: Bar[], width = 640, height = 300): string {
  const M = { l: 70, r: 16, t: 34, b: 60 };
  const iw = width - M.l - M.r;
  const ih = height - M.t - M.b;
  const vals = bars.map((b) => b.value).filter((v) => Number.isFinite(v));
  const vmax = Math.max(0, ...vals);
  const vmin = Math.min(0, ...vals);
  const py = (v: number) => M.t + ih - ((v - vmin) / (vmax - vmin || 1)) * ih;
  const bw = iw / Math.max(bars.length, 1);
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="monospace" font-size="11">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${M.l}" y="18" font-size="13">${esc(title)}</text>`);
  parts.push(`<line x1="${M.l}" y1="${py(0)}" x2="${M.l + iw}" y2="${py(0)}" stroke="#999"/>`);
  bars.forEach((b, i) => {
    const x = M.l + i * bw + bw * 0.15;
    const w = bw * 0.7;
    const yTop = Math.min(py(0), py(b.value));
    const h = Math.abs(py(b.value) - py(0));
    const fill = b.value >= 0 ? "#3c8d52" : "#c24d2c";
    parts.push(`<rect x="${x.toFixed(2)}" y="${yTop.toFixed(2)}" width="${w.toFixed(2)}" height="${Math.max(h, 0.5).toFixed(2)}" fill="${fill}" fill-opacity="0.8"/>`);
    parts.push(`<text x="${(x + w / 2).toFixed(2)}" y="${height - 40}" text-anchor="middle">${esc(b.label)}</text>`);
    parts.push(`<text x="${(x + w / 2).toFixed(2)}" y="${height - 26}" text-anchor="middle" font-size="9" class="scalar" data-scalar="1">${esc(b.rawValue)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n");
}
