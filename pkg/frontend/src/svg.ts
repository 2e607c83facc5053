/**
 * Minimal deterministic SVG chart primitives: fixed canvas, fixed styles,
 * no timestamps or randomness, so identical inputs yield identical bytes.
 */

export const WIDTH = 860;
export const HEIGHT = 520;
export const MARGIN = { top: 36, right: 24, bottom: 52, left: 72 };

export const PALETTE = ['#c0392b', '#2861a8', '#212121', '#2e8540', '#8e44ad', '#b8860b'];

const fmt = (v: number): string => {
  const s = v.toFixed(2);
  return s === '-0.00' ? '0.00' : s;
};

export type Scale = (v: number) => number;

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  return (v) => outLo + ((v - lo) / span) * (outHi - outLo);
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const safeLo = Math.log10(Math.max(lo, 1e-300));
  const safeHi = Math.log10(Math.max(hi, 1e-300));
  const span = safeHi - safeLo || 1;
  return (v) => outLo + ((Math.log10(Math.max(v, 1e-300)) - safeLo) / span) * (outHi - outLo);
}

/** Round-number tick positions covering [lo, hi]. */
export function linearTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / count / step;
  const nice = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = nice * step;
  const start = Math.ceil(lo / s) * s;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += s) out.push(v);
  return out;
}

/** Decade ticks covering [lo, hi] on a log axis. */
export function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.floor(Math.log10(Math.max(lo, 1e-300))); Math.pow(10, e) <= hi * 1.0001; e++) {
    out.push(Math.pow(10, e));
  }
  return out;
}

const tickLabel = (v: number): string => {
  if (v === 0) return '0';
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-2) return v.toExponential(0).replace('+', '');
  return Number(v.toPrecision(4)).toString();
};

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dashed?: boolean;
  /** Optional half-widths of error bars, drawn every `barEvery` points. */
  bars?: number[];
  barEvery?: number;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  series: Series[];
}

/** Keep at most `limit` points per curve; always keeps the endpoints. */
export function decimate(values: number[], limit: number): number[] {
  if (values.length <= limit) return values.slice();
  const stride = Math.ceil(values.length / limit);
  const out: number[] = [];
  for (let i = 0; i < values.length; i += stride) out.push(values[i]);
  if (out[out.length - 1] !== values[values.length - 1]) out.push(values[values.length - 1]);
  return out;
}

export function renderChart(spec: ChartSpec): string {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;

  const xs = spec.series.flatMap((s) => s.x);
  let ys = spec.series.flatMap((s, i) =>
    spec.series[i].bars
      ? s.y.flatMap((v, j) => [v, v + (s.bars![j] ?? 0), v - (s.bars![j] ?? 0)])
      : s.y
  );
  if (spec.logY) ys = ys.filter((v) => v > 0);
  if (ys.length === 0) ys = [1e-3, 1];
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (!spec.logY) {
    const pad = 0.05 * (yHi - yLo || 1);
    yLo = Math.min(yLo, 0) === 0 && yLo >= 0 ? 0 : yLo - pad;
    yHi = yHi + pad;
  }

  const sx = linearScale(xLo, xHi, x0, x1);
  const sy = spec.logY ? logScale(yLo, yHi, y0, y1) : linearScale(yLo, yHi, y0, y1);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="16">${spec.title}</text>`
  );

  const xTicks = linearTicks(xLo, xHi);
  const yTicks = spec.logY ? logTicks(yLo, yHi) : linearTicks(yLo, yHi);
  for (const t of xTicks) {
    const px = fmt(sx(t));
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y1}" stroke="#dddddd" stroke-width="1"/>`);
    parts.push(
      `<text x="${px}" y="${y0 + 18}" text-anchor="middle" font-size="11">${tickLabel(t)}</text>`
    );
  }
  for (const t of yTicks) {
    const py = fmt(sy(t));
    parts.push(`<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#dddddd" stroke-width="1"/>`);
    parts.push(
      `<text x="${x0 - 6}" y="${py}" text-anchor="end" dominant-baseline="middle" ` +
        `font-size="11">${tickLabel(t)}</text>`
    );
  }
  parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#555555"/>`);
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13">${spec.xLabel}</text>`
  );
  parts.push(
    `<text x="20" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 20 ${(y0 + y1) / 2})">${spec.yLabel}</text>`
  );

  for (const s of spec.series) {
    if (s.bars) {
      const every = s.barEvery ?? 1;
      for (let i = 0; i < s.x.length; i += every) {
        const cx = fmt(sx(s.x[i]));
        const top = spec.logY ? Math.max(s.y[i] + s.bars[i], 1e-300) : s.y[i] + s.bars[i];
        const bot = spec.logY ? Math.max(s.y[i] - s.bars[i], yLo) : s.y[i] - s.bars[i];
        parts.push(
          `<line class="errorbar" x1="${cx}" y1="${fmt(sy(bot))}" x2="${cx}" y2="${fmt(sy(top))}" ` +
            `stroke="${s.color}" stroke-width="1" opacity="0.55"/>`
        );
      }
    }
    const pts = s.x
      .map((v, i) => ({ x: v, y: s.y[i] }))
      .filter((p) => !spec.logY || p.y > 0)
      .map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`)
      .join(' ');
    const dash = s.dashed ? ' stroke-dasharray="7 5"' : '';
    parts.push(
      `<polyline class="curve" points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.8"${dash}/>`
    );
  }

  spec.series.forEach((s, i) => {
    const ly = y1 + 14 + 18 * i;
    const dash = s.dashed ? ' stroke-dasharray="7 5"' : '';
    parts.push(
      `<line x1="${x1 - 150}" y1="${ly}" x2="${x1 - 120}" y2="${ly}" stroke="${s.color}" stroke-width="2"${dash}/>`
    );
    parts.push(`<text x="${x1 - 112}" y="${ly + 4}" font-size="12">${s.label}</text>`);
  });

  parts.push('</svg>');
  return parts.join('\n') + '\n';
}
