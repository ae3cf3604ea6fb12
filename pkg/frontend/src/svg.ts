/**
 * Minimal deterministic SVG construction: fixed canvas, fixed fonts, fixed
 * number formatting, no timestamps or randomness, so identical input data
 * always yields byte-identical output.
 */

export const WIDTH = 800;
export const HEIGHT = 500;
export const MARGIN = { left: 70, right: 30, top: 40, bottom: 55 };

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

/** Short human label for tick values. */
export function tickLabel(v: number): string {
  const a = Math.abs(v);
  if (a >= 10000 || (a > 0 && a < 0.001)) return v.toExponential(0).replace("+", "");
  return String(Number(v.toPrecision(4)));
}

export interface Scale {
  min: number;
  max: number;
  log: boolean;
  toPixel(v: number): number;
}

export function makeScale(min: number, max: number, pixelA: number, pixelB: number, log = false): Scale {
  if (log && min <= 0) {
    throw new Error("log scale needs positive values");
  }
  const lo = log ? Math.log10(min) : min;
  const hi = log ? Math.log10(max) : max;
  const span = hi === lo ? 1 : hi - lo;
  return {
    min,
    max,
    log,
    toPixel(v: number): number {
      const t = ((log ? Math.log10(v) : v) - lo) / span;
      return pixelA + t * (pixelB - pixelA);
    },
  };
}

export function linearTicks(min: number, max: number, count = 5): number[] {
  if (max <= min) return [min];
  const rawStep = (max - min) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((s) => s * mag).find((s) => (max - min) / s <= count + 1) ?? mag * 10;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function logTicks(min: number, max: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(min) - 1e-9); e <= Math.floor(Math.log10(max) + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length > 0 ? ticks : [min];
}

export class Scene {
  private parts: string[] = [];

  add(part: string): void {
    this.parts.push(part);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, extra = ""): void {
    this.add(`<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}"${extra}/>`);
  }

  circle(cx: number, cy: number, r: number, fill: string, extra = ""): void {
    this.add(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"${extra}/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, extra = ""): void {
    this.add(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"${extra}/>`);
  }

  polyline(points: Array<[number, number]>, stroke: string, extra = ""): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.add(`<polyline points="${pts}" fill="none" stroke="${stroke}"${extra}/>`);
  }

  text(x: number, y: number, content: string, extra = ""): void {
    this.add(`<text x="${fmt(x)}" y="${fmt(y)}"${extra}>${escapeXml(content)}</text>`);
  }

  render(title: string): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica,Arial,sans-serif" font-size="12">`,
      `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
      `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${escapeXml(title)}</text>`,
      ...this.parts,
      "</svg>",
    ].join("\n");
  }
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export interface Axes {
  sx: Scale;
  sy: Scale;
}

/** Draw the plot frame with ticks and axis labels; returns the scales. */
export function drawAxes(
  scene: Scene,
  xMin: number,
  xMax: number,
  yMin: number,
  yMax: number,
  xLabel: string,
  yLabel: string,
  xLog = false,
): Axes {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const sx = makeScale(xMin, xMax, x0, x1, xLog);
  const sy = makeScale(yMin, yMax, y0, y1, false);
  scene.line(x0, y0, x1, y0, "#333333");
  scene.line(x0, y0, x0, y1, "#333333");
  const xTicks = xLog ? logTicks(xMin, xMax) : linearTicks(xMin, xMax);
  for (const t of xTicks) {
    if (t < xMin - 1e-12 || t > xMax + 1e-12) continue;
    const px = sx.toPixel(t);
    scene.line(px, y0, px, y0 + 5, "#333333");
    scene.text(px, y0 + 18, tickLabel(t), ' text-anchor="middle"');
  }
  for (const t of linearTicks(yMin, yMax)) {
    if (t < yMin - 1e-12 || t > yMax + 1e-12) continue;
    const py = sy.toPixel(t);
    scene.line(x0 - 5, py, x0, py, "#333333");
    scene.line(x0, py, x1, py, "#eeeeee");
    scene.text(x0 - 8, py + 4, tickLabel(t), ' text-anchor="end"');
  }
  scene.text((x0 + x1) / 2, HEIGHT - 12, xLabel, ' text-anchor="middle"');
  scene.add(
    `<text x="18" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" transform="rotate(-90 18 ${fmt(
      (y0 + y1) / 2,
    )})">${escapeXml(yLabel)}</text>`,
  );
  return { sx, sy };
}

export function drawLegend(scene: Scene, labels: Array<{ label: string; color: string }>): void {
  let y = MARGIN.top + 6;
  const x = WIDTH - MARGIN.right - 170;
  for (const { label, color } of labels) {
    scene.line(x, y, x + 22, y, color, ' stroke-width="2"');
    scene.text(x + 28, y + 4, label);
    y += 18;
  }
}
