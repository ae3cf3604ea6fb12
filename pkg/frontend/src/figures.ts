import { parseRecords, stem, TrialRow } from "./csv";
import { Axes, drawAxes, drawLegend, PALETTE, Scene } from "./svg";

export type FigureKind = "convergence" | "coupon" | "gaps" | "density-pair" | "failure";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  /** Exceedance / band threshold for the convergence and gaps kinds. */
  epsilon?: number;
  /** Sharpness of the mirrored density pair (density-pair kind). */
  n?: number;
}

interface Series {
  label: string;
  points: Array<{ x: number; y: number; se?: number }>;
}

function groupBy<T, K extends string | number>(rows: T[], key: (r: T) => K): Map<K, T[]> {
  const out = new Map<K, T[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = out.get(k);
    if (bucket) bucket.push(row);
    else out.set(k, [row]);
  }
  return out;
}

function sortedNums<K extends number>(keys: Iterable<K>): K[] {
  return [...keys].sort((a, b) => a - b);
}

function requireInputs(spec: FigureSpec, exactly?: number): void {
  if (spec.inputs.length === 0) {
    throw new Error(`kind '${spec.kind}' needs at least one --in records CSV`);
  }
  if (exactly !== undefined && spec.inputs.length !== exactly) {
    throw new Error(`kind '${spec.kind}' takes exactly ${exactly} --in file(s)`);
  }
}

// ---------------------------------------------------------------------------
// aggregation (one rendered point per aggregate row, no smoothing)

function exceedanceSeries(path: string, epsilon: number): Series[] {
  const rows = parseRecords(path);
  if (rows.some((r) => r.dE === null)) {
    throw new Error(`${path}: rows lack dE values; not a convergence records file`);
  }
  const series: Series[] = [];
  const byExperiment = groupBy(rows, (r) => r.experiment);
  const multi = byExperiment.size > 1;
  for (const [experiment, expRows] of [...byExperiment.entries()].sort()) {
    const byM = groupBy(expRows, (r) => r.m);
    const points = sortedNums(byM.keys()).map((m) => {
      const trials = byM.get(m)!;
      const rate = trials.filter((r) => (r.dE as number) >= epsilon).length / trials.length;
      return { x: m, y: rate, se: Math.sqrt((rate * (1 - rate)) / trials.length) };
    });
    series.push({ label: multi ? experiment : stem(path), points });
  }
  return series;
}

function couponSeries(path: string): Series {
  const rows = parseRecords(path);
  if (rows.some((r) => r.diag === null)) {
    throw new Error(`${path}: rows lack the offset in 'diag'; not a coupon records file`);
  }
  const byC = groupBy(rows, (r) => r.diag as number);
  const points = sortedNums(byC.keys()).map((c) => {
    const trials = byC.get(c)!;
    const rate = trials.filter((r) => r.outValues[0] > r.m).length / trials.length;
    return { x: c, y: rate, se: Math.sqrt((rate * (1 - rate)) / trials.length) };
  });
  return { label: stem(path), points };
}

function failureSeries(path: string): Series[] {
  const rows = parseRecords(path);
  const series: Series[] = [];
  for (const [experiment, expRows] of [...groupBy(rows, (r) => r.experiment).entries()].sort()) {
    const byM = groupBy(expRows, (r) => r.m);
    const points = sortedNums(byM.keys()).map((m) => {
      const trials = byM.get(m)!;
      const rate = trials.filter((r) => r.outValues[0] >= 0.5).length / trials.length;
      return { x: m, y: rate, se: Math.sqrt((rate * (1 - rate)) / trials.length) };
    });
    series.push({ label: experiment, points });
  }
  return series;
}

export function couponTailLimit(c: number): number {
  return 1.0 - Math.exp(-Math.exp(-c));
}

/** Knots of the mirrored near-uniform pair with notches at 1/4 and 3/4. */
export function densityPairKnots(n: number): { f: Array<[number, number]>; g: Array<[number, number]> } {
  if (n < 4) throw new Error("sharpness n must be >= 4");
  const c = (2 * n) / (2 * n - 1);
  const half = 1 / (2 * n);
  const f: Array<[number, number]> = [
    [0, c],
    [0.25 - half, c],
    [0.25, 0],
    [0.25 + half, c],
    [1, c],
  ];
  const g: Array<[number, number]> = f.map(([x, v]) => [1 - x, v] as [number, number]).reverse();
  return { f, g };
}

// ---------------------------------------------------------------------------
// rendering

function plotSeries(scene: Scene, axes: Axes, series: Series[], withErrorBars: boolean): void {
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.points.map((p) => [axes.sx.toPixel(p.x), axes.sy.toPixel(p.y)] as [number, number]);
    scene.polyline(pts, color, ' stroke-width="1.5"');
    s.points.forEach((p, j) => {
      const [px, py] = pts[j];
      if (withErrorBars && p.se !== undefined && p.se > 0) {
        const lo = axes.sy.toPixel(Math.max(0, p.y - 2 * p.se));
        const hi = axes.sy.toPixel(Math.min(1, p.y + 2 * p.se));
        scene.line(px, lo, px, hi, color, ' class="errbar"');
        scene.line(px - 3, lo, px + 3, lo, color, ' class="errbar-cap"');
        scene.line(px - 3, hi, px + 3, hi, color, ' class="errbar-cap"');
      }
      scene.circle(px, py, 3, color, ' class="pt"');
    });
  });
}

function renderConvergence(spec: FigureSpec): string {
  requireInputs(spec);
  const epsilon = spec.epsilon ?? 0.05;
  const series = spec.inputs.flatMap((p) => exceedanceSeries(p, epsilon));
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const scene = new Scene();
  const axes = drawAxes(
    scene,
    Math.min(...xs),
    Math.max(...xs),
    0,
    1,
    "sample size m (log scale)",
    `Pr[distance >= ${epsilon}]`,
    true,
  );
  plotSeries(scene, axes, series, true);
  drawLegend(
    scene,
    series.map((s, i) => ({ label: s.label, color: PALETTE[i % PALETTE.length] })),
  );
  return scene.render("Convergence to the minimum-density cut");
}

function renderCoupon(spec: FigureSpec): string {
  requireInputs(spec);
  const series = spec.inputs.map(couponSeries);
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const xMin = Math.min(...xs) - 0.5;
  const xMax = Math.max(...xs) + 0.5;
  const scene = new Scene();
  const axes = drawAxes(scene, xMin, xMax, 0, 1, "offset c", "Pr[X > n ln n + c n]");
  // analytic limit, sampled on a fixed fine grid
  const limit: Array<[number, number]> = [];
  const steps = 128;
  for (let i = 0; i <= steps; i++) {
    const c = xMin + ((xMax - xMin) * i) / steps;
    limit.push([axes.sx.toPixel(c), axes.sy.toPixel(couponTailLimit(c))]);
  }
  const pts = limit.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
  scene.add(`<polyline id="limit" points="${pts}" fill="none" stroke="#555555" stroke-dasharray="6 3"/>`);
  plotSeries(scene, axes, series, true);
  drawLegend(scene, [
    ...series.map((s, i) => ({ label: s.label, color: PALETTE[i % PALETTE.length] })),
    { label: "limit 1-exp(-exp(-c))", color: "#555555" },
  ]);
  return scene.render("Coupon-collector tail vs the limit law");
}

function renderGaps(spec: FigureSpec): string {
  requireInputs(spec, 1);
  const epsilon = spec.epsilon ?? 0.3;
  const rows = parseRecords(spec.inputs[0]);
  const ms = new Set(rows.map((r) => r.m));
  if (ms.size !== 1) {
    throw new Error(`${spec.inputs[0]}: mixed sample sizes; gaps figures need a single m`);
  }
  const m = rows[0].m;
  const center = Math.log(m) / m;
  const values = rows.map((r) => r.outValues[0]);
  const lo = Math.min(...values, center * (1 - epsilon));
  const hi = Math.max(...values, center * (1 + epsilon));
  const span = hi - lo || 1;
  const nBins = 40;
  const counts = new Array<number>(nBins).fill(0);
  for (const v of values) {
    const bin = Math.min(nBins - 1, Math.floor(((v - lo) / span) * nBins));
    counts[bin] += 1;
  }
  const scene = new Scene();
  const axes = drawAxes(scene, lo, hi, 0, Math.max(...counts) * 1.08, "largest gap", "trials");
  const binWidth = span / nBins;
  counts.forEach((count, i) => {
    if (count === 0) return;
    const x0 = axes.sx.toPixel(lo + i * binWidth);
    const x1 = axes.sx.toPixel(lo + (i + 1) * binWidth);
    const y = axes.sy.toPixel(count);
    scene.rect(x0, y, x1 - x0, axes.sy.toPixel(0) - y, PALETTE[0], ' class="bin" fill-opacity="0.75"');
  });
  for (const [value, label] of [
    [center * (1 - epsilon), `(1-${epsilon}) ln m / m`],
    [center, "ln m / m"],
    [center * (1 + epsilon), `(1+${epsilon}) ln m / m`],
  ] as Array<[number, string]>) {
    const px = axes.sx.toPixel(value);
    scene.line(px, axes.sy.toPixel(0), px, 40, "#d62728", ' class="band" stroke-dasharray="4 3"');
    scene.text(px, 36, label, ' text-anchor="middle" fill="#d62728" font-size="10"');
  }
  return scene.render(`Largest-gap concentration at m = ${m}`);
}

function renderDensityPair(spec: FigureSpec): string {
  const n = spec.n ?? 1000;
  const { f, g } = densityPairKnots(n);
  const c = (2 * n) / (2 * n - 1);
  const scene = new Scene();
  const axes = drawAxes(scene, 0, 1, 0, c * 1.15, "x", "density");
  const toPts = (knots: Array<[number, number]>) =>
    knots.map(([x, v]) => [axes.sx.toPixel(x), axes.sy.toPixel(v)] as [number, number]);
  scene.polyline(toPts(f), PALETTE[0], ' stroke-width="1.8" class="density-f"');
  scene.polyline(toPts(g), PALETTE[1], ' stroke-width="1.8" class="density-g"');
  drawLegend(scene, [
    { label: `f (notch at 1/4), n = ${n}`, color: PALETTE[0] },
    { label: "g (mirror, notch at 3/4)", color: PALETTE[1] },
  ]);
  return scene.render("Indistinguishable density pair");
}

function renderFailure(spec: FigureSpec): string {
  requireInputs(spec);
  const series = spec.inputs.flatMap(failureSeries);
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const scene = new Scene();
  const axes = drawAxes(
    scene,
    Math.min(...xs) / 1.3,
    Math.max(...xs) * 1.3,
    0,
    1,
    "sample size m (log scale)",
    "freq(output in right half)",
    true,
  );
  plotSeries(scene, axes, series, true);
  drawLegend(
    scene,
    series.map((s, i) => ({ label: s.label, color: PALETTE[i % PALETTE.length] })),
  );
  return scene.render("Bucket-schedule failure comparison");
}

const RENDERERS: Record<FigureKind, (spec: FigureSpec) => string> = {
  convergence: renderConvergence,
  coupon: renderCoupon,
  gaps: renderGaps,
  "density-pair": renderDensityPair,
  failure: renderFailure,
};

export const FIGURE_KINDS = Object.keys(RENDERERS) as FigureKind[];

/** Render one figure to an SVG string (pure in the file contents). */
export function renderFigure(spec: FigureSpec): string {
  const renderer = RENDERERS[spec.kind];
  if (!renderer) {
    throw new Error(`unknown figure kind '${spec.kind}'; valid: ${FIGURE_KINDS.join(", ")}`);
  }
  return renderer(spec) + "\n";
}
