/** Figure builders: read contract CSVs, aggregate across seeds, emit SVG. */
import * as fs from "fs";
import * as path from "path";

import { parseCsv, toObjects } from "./csv";
import { CsvKind, validateContract, Violation } from "./contract";
import { ChartSpec, PALETTE, renderChart, Series } from "./svg";

export const FIGURES = ["fig2", "fig3", "fig4", "fig5"] as const;
export type FigureId = (typeof FIGURES)[number];

export class ContractError extends Error {
  constructor(file: string, violations: Violation[]) {
    const first = violations[0];
    super(
      `${file}: ${violations.length} contract violation(s); first: ` +
      `row ${first.row}, column ${first.column}: ${first.message}`);
  }
}

function loadValidated(file: string, kind: CsvKind): Record<string, string>[] {
  if (!fs.existsSync(file)) {
    throw new Error(`${file}: input CSV missing`);
  }
  const table = parseCsv(fs.readFileSync(file, "utf-8"));
  const violations = validateContract(table, kind);
  if (violations.length > 0) {
    throw new ContractError(file, violations);
  }
  const rows = toObjects(table);
  if (rows.length === 0) {
    throw new Error(`${file}: no data rows`);
  }
  return rows;
}

const num = (s: string): number => Number(s);

function mean(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}

function sampleStd(values: number[]): number {
  if (values.length < 2) return 0;
  const m = mean(values);
  const ss = values.reduce((a, b) => a + (b - m) * (b - m), 0);
  return Math.sqrt(ss / (values.length - 1));
}

function groupBy<T>(items: T[], key: (t: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const bucket = out.get(k);
    if (bucket) bucket.push(item);
    else out.set(k, [item]);
  }
  return out;
}

export function assertCcdfMonotone(points: [number, number][], series: string): void {
  for (let i = 1; i < points.length; i++) {
    if (points[i][1] > points[i - 1][1] + 1e-12) {
      throw new Error(
        `CCDF series ${series} is not monotone non-increasing at threshold ${points[i][0]}`);
    }
  }
}

function buildFig2(dir: string): ChartSpec {
  const rows = loadValidated(path.join(dir, "ccdf.csv"), "ccdf");
  const bySeries = groupBy(rows, (r) => r.scheme);
  const series: Series[] = [];
  let color = 0;
  let minP = 1;
  for (const [scheme, schemeRows] of [...bySeries.entries()].sort()) {
    const byThreshold = groupBy(schemeRows, (r) => r.threshold);
    const pts: [number, number][] = [];
    const upper: [number, number][] = [];
    const lower: [number, number][] = [];
    const keys = [...byThreshold.keys()].sort((a, b) => Number(a) - Number(b));
    for (const key of keys) {
      const t = Number(key);
      const probs = byThreshold.get(key)!.map((r) => num(r.probability));
      const m = mean(probs);
      const s = sampleStd(probs);
      if (m > 0) {
        pts.push([t, m]);
        upper.push([t, Math.min(1, m + s)]);
        lower.push([t, Math.max(1e-7, m - s)]);
        minP = Math.min(minP, Math.max(m - s, 1e-7));
      }
    }
    // per-seed curves must each be monotone before we draw anything
    for (const [seed, seedRows] of groupBy(schemeRows, (r) => r.seed)) {
      const curve = seedRows
        .map((r): [number, number] => [num(r.threshold), num(r.probability)])
        .sort((a, b) => a[0] - b[0]);
      assertCcdfMonotone(curve, `${scheme}/seed${seed}`);
    }
    series.push({
      name: scheme, color: PALETTE[color++ % PALETTE.length], points: pts,
      band: { upper, lower },
    });
  }
  const allT = series.flatMap((s) => s.points.map((p) => p[0]));
  return {
    title: "Total delay tail distribution (CCDF)",
    x: { label: "delay threshold d [s]", log: true, domain: [Math.min(...allT), Math.max(...allT)] },
    y: { label: "Pr(D > d)", log: true, domain: [Math.max(minP, 1e-7), 1] },
    series,
  };
}

interface SweepSeriesSpec {
  file: string;
  seriesKey: (r: Record<string, string>) => string;
  metric: string;
  xLabel: string;
  yLabel: string;
  title: string;
  logY?: boolean;
  dashedMetric?: string; // second metric drawn dashed on a right axis
  rightLabel?: string;
}

function buildSweepFigure(dir: string, spec: SweepSeriesSpec): ChartSpec {
  const rows = loadValidated(path.join(dir, spec.file), "sweep");
  const bySeries = groupBy(rows, spec.seriesKey);
  const series: Series[] = [];
  let color = 0;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const [name, seriesRows] of [...bySeries.entries()].sort()) {
    const sorted = seriesRows
      .slice()
      .sort((a, b) => num(a.axis_value) - num(b.axis_value));
    const pts: [number, number][] = [];
    const upper: [number, number][] = [];
    const lower: [number, number][] = [];
    const dashedPts: [number, number][] = [];
    for (const r of sorted) {
      const x = num(r.axis_value);
      const m = num(r[`${spec.metric}_mean`]);
      const s = num(r[`${spec.metric}_std`]);
      pts.push([x, m]);
      upper.push([x, m + s]);
      lower.push([x, spec.logY ? Math.max(1e-9, m - s) : m - s]);
      yMin = Math.min(yMin, spec.logY ? Math.max(1e-9, m - s) : m - s);
      yMax = Math.max(yMax, m + s);
      if (spec.dashedMetric) {
        const cell = r[`${spec.dashedMetric}_mean`];
        if (cell !== "") dashedPts.push([x, num(cell)]);
      }
    }
    const c = PALETTE[color++ % PALETTE.length];
    series.push({ name, color: c, points: pts, band: { upper, lower } });
    if (spec.dashedMetric && dashedPts.length > 0) {
      series.push({
        name: `${name} (hit rate)`, color: c, points: dashedPts,
        dashed: true, rightAxis: true,
      });
    }
  }
  const allX = series.flatMap((s) => s.points.map((p) => p[0]));
  return {
    title: spec.title,
    x: { label: spec.xLabel, domain: [Math.min(...allX), Math.max(...allX)] },
    y: { label: spec.yLabel, log: spec.logY, domain: [spec.logY ? yMin : 0, yMax] },
    yRight: spec.dashedMetric
      ? { label: spec.rightLabel ?? "", domain: [0, 1] }
      : undefined,
    series,
  };
}

export function buildFigure(figure: FigureId, dir: string): ChartSpec {
  switch (figure) {
    case "fig2":
      return buildFig2(dir);
    case "fig3":
      return buildSweepFigure(dir, {
        file: "sweep_proactiveness.csv",
        seriesKey: (r) => r.scheme,
        metric: "avg_total_delay_s",
        xLabel: "proactiveness (cache capacity / cacheable tasks)",
        yLabel: "average total delay [s]",
        title: "Average total delay vs proactiveness",
      });
    case "fig4":
      return buildSweepFigure(dir, {
        file: "sweep_proactiveness.csv",
        seriesKey: (r) => `z=${r.zipf_z}`,
        metric: "avg_total_delay_s",
        dashedMetric: "cache_hit_rate",
        rightLabel: "cache hit rate",
        xLabel: "proactiveness (cache capacity / cacheable tasks)",
        yLabel: "average total delay [s]",
        title: "Delay (solid) and cache hit rate (dashed) vs proactiveness",
      });
    case "fig5":
      return buildSweepFigure(dir, {
        file: "sweep_traffic_intensity_mbps.csv",
        seriesKey: (r) => r.scheme,
        metric: "avg_total_delay_s",
        logY: true,
        xLabel: "offered traffic [Mbps]",
        yLabel: "average total delay [s]",
        title: "Average total delay vs traffic intensity",
      });
  }
}

export function renderFigure(figure: FigureId, inDir: string, outDir: string): string {
  const spec = buildFigure(figure, inDir);
  const svg = renderChart(spec);
  fs.mkdirSync(outDir, { recursive: true });
  const outPath = path.join(outDir, `${figure}.svg`);
  fs.writeFileSync(outPath, svg, "utf-8");
  return outPath;
}
