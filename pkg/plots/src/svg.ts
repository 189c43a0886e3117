/** Deterministic SVG chart primitives: fixed styles, no timestamps. */
import { ScaleContinuousNumeric, scaleLinear, scaleLog } from "d3-scale";

export const WIDTH = 760;
export const HEIGHT = 520;
export const MARGIN = { top: 40, right: 90, bottom: 58, left: 78 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

export type Scale = ScaleContinuousNumeric<number, number>;

export interface Axis {
  label: string;
  log?: boolean;
  domain: [number, number];
}

export function makeScale(axis: Axis, range: [number, number]): Scale {
  const scale = axis.log
    ? scaleLog().domain(axis.domain).range(range)
    : scaleLinear().domain(axis.domain).range(range).nice();
  return scale as Scale;
}

const fmt = (v: number): string => {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) return v.toExponential(0);
  return Number(v.toPrecision(4)).toString();
};

export function linePath(points: [number, number][]): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`)
    .join(" ");
}

export function bandPath(upper: [number, number][], lower: [number, number][]): string {
  const fwd = linePath(upper);
  const back = lower
    .slice()
    .reverse()
    .map(([x, y]) => `L${x.toFixed(2)},${y.toFixed(2)}`)
    .join(" ");
  return `${fwd} ${back} Z`;
}

export interface Series {
  name: string;
  color: string;
  dashed?: boolean;
  points: [number, number][];       // data coordinates
  band?: { upper: [number, number][]; lower: [number, number][] };
  rightAxis?: boolean;
}

export interface ChartSpec {
  title: string;
  x: Axis;
  y: Axis;
  yRight?: Axis;
  series: Series[];
}

export function renderChart(spec: ChartSpec): string {
  const innerW: [number, number] = [MARGIN.left, WIDTH - MARGIN.right];
  const innerH: [number, number] = [HEIGHT - MARGIN.bottom, MARGIN.top];
  const sx = makeScale(spec.x, innerW);
  const sy = makeScale(spec.y, innerH);
  const syR = spec.yRight ? makeScale(spec.yRight, innerH) : undefined;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="16">${spec.title}</text>`);

  // axes frames
  const [x0, x1] = innerW;
  const [y0, y1] = innerH;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
  if (syR) {
    parts.push(`<line x1="${x1}" y1="${y0}" x2="${x1}" y2="${y1}" stroke="black"/>`);
  }

  for (const t of sx.ticks(spec.x.log ? 6 : 7)) {
    const px = sx(t);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y0 + 5}" stroke="black"/>`);
    parts.push(
      `<text x="${px.toFixed(2)}" y="${y0 + 20}" text-anchor="middle" font-size="11">${fmt(t)}</text>`);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y1}" stroke="#dddddd" stroke-width="0.5"/>`);
  }
  for (const t of sy.ticks(spec.y.log ? 6 : 7)) {
    const py = sy(t);
    parts.push(`<line x1="${x0 - 5}" y1="${py.toFixed(2)}" x2="${x0}" y2="${py.toFixed(2)}" stroke="black"/>`);
    parts.push(
      `<text x="${x0 - 9}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-size="11">${fmt(t)}</text>`);
    parts.push(
      `<line x1="${x0}" y1="${py.toFixed(2)}" x2="${x1}" y2="${py.toFixed(2)}" stroke="#dddddd" stroke-width="0.5"/>`);
  }
  if (syR && spec.yRight) {
    for (const t of syR.ticks(6)) {
      const py = syR(t);
      parts.push(`<line x1="${x1}" y1="${py.toFixed(2)}" x2="${x1 + 5}" y2="${py.toFixed(2)}" stroke="black"/>`);
      parts.push(
        `<text x="${x1 + 9}" y="${(py + 4).toFixed(2)}" text-anchor="start" font-size="11">${fmt(t)}</text>`);
    }
    parts.push(
      `<text transform="rotate(90 ${x1 + 55} ${(y0 + y1) / 2})" x="${x1 + 55}" y="${(y0 + y1) / 2}" ` +
      `text-anchor="middle" font-size="13">${spec.yRight.label}</text>`);
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13">${spec.x.label}</text>`);
  parts.push(
    `<text transform="rotate(-90 22 ${(y0 + y1) / 2})" x="22" y="${(y0 + y1) / 2}" ` +
    `text-anchor="middle" font-size="13">${spec.y.label}</text>`);

  const mapPoint = (s: Series, [px, py]: [number, number]): [number, number] => [
    sx(px), (s.rightAxis && syR ? syR : sy)(py),
  ];

  for (const s of spec.series) {
    if (s.band) {
      const up = s.band.upper.map((p) => mapPoint(s, p));
      const lo = s.band.lower.map((p) => mapPoint(s, p));
      parts.push(
        `<path class="band" d="${bandPath(up, lo)}" fill="${s.color}" fill-opacity="0.15" stroke="none"/>`);
    }
  }
  for (const s of spec.series) {
    const pts = s.points.map((p) => mapPoint(s, p));
    const dash = s.dashed ? ` stroke-dasharray="6,4"` : "";
    parts.push(
      `<path class="series" data-name="${s.name}" d="${linePath(pts)}" fill="none" ` +
      `stroke="${s.color}" stroke-width="1.8"${dash}/>`);
    for (const [px, py] of pts) {
      parts.push(
        `<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="2.4" fill="${s.color}"/>`);
    }
  }

  // legend
  let ly = MARGIN.top + 4;
  for (const s of spec.series) {
    const dash = s.dashed ? ` stroke-dasharray="6,4"` : "";
    parts.push(
      `<line x1="${x1 - 150}" y1="${ly}" x2="${x1 - 122}" y2="${ly}" stroke="${s.color}" stroke-width="2"${dash}/>`);
    parts.push(
      `<text x="${x1 - 116}" y="${ly + 4}" font-size="11">${s.name}</text>`);
    ly += 16;
  }
  parts.push("</svg>");
  return parts.join("\n");
}
