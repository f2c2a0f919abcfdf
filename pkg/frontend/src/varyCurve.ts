/** Deterministic SVG line chart: mean stopping time vs a numeric grid field,
 * one series per algorithm, whiskers at mean +/- sample std. The plotted data
 * is embedded verbatim in a <metadata> element so consumers can parse the
 * artifact back without re-running the aggregation. */

import { Series } from "./aggregate.js";
import { ResultRecord, SchemaError } from "./schema.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 80, right: 160, top: 40, bottom: 60 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b"];

export interface CurveData {
  xField: string;
  logY: boolean;
  series: {
    algorithm: string;
    x: number[];
    mean: number[];
    std: number[];
  }[];
}

/** Numeric x value of each grid point, read from the requested column. */
export function xValues(
  records: ResultRecord[], series: Series[], xField: string,
): Map<string, number> {
  const out = new Map<string, number>();
  for (const point of series[0]?.points ?? []) {
    const row = records.find((r) => r.grid_point === point.gridPoint);
    if (row === undefined || !(xField in row)) {
      throw new SchemaError(`results file is missing column '${xField}'`);
    }
    const value = Number(row[xField]);
    if (!Number.isFinite(value)) {
      throw new SchemaError(
        `column '${xField}' is not numeric at grid point '${point.gridPoint}'`);
    }
    out.set(point.gridPoint, value);
  }
  return out;
}

function fmt(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toPrecision(6);
}

export function renderVaryCurve(
  records: ResultRecord[], series: Series[], xField: string, logY: boolean,
): string {
  const xs = xValues(records, series, xField);
  const data: CurveData = {
    xField,
    logY,
    series: series.map((s) => ({
      algorithm: s.algorithm,
      x: s.points.map((p) => xs.get(p.gridPoint)!),
      mean: s.points.map((p) => p.mean),
      std: s.points.map((p) => p.std),
    })),
  };

  const allX = data.series.flatMap((s) => s.x);
  const allY = data.series.flatMap((s) =>
    s.mean.flatMap((m, i) => [m - s.std[i], m + s.std[i]]));
  const xMin = Math.min(...allX);
  const xMax = Math.max(...allX);
  const yLow = Math.min(...allY);
  const yHigh = Math.max(...allY);
  const toY = (v: number) => (logY ? Math.log10(Math.max(v, 1)) : v);
  const yMin = toY(Math.max(yLow, logY ? 1 : yLow));
  const yMax = toY(yHigh);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (v: number) =>
    MARGIN.left + (xMax === xMin ? plotW / 2 : ((v - xMin) / (xMax - xMin)) * plotW);
  const sy = (v: number) =>
    MARGIN.top + plotH -
    (yMax === yMin ? plotH / 2 : ((toY(v) - yMin) / (yMax - yMin)) * plotH);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
  parts.push(`<metadata id="plot-data">${JSON.stringify(data)}</metadata>`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  // axes
  const x0 = MARGIN.left, y0 = MARGIN.top + plotH;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0 + plotW}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="black"/>`);
  parts.push(
    `<text x="${x0 + plotW / 2}" y="${HEIGHT - 15}" text-anchor="middle" font-size="14">${xField}</text>`);
  parts.push(
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="14" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">Average stopping time${logY ? " (log)" : ""}</text>`);
  // x tick labels at the observed grid values
  for (const v of [...new Set(allX)].sort((a, b) => a - b)) {
    parts.push(
      `<text x="${fmt(sx(v))}" y="${y0 + 20}" text-anchor="middle" font-size="12">${fmt(v)}</text>`);
  }
  data.series.forEach((s, index) => {
    const color = PALETTE[index % PALETTE.length];
    const pathPoints = s.x
      .map((v, i) => `${fmt(sx(v))},${fmt(sy(s.mean[i]))}`)
      .join(" ");
    parts.push(
      `<polyline points="${pathPoints}" fill="none" stroke="${color}" stroke-width="2" data-series="${s.algorithm}"/>`);
    s.x.forEach((v, i) => {
      const cx = sx(v);
      parts.push(
        `<circle cx="${fmt(cx)}" cy="${fmt(sy(s.mean[i]))}" r="3" fill="${color}"/>`);
      const top = sy(s.mean[i] + s.std[i]);
      const bottom = sy(Math.max(s.mean[i] - s.std[i], logY ? 1 : -Infinity));
      parts.push(
        `<line x1="${fmt(cx)}" y1="${fmt(top)}" x2="${fmt(cx)}" y2="${fmt(bottom)}" stroke="${color}" stroke-width="1"/>`);
    });
    const ly = MARGIN.top + 20 * index;
    parts.push(
      `<line x1="${WIDTH - MARGIN.right + 10}" y1="${ly}" x2="${WIDTH - MARGIN.right + 40}" y2="${ly}" stroke="${color}" stroke-width="2"/>`);
    parts.push(
      `<text x="${WIDTH - MARGIN.right + 46}" y="${ly + 4}" font-size="12">${s.algorithm}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/** Recover the embedded data block from a rendered curve file. */
export function parseCurveMetadata(svgText: string): CurveData {
  const match = svgText.match(
    /<metadata id="plot-data">(.*?)<\/metadata>/s);
  if (!match) {
    throw new SchemaError("no embedded plot-data metadata found");
  }
  return JSON.parse(match[1]) as CurveData;
}
