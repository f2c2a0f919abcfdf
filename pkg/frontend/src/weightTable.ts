/** Plain-text comparison table: one row per algorithm, one column per weight
 * configuration (grid point), cells showing mean stopping time with sample
 * std in parentheses. */

import { Series } from "./aggregate.js";

function cell(mean: number, std: number): string {
  return `${mean.toFixed(1)} (${std.toFixed(1)})`;
}

export function renderWeightTable(series: Series[]): string {
  const gridPoints = series[0]?.points.map((p) => p.gridPoint) ?? [];
  const header = ["algorithm", ...gridPoints];
  const rows = series.map((s) => [
    s.algorithm,
    ...s.points.map((p) => cell(p.mean, p.std)),
  ]);
  const widths = header.map((h, col) =>
    Math.max(h.length, ...rows.map((r) => r[col].length)));
  const line = (cells: string[]) =>
    cells.map((c, col) => c.padEnd(widths[col])).join("  ").trimEnd();
  const rule = widths.map((w) => "-".repeat(w)).join("  ");
  return [line(header), rule, ...rows.map(line)].join("\n") + "\n";
}

/** Parse a rendered table back into {algorithm -> gridPoint -> mean}. */
export function parseWeightTable(
  text: string,
): { gridPoints: string[]; means: Map<string, number[]> } {
  const lines = text.trimEnd().split("\n");
  const gridPoints = lines[0].trim().split(/\s{2,}/).slice(1);
  const means = new Map<string, number[]>();
  for (const row of lines.slice(2)) {
    const cells = row.trim().split(/\s{2,}/);
    means.set(
      cells[0],
      cells.slice(1).map((c) => Number(c.split(" ")[0])));
  }
  return { gridPoints, means };
}
