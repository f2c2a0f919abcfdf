/** Aggregation over raw records — every displayed number is recomputed here
 * from the CSV, never copied from the summary file. Sums run in row order so
 * the results match the harness's own aggregation bit for bit. */

import { ResultRecord, appearanceOrder } from "./schema.js";

export interface SeriesPoint {
  gridPoint: string;
  mean: number;
  std: number;
  n: number;
}

export interface Series {
  algorithm: string;
  points: SeriesPoint[];
}

function mean(values: number[]): number {
  let total = 0;
  for (const v of values) total += v;
  return total / values.length;
}

function sampleStd(values: number[], m: number): number {
  if (values.length < 2) return 0;
  let total = 0;
  for (const v of values) total += (v - m) * (v - m);
  return Math.sqrt(total / (values.length - 1));
}

/** Mean/std stopping time per (algorithm, grid point), in appearance order. */
export function aggregate(records: ResultRecord[]): Series[] {
  const gridPoints = appearanceOrder(records, "grid_point");
  const algorithms = appearanceOrder(records, "algorithm");
  return algorithms.map((algorithm) => ({
    algorithm,
    points: gridPoints.map((gridPoint) => {
      const values = records
        .filter((r) => r.algorithm === algorithm && r.grid_point === gridPoint)
        .map((r) => r.stopping_time);
      const m = mean(values);
      return { gridPoint, mean: m, std: sampleStd(values, m), n: values.length };
    }),
  }));
}
