/** Parsing and validation of the experiment harness output files. */

import Papa from "papaparse";

/** One data row of results.csv. */
export interface ResultRecord {
  grid_point: string;
  algorithm: string;
  preset: string;
  stopping_time: number;
  correct: boolean;
  [key: string]: string | number | boolean;
}

/** One entry of summary.json. */
export interface SummaryEntry {
  grid_point: string;
  algorithm: string;
  mean: number;
  std: number;
  n: number;
}

export class SchemaError extends Error {}
export class EmptyResultsError extends Error {}

const REQUIRED_COLUMNS = ["grid_point", "algorithm", "preset", "stopping_time"];
const NUMERIC_COLUMNS = new Set([
  "seed", "N", "K", "D", "epsilon", "delta", "beta_scale",
  "stopping_time", "rounds",
]);

/** Parse results.csv text, checking the columns the renderers rely on. */
export function parseResults(csvText: string): ResultRecord[] {
  const parsed = Papa.parse<Record<string, string>>(csvText.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  for (const column of REQUIRED_COLUMNS) {
    if (!fields.includes(column)) {
      throw new SchemaError(`results file is missing column '${column}'`);
    }
  }
  if (parsed.data.length === 0) {
    throw new EmptyResultsError("results file contains no data rows");
  }
  return parsed.data.map((row) => {
    const record: ResultRecord = {
      grid_point: row.grid_point,
      algorithm: row.algorithm,
      preset: row.preset,
      stopping_time: Number(row.stopping_time),
      correct: row.correct === "true",
    };
    for (const [key, value] of Object.entries(row)) {
      if (!(key in record)) {
        record[key] = NUMERIC_COLUMNS.has(key) ? Number(value) : value;
      }
    }
    if (!Number.isFinite(record.stopping_time)) {
      throw new SchemaError(
        `non-numeric stopping_time '${row.stopping_time}' in results file`);
    }
    return record;
  });
}

export function parseSummary(jsonText: string): SummaryEntry[] {
  let data: unknown;
  try {
    data = JSON.parse(jsonText);
  } catch {
    throw new SchemaError("summary file is not valid JSON");
  }
  if (!Array.isArray(data)) {
    throw new SchemaError("summary file must be a JSON array");
  }
  for (const entry of data) {
    for (const key of ["grid_point", "algorithm", "mean", "std", "n"]) {
      if (!(key in (entry as object))) {
        throw new SchemaError(`summary entry is missing field '${key}'`);
      }
    }
  }
  return data as SummaryEntry[];
}

/** Stable first-appearance order of a field's values. */
export function appearanceOrder(
  records: ResultRecord[], field: "grid_point" | "algorithm",
): string[] {
  const seen: string[] = [];
  for (const record of records) {
    const value = String(record[field]);
    if (!seen.includes(value)) seen.push(value);
  }
  return seen;
}
