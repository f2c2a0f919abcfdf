/** Top-level rendering entry point: read the sweep output files, validate
 * them against the requested plot kind, and write the artifact. Nothing is
 * written if validation fails. */

import { readFileSync, writeFileSync } from "node:fs";

import { aggregate } from "./aggregate.js";
import {
  EmptyResultsError,
  parseResults,
  parseSummary,
  SchemaError,
} from "./schema.js";
import { renderVaryCurve } from "./varyCurve.js";
import { renderWeightTable } from "./weightTable.js";

export type PlotKind = "vary_curve" | "weight_table";

export interface PlotSpec {
  results: string;
  summary?: string;
  kind: PlotKind;
  xField?: string;
  output: string;
  logY?: boolean;
}

const CURVE_PRESETS = new Set(["vary_n", "vary_k", "custom"]);
const TABLE_PRESETS = new Set(["weight_sweep", "custom"]);

/** Render the artifact described by `spec` and return its text. */
export function render(spec: PlotSpec): string {
  const records = parseResults(readFileSync(spec.results, "utf-8"));
  if (spec.summary !== undefined) {
    parseSummary(readFileSync(spec.summary, "utf-8"));
  }
  const presets = new Set(records.map((r) => r.preset));
  const allowed = spec.kind === "vary_curve" ? CURVE_PRESETS : TABLE_PRESETS;
  for (const preset of presets) {
    if (!allowed.has(String(preset))) {
      throw new SchemaError(
        `preset '${preset}' cannot be rendered as '${spec.kind}'`);
    }
  }
  const series = aggregate(records);
  let text: string;
  if (spec.kind === "vary_curve") {
    if (!spec.xField) {
      throw new SchemaError("vary_curve requires an x field (e.g. N, K, D)");
    }
    text = renderVaryCurve(records, series, spec.xField, spec.logY ?? false);
  } else {
    text = renderWeightTable(series);
  }
  writeFileSync(spec.output, text);
  return text;
}

export { EmptyResultsError, SchemaError };
