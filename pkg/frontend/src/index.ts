export {
  parseResults,
  parseSummary,
  appearanceOrder,
  SchemaError,
  EmptyResultsError,
} from "./schema.js";
export type { ResultRecord, SummaryEntry } from "./schema.js";
export { aggregate } from "./aggregate.js";
export type { Series, SeriesPoint } from "./aggregate.js";
export { renderVaryCurve, parseCurveMetadata, xValues } from "./varyCurve.js";
export type { CurveData } from "./varyCurve.js";
export { renderWeightTable, parseWeightTable } from "./weightTable.js";
export { render } from "./render.js";
export type { PlotSpec, PlotKind } from "./render.js";
