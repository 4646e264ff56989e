export { CSV_COLUMNS, RecordRow, SchemaError, parseRecordsCsv } from "./schema.js";
export {
  SCHEME_ORDER,
  SchemeStats,
  Summary,
  mean,
  orderedSchemes,
  percentile,
  runningMean,
  spreadHistogram,
  summarize,
} from "./stats.js";
export { renderBarChart, renderHistogram, renderLineChart } from "./svg.js";
export {
  CHECK_RTOL,
  FIGURE_KINDS,
  FigureKind,
  ReportOutputs,
  SidecarValues,
  buildFigure,
  crossCheck,
  writeReport,
} from "./report.js";
export { main, parseArgs } from "./cli.js";
