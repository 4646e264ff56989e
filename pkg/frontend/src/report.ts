/**
 * Report generation: records CSV in, SVG figure + numeric sidecar out, with
 * an optional cross-check against the summary JSON written by the simulator.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { parseRecordsCsv, RecordRow } from "./schema.js";
import { orderedSchemes, runningMean, spreadHistogram, summarize } from "./stats.js";
import { renderBarChart, renderHistogram, renderLineChart } from "./svg.js";

export const FIGURE_KINDS = ["avg-completion-bar", "running-mean-line", "spread-histogram"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

// Relative tolerance when comparing recomputed means to the summary JSON.
export const CHECK_RTOL = 1e-9;

export interface SidecarValues {
  kind: FigureKind;
  schemes: string[];
  values?: number[];
  series?: Record<string, { iterations: number[]; running_mean: number[] }>;
  bins?: number[];
  counts?: Record<string, number[]>;
}

export function buildFigure(rows: RecordRow[], kind: FigureKind, title: string): {
  svg: string;
  values: SidecarValues;
} {
  if (kind === "avg-completion-bar") {
    const summary = summarize(rows);
    const schemes = orderedSchemes(rows);
    const values = schemes.map((s) => summary.schemes[s].mean);
    return {
      svg: renderBarChart(schemes, values, title),
      values: { kind, schemes, values },
    };
  }
  if (kind === "running-mean-line") {
    const schemes = orderedSchemes(rows);
    const series: SidecarValues["series"] = {};
    const lines = schemes.map((scheme, i) => {
      const s = runningMean(rows, scheme);
      series![scheme] = s;
      return { label: scheme, xs: s.iterations, ys: s.running_mean };
    });
    return { svg: renderLineChart(lines, title), values: { kind, schemes, series } };
  }
  const hist = spreadHistogram(rows);
  const schemes = Object.keys(hist.counts);
  return {
    svg: renderHistogram(hist.bins, hist.counts, title),
    values: { kind, schemes, bins: hist.bins, counts: hist.counts },
  };
}

export interface CheckMismatch {
  scheme: string;
  csvMean: number;
  summaryMean: number;
}

/** Compare recomputed per-scheme means against a summary JSON payload. */
export function crossCheck(rows: RecordRow[], summaryJson: unknown): CheckMismatch[] {
  const summary = summarize(rows);
  const payload = summaryJson as Record<string, { mean?: number }>;
  const mismatches: CheckMismatch[] = [];
  for (const scheme of orderedSchemes(rows)) {
    const reported = payload[scheme]?.mean;
    if (typeof reported !== "number") {
      mismatches.push({ scheme, csvMean: summary.schemes[scheme].mean, summaryMean: NaN });
      continue;
    }
    const computed = summary.schemes[scheme].mean;
    const scale = Math.max(Math.abs(reported), 1e-30);
    if (Math.abs(computed - reported) / scale > CHECK_RTOL) {
      mismatches.push({ scheme, csvMean: computed, summaryMean: reported });
    }
  }
  return mismatches;
}

export interface ReportOutputs {
  svgPath: string;
  valuesPath: string;
  values: SidecarValues;
}

export function writeReport(
  recordsPath: string,
  kind: FigureKind,
  outPath: string,
  title?: string,
): ReportOutputs {
  const rows = parseRecordsCsv(fs.readFileSync(recordsPath, "utf8"));
  const { svg, values } = buildFigure(rows, kind, title ?? path.basename(recordsPath));
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, svg + "\n");
  const valuesPath = `${outPath}.values.json`;
  fs.writeFileSync(valuesPath, JSON.stringify(values, null, 2) + "\n");
  return { svgPath: outPath, valuesPath, values };
}
