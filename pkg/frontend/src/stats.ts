/**
 * Per-scheme statistics over records, matching the numbers `gcsim summarize`
 * reports (same linear-interpolation percentile convention).
 */

import { RecordRow } from "./schema.js";

/** Left-to-right display order: the lower bound first, then what it bounds. */
export const SCHEME_ORDER = ["LB", "GC-DC", "GC-SC", "GC"] as const;

export interface SchemeStats {
  mean: number;
  median: number;
  p95: number;
  n_records: number;
  recovery_rate: number;
  fallback_rate: number;
}

export interface Summary {
  schemes: Record<string, SchemeStats>;
  improvements: Record<string, number>;
}

export function mean(values: number[]): number {
  if (values.length === 0) throw new Error("mean of empty list");
  return values.reduce((acc, v) => acc + v, 0) / values.length;
}

/** Linear-interpolation percentile over a sorted copy, q in [0, 100]. */
export function percentile(values: number[], q: number): number {
  if (values.length === 0) throw new Error("percentile of empty list");
  const sorted = [...values].sort((a, b) => a - b);
  const pos = ((sorted.length - 1) * q) / 100;
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  if (lo === hi) return sorted[lo];
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

export function orderedSchemes(rows: RecordRow[]): string[] {
  const present = new Set(rows.map((row) => row.scheme));
  const ordered = SCHEME_ORDER.filter((s) => present.has(s)) as string[];
  const extras = [...present].filter((s) => !(SCHEME_ORDER as readonly string[]).includes(s)).sort();
  return ordered.concat(extras);
}

export function summarize(rows: RecordRow[]): Summary {
  const schemes: Record<string, SchemeStats> = {};
  for (const scheme of orderedSchemes(rows)) {
    const subset = rows.filter((row) => row.scheme === scheme);
    const times = subset.map((row) => row.completion_time);
    schemes[scheme] = {
      mean: mean(times),
      median: percentile(times, 50),
      p95: percentile(times, 95),
      n_records: subset.length,
      recovery_rate: mean(subset.map((row) => row.recovery_flag)),
      fallback_rate: mean(subset.map((row) => row.fallback_used)),
    };
  }
  const improvements: Record<string, number> = {};
  const names = Object.keys(schemes);
  for (const a of names) {
    for (const b of names) {
      if (a !== b && schemes[b].mean > 0) {
        improvements[`${a}_vs_${b}`] = 1 - schemes[a].mean / schemes[b].mean;
      }
    }
  }
  return { schemes, improvements };
}

export interface RunningMeanSeries {
  iterations: number[];
  running_mean: number[];
}

/** Cumulative mean of the per-iteration (across seeds) mean completion time. */
export function runningMean(rows: RecordRow[], scheme: string): RunningMeanSeries {
  const perIteration = new Map<number, number[]>();
  for (const row of rows) {
    if (row.scheme !== scheme) continue;
    const bucket = perIteration.get(row.iteration) ?? [];
    bucket.push(row.completion_time);
    perIteration.set(row.iteration, bucket);
  }
  const iterations = [...perIteration.keys()].sort((a, b) => a - b);
  const running: number[] = [];
  let acc = 0;
  iterations.forEach((t, index) => {
    acc += mean(perIteration.get(t)!);
    running.push(acc / (index + 1));
  });
  return { iterations, running_mean: running };
}

export interface SpreadHistogram {
  bins: number[];
  counts: Record<string, number[]>;
}

/** Distribution of per-iteration worst-cluster straggler counts. */
export function spreadHistogram(rows: RecordRow[]): SpreadHistogram {
  const clustered: string[] = orderedSchemes(rows).filter(
    (s) => s === "GC-SC" || s === "GC-DC",
  );
  if (clustered.length === 0) {
    throw new Error("spread histogram needs GC-SC or GC-DC records");
  }
  const top = Math.max(
    ...rows.filter((row) => clustered.includes(row.scheme)).map((row) => row.max_spread),
  );
  const bins = Array.from({ length: top + 1 }, (_, i) => i);
  const counts: Record<string, number[]> = {};
  for (const scheme of clustered) {
    counts[scheme] = bins.map(
      (b) => rows.filter((row) => row.scheme === scheme && row.max_spread === b).length,
    );
  }
  return { bins, counts };
}
