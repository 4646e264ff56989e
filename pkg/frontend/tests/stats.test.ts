import assert from "node:assert/strict";
import { test } from "node:test";

import { RecordRow } from "../src/schema.js";
import {
  mean,
  orderedSchemes,
  percentile,
  runningMean,
  spreadHistogram,
  summarize,
} from "../src/stats.js";

function row(partial: Partial<RecordRow> & { scheme: string; completion_time: number }): RecordRow {
  return {
    seed: 0,
    iteration: 1,
    straggler_count: 0,
    max_spread: 0,
    recovery_flag: 1,
    fallback_used: 0,
    ...partial,
  };
}

test("mean and percentile on known values", () => {
  assert.equal(mean([1, 2, 3, 10]), 4);
  assert.equal(percentile([1, 2, 3, 10], 50), 2.5);
  assert.equal(percentile([1, 2, 3, 4], 100), 4);
  assert.equal(percentile([0, 10], 95), 9.5);
});

test("improvement fraction: means 2 vs 3 saves one third", () => {
  const rows = [
    row({ scheme: "A", completion_time: 2 }),
    row({ scheme: "B", completion_time: 3 }),
  ];
  const summary = summarize(rows);
  assert.ok(Math.abs(summary.improvements["A_vs_B"] - 1 / 3) < 1e-12);
  assert.ok(Math.abs(summary.improvements["B_vs_A"] - -0.5) < 1e-12);
});

test("identical schemes give zero improvement", () => {
  const rows = [
    row({ scheme: "A", completion_time: 2.5 }),
    row({ scheme: "B", completion_time: 2.5 }),
  ];
  const summary = summarize(rows);
  assert.equal(summary.improvements["A_vs_B"], 0);
});

test("scheme order puts the lower bound leftmost", () => {
  const rows = ["GC", "LB", "GC-SC", "GC-DC", "XX"].map((scheme) =>
    row({ scheme, completion_time: 1 }),
  );
  assert.deepEqual(orderedSchemes(rows), ["LB", "GC-DC", "GC-SC", "GC", "XX"]);
});

test("running mean averages seeds before accumulating", () => {
  const rows = [
    row({ scheme: "GC", iteration: 1, completion_time: 1, seed: 0 }),
    row({ scheme: "GC", iteration: 1, completion_time: 3, seed: 1 }),
    row({ scheme: "GC", iteration: 2, completion_time: 4, seed: 0 }),
    row({ scheme: "GC", iteration: 2, completion_time: 4, seed: 1 }),
  ];
  const series = runningMean(rows, "GC");
  assert.deepEqual(series.iterations, [1, 2]);
  assert.deepEqual(series.running_mean, [2, 3]);
});

test("spread histogram counts every clustered record once", () => {
  const rows = [
    row({ scheme: "GC-SC", max_spread: 1, completion_time: 1 }),
    row({ scheme: "GC-SC", max_spread: 2, completion_time: 1 }),
    row({ scheme: "GC-DC", max_spread: 1, completion_time: 1 }),
    row({ scheme: "GC", max_spread: 5, completion_time: 1 }),
  ];
  const hist = spreadHistogram(rows);
  assert.deepEqual(hist.bins, [0, 1, 2]);
  assert.deepEqual(hist.counts["GC-SC"], [0, 1, 1]);
  assert.deepEqual(hist.counts["GC-DC"], [0, 1, 0]);
  assert.ok(!("GC" in hist.counts));
});

test("spread histogram requires a clustered scheme", () => {
  assert.throws(() => spreadHistogram([row({ scheme: "GC", completion_time: 1 })]));
});
