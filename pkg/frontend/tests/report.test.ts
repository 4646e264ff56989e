import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { buildFigure, crossCheck, writeReport } from "../src/report.js";
import { parseRecordsCsv } from "../src/schema.js";
import { summarize } from "../src/stats.js";

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), "..", "..", "fixtures");
const RECORDS = path.join(FIXTURES, "sample_records.csv");
const SUMMARY = path.join(FIXTURES, "sample_summary.json");

function fixtureRows() {
  return parseRecordsCsv(fs.readFileSync(RECORDS, "utf8"));
}

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "gcsim-report-"));
}

test("bar figure values equal the summary means, LB leftmost", () => {
  const rows = fixtureRows();
  const { svg, values } = buildFigure(rows, "avg-completion-bar", "sample");
  assert.deepEqual(values.schemes, ["LB", "GC-DC", "GC-SC", "GC"]);
  const summary = summarize(rows);
  values.schemes.forEach((scheme, i) => {
    assert.ok(Math.abs(values.values![i] - summary.schemes[scheme].mean) < 1e-12);
    assert.match(svg, new RegExp(`data-scheme="${scheme}" data-value="${values.values![i]}"`));
  });
});

test("recomputed means agree with the simulator's summary JSON", () => {
  const rows = fixtureRows();
  const summaryJson = JSON.parse(fs.readFileSync(SUMMARY, "utf8"));
  assert.deepEqual(crossCheck(rows, summaryJson), []);
  // Improvement fractions match too.
  const summary = summarize(rows);
  for (const [pair, fraction] of Object.entries(summaryJson.improvements)) {
    assert.ok(Math.abs(summary.improvements[pair] - (fraction as number)) < 1e-9, pair);
  }
});

test("cross-check flags a corrupted summary", () => {
  const rows = fixtureRows();
  const summaryJson = JSON.parse(fs.readFileSync(SUMMARY, "utf8"));
  summaryJson["GC-DC"].mean *= 1.05;
  const mismatches = crossCheck(rows, summaryJson);
  assert.equal(mismatches.length, 1);
  assert.equal(mismatches[0].scheme, "GC-DC");
});

test("bar heights in the SVG are proportional to the values", () => {
  const rows = fixtureRows();
  const { svg, values } = buildFigure(rows, "avg-completion-bar", "sample");
  const heights = [...svg.matchAll(/data-value="([^"]+)"[^/]*height="([0-9.]+)"/g)].map((m) => ({
    value: Number(m[1]),
    height: Number(m[2]),
  }));
  assert.equal(heights.length, values.schemes.length);
  const ratios = heights.map((h) => h.height / h.value);
  for (const ratio of ratios) {
    assert.ok(Math.abs(ratio - ratios[0]) < 1e-3);
  }
});

test("running-mean series ends at the plain mean", () => {
  const rows = fixtureRows();
  const { values } = buildFigure(rows, "running-mean-line", "sample");
  const gc = values.series!["GC"];
  const times = rows.filter((r) => r.scheme === "GC").map((r) => r.completion_time);
  const plainMean = times.reduce((a, b) => a + b, 0) / times.length;
  assert.ok(Math.abs(gc.running_mean[gc.running_mean.length - 1] - plainMean) < 1e-9);
});

test("writeReport writes the SVG and a matching sidecar", () => {
  const dir = tmpDir();
  const out = path.join(dir, "bar.svg");
  const report = writeReport(RECORDS, "avg-completion-bar", out);
  assert.ok(fs.existsSync(out));
  const sidecar = JSON.parse(fs.readFileSync(report.valuesPath, "utf8"));
  assert.deepEqual(sidecar, report.values);
  assert.match(fs.readFileSync(out, "utf8"), /^<svg /);
});

test("spread histogram counts cover all clustered records", () => {
  const rows = fixtureRows();
  const { values } = buildFigure(rows, "spread-histogram", "sample");
  for (const scheme of values.schemes) {
    const total = values.counts![scheme].reduce((a, b) => a + b, 0);
    assert.equal(total, rows.filter((r) => r.scheme === scheme).length);
  }
});
