#!/usr/bin/env node
/**
 * gcsim-report <records.csv> [--kind K] [--out FILE.svg] [--check summary.json]
 *
 * Renders one SVG figure plus a `.values.json` sidecar with the plotted
 * numbers.  With --check, recomputes per-scheme means from the CSV and
 * verifies them against the summary JSON the simulator wrote.
 *
 * Exit codes: 0 ok, 1 cross-check mismatch, 2 bad input/schema.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { FIGURE_KINDS, FigureKind, crossCheck, writeReport } from "./report.js";
import { SchemaError, parseRecordsCsv } from "./schema.js";

interface Args {
  records: string;
  kind: FigureKind;
  out: string;
  check?: string;
  title?: string;
}

function usage(): string {
  return (
    "usage: gcsim-report <records.csv> [--kind " +
    FIGURE_KINDS.join("|") +
    "] [--out FILE.svg] [--check summary.json] [--title TEXT]"
  );
}

export function parseArgs(argv: string[]): Args {
  const positional: string[] = [];
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg.startsWith("--")) {
      const value = argv[i + 1];
      if (value === undefined) throw new SchemaError(`missing value for ${arg}`);
      flags.set(arg.slice(2), value);
      i++;
    } else {
      positional.push(arg);
    }
  }
  if (positional.length !== 1) throw new SchemaError(usage());
  const kind = (flags.get("kind") ?? "avg-completion-bar") as FigureKind;
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new SchemaError(`unknown --kind ${kind}; expected one of ${FIGURE_KINDS.join(", ")}`);
  }
  return {
    records: positional[0],
    kind,
    out: flags.get("out") ?? positional[0].replace(/\.csv$/, "") + `_${kind}.svg`,
    check: flags.get("check"),
    title: flags.get("title"),
  };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const report = writeReport(args.records, args.kind, args.out, args.title);
    console.log(`wrote ${report.svgPath} and ${report.valuesPath}`);
    if (args.check) {
      const rows = parseRecordsCsv(fs.readFileSync(args.records, "utf8"));
      const summary = JSON.parse(fs.readFileSync(args.check, "utf8"));
      const mismatches = crossCheck(rows, summary);
      if (mismatches.length > 0) {
        for (const m of mismatches) {
          console.error(
            `cross-check mismatch for ${m.scheme}: csv mean ${m.csvMean} vs summary ${m.summaryMean}`,
          );
        }
        return 1;
      }
      console.log(`cross-check ok against ${args.check}`);
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

const entryPoint = process.argv[1] ? path.resolve(process.argv[1]) : "";
if (entryPoint && fileURLToPath(import.meta.url) === entryPoint) {
  process.exit(main(process.argv.slice(2)));
}
