/**
 * Parsing and validation of the records CSV written by `gcsim run`.
 *
 * Columns, in order:
 *   seed, iteration, scheme, completion_time, straggler_count, max_spread,
 *   recovery_flag, fallback_used
 */

export const CSV_COLUMNS = [
  "seed",
  "iteration",
  "scheme",
  "completion_time",
  "straggler_count",
  "max_spread",
  "recovery_flag",
  "fallback_used",
] as const;

export interface RecordRow {
  seed: number;
  iteration: number;
  scheme: string;
  completion_time: number;
  straggler_count: number;
  max_spread: number;
  recovery_flag: number;
  fallback_used: number;
}

export class SchemaError extends Error {}

function parseIntField(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (!Number.isInteger(value)) {
    throw new SchemaError(`line ${line}: ${column}=${JSON.stringify(raw)} is not an integer`);
  }
  return value;
}

function parseFloatField(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(`line ${line}: ${column}=${JSON.stringify(raw)} is not a number`);
  }
  return value;
}

/** Parse CSV text; throws SchemaError with column diagnostics on mismatch. */
export function parseRecordsCsv(text: string): RecordRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`empty file, expected header ${CSV_COLUMNS.join(",")}`);
  }
  const header = lines[0].split(",");
  const missing = CSV_COLUMNS.filter((c) => !header.includes(c));
  const unexpected = header.filter((c) => !(CSV_COLUMNS as readonly string[]).includes(c));
  if (missing.length > 0 || unexpected.length > 0 || header.length !== CSV_COLUMNS.length) {
    throw new SchemaError(
      `bad header; missing columns [${missing.join(", ")}], unexpected [${unexpected.join(", ")}]`,
    );
  }
  const rows: RecordRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== CSV_COLUMNS.length) {
      throw new SchemaError(`line ${i + 1}: expected ${CSV_COLUMNS.length} fields, got ${parts.length}`);
    }
    rows.push({
      seed: parseIntField(parts[0], "seed", i + 1),
      iteration: parseIntField(parts[1], "iteration", i + 1),
      scheme: parts[2],
      completion_time: parseFloatField(parts[3], "completion_time", i + 1),
      straggler_count: parseIntField(parts[4], "straggler_count", i + 1),
      max_spread: parseIntField(parts[5], "max_spread", i + 1),
      recovery_flag: parseIntField(parts[6], "recovery_flag", i + 1),
      fallback_used: parseIntField(parts[7], "fallback_used", i + 1),
    });
  }
  if (rows.length === 0) {
    throw new SchemaError("no data rows");
  }
  return rows;
}
