/** The metrics CSV contract: exact headers and cell types.
 *
 * Validation reports every deviation instead of throwing, so callers can
 * surface all problems in one pass.
 */
import { z } from "zod";

import { Table } from "./csv";

const numberCell = z
  .string()
  .refine((s) => s !== "" && Number.isFinite(Number(s)), "numeric cell required");
const optionalNumberCell = z
  .string()
  .refine((s) => s === "" || Number.isFinite(Number(s)), "numeric or empty cell required");
const intCell = z
  .string()
  .refine((s) => /^-?\d+$/.test(s), "integer cell required");
const textCell = z.string().min(1);

export const SUMMARY_HEADER = [
  "scheme", "seed", "proactiveness", "zipf_z", "traffic_mbps",
  "n_measured", "n_local", "n_cloudlet", "n_cache",
  "avg_total_delay_s", "avg_offloaded_delay_s",
  "reliability_violation_rate", "cache_hit_rate",
] as const;

export const CCDF_HEADER = ["threshold", "probability", "scheme", "seed"] as const;

const SWEEP_METRICS = [
  "avg_total_delay_s", "avg_offloaded_delay_s",
  "reliability_violation_rate", "cache_hit_rate",
];

export const SWEEP_HEADER = [
  "axis", "axis_value", "scheme", "zipf_z", "n_seeds",
  ...SWEEP_METRICS.flatMap((m) => [`${m}_mean`, `${m}_std`]),
];

const CELL_SCHEMAS: Record<string, z.ZodTypeAny> = {
  scheme: textCell,
  axis: textCell,
  seed: intCell,
  n_measured: intCell,
  n_local: intCell,
  n_cloudlet: intCell,
  n_cache: intCell,
  n_seeds: intCell,
  proactiveness: numberCell,
  zipf_z: numberCell,
  traffic_mbps: numberCell,
  threshold: numberCell,
  probability: numberCell,
  axis_value: numberCell,
};

function cellSchema(column: string): z.ZodTypeAny {
  if (column in CELL_SCHEMAS) {
    return CELL_SCHEMAS[column];
  }
  // metric aggregates may be blank when a metric is undefined for a run
  return optionalNumberCell;
}

export type CsvKind = "summary" | "ccdf" | "sweep";

export function expectedHeader(kind: CsvKind): string[] {
  switch (kind) {
    case "summary":
      return [...SUMMARY_HEADER];
    case "ccdf":
      return [...CCDF_HEADER];
    case "sweep":
      return SWEEP_HEADER;
  }
}

export interface Violation {
  row: number; // 0 = header
  column: string;
  message: string;
}

export function validateContract(table: Table, kind: CsvKind): Violation[] {
  const violations: Violation[] = [];
  const expected = expectedHeader(kind);
  for (let i = 0; i < Math.max(expected.length, table.header.length); i++) {
    if (table.header[i] !== expected[i]) {
      violations.push({
        row: 0,
        column: expected[i] ?? table.header[i],
        message: `header mismatch at position ${i}: expected ${expected[i] ?? "<none>"}, got ${table.header[i] ?? "<none>"}`,
      });
      return violations; // header is broken; cell checks would be meaningless
    }
  }
  table.rows.forEach((cells, r) => {
    if (cells.length !== expected.length) {
      violations.push({
        row: r + 1,
        column: "*",
        message: `expected ${expected.length} cells, got ${cells.length}`,
      });
      return;
    }
    expected.forEach((column, c) => {
      const check = cellSchema(column).safeParse(cells[c]);
      if (!check.success) {
        violations.push({
          row: r + 1,
          column,
          message: `${check.error.issues[0].message} (got ${JSON.stringify(cells[c])})`,
        });
      }
    });
  });
  return violations;
}
