/** CSV loading and header validation against a figure's required columns. */

import { readFileSync } from "fs";
import { parse } from "papaparse";

import { FigureSpec, requiredColumns } from "./figures";

export class SchemaMismatchError extends Error {
  readonly missingColumn: string;

  constructor(missingColumn: string, available: string[]) {
    const have = available.length ? available.join(", ") : "(none)";
    super(
      `CSV is missing required column "${missingColumn}"; columns present: ${have}`
    );
    this.name = "SchemaMismatchError";
    this.missingColumn = missingColumn;
  }
}

export type Row = Record<string, unknown>;

export interface Table {
  columns: string[];
  rows: Row[];
}

export function parseTable(csvText: string): Table {
  const parsed = parse<Row>(csvText.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  const columns = parsed.meta.fields ?? [];
  return { columns, rows: parsed.data };
}

export function loadTable(csvPath: string): Table {
  return parseTable(readFileSync(csvPath, "utf8"));
}

/** Throws SchemaMismatchError naming the first column the figure needs but the CSV lacks. */
export function checkColumns(table: Table, spec: FigureSpec): void {
  for (const column of requiredColumns(spec)) {
    if (!table.columns.includes(column)) {
      throw new SchemaMismatchError(column, table.columns);
    }
  }
}
