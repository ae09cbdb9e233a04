/** Strict numeric CSV tables, matching the schemas the pipeline writes:
 * one header row, comma-separated, every body cell a finite decimal. */

import * as fs from "node:fs";
import Papa from "papaparse";

import { FigureError, IncompleteGridError, MissingColumnError } from "./errors.js";

export interface Table {
  /** Path the table came from, used in error messages. */
  file: string;
  header: string[];
  /** rows[i][j] aligns with header[j]. */
  rows: number[][];
}

export function readTable(file: string): Table {
  const text = fs.readFileSync(file, "utf-8");
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new FigureError(`${file}: ${first.message} (row ${first.row})`);
  }
  const grid = parsed.data;
  if (grid.length === 0) {
    throw new IncompleteGridError(`${file}: empty file`);
  }
  const header = grid[0].map((name) => name.trim());
  const rows: number[][] = [];
  for (let i = 1; i < grid.length; i++) {
    if (grid[i].length !== header.length) {
      throw new FigureError(
        `${file}: row ${i + 1} has ${grid[i].length} cells, expected ${header.length}`);
    }
    const row = grid[i].map((cell, j) => {
      const value = Number(cell);
      if (!Number.isFinite(value)) {
        throw new FigureError(
          `${file}: row ${i + 1}, column '${header[j]}': not a number: '${cell}'`);
      }
      return value;
    });
    rows.push(row);
  }
  return { file, header, rows };
}

/** One column as a vector; unknown names are a MissingColumn error. */
export function column(table: Table, name: string): number[] {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new MissingColumnError(table.file, name, table.header);
  }
  return table.rows.map((row) => row[index]);
}

export function hasColumn(table: Table, name: string): boolean {
  return table.header.includes(name);
}

/** Figures cannot be drawn from zero rows; report that as an empty grid. */
export function requireRows(table: Table): Table {
  if (table.rows.length === 0) {
    throw new IncompleteGridError(`${table.file}: no data rows`);
  }
  return table;
}
