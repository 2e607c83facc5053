import fs from 'fs';
import Papa from 'papaparse';

export class EmptyInput extends Error {}
export class MissingColumn extends Error {}

export interface Table {
  path: string;
  columns: string[];
  rows: Record<string, number>[];
}

/** Read a numeric CSV with a header row; rejects empty inputs. */
export function readCsv(path: string): Table {
  const text = fs.readFileSync(path, 'utf-8');
  const parsed = Papa.parse<Record<string, number>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new Error(`${path}: ${parsed.errors[0].message} (row ${parsed.errors[0].row})`);
  }
  const rows = parsed.data;
  const columns = parsed.meta.fields ?? [];
  if (rows.length === 0 || columns.length === 0) {
    throw new EmptyInput(`${path} has no data rows`);
  }
  return { path, columns, rows };
}

/** Extract one column as numbers, failing loudly when it is absent. */
export function column(table: Table, name: string): number[] {
  if (!table.columns.includes(name)) {
    throw new MissingColumn(`${table.path} has no column '${name}' (found: ${table.columns.join(', ')})`);
  }
  return table.rows.map((r) => Number(r[name]));
}
