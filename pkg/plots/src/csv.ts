/** Minimal CSV reader for the simulator's outputs (no quoting, no escapes). */

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(content: string): Table {
  const lines = content.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    return { header: [], rows: [] };
  }
  const [first, ...rest] = lines;
  return {
    header: first.split(","),
    rows: rest.map((l) => l.split(",")),
  };
}

export function toObjects(table: Table): Record<string, string>[] {
  return table.rows.map((cells) => {
    const obj: Record<string, string> = {};
    table.header.forEach((name, i) => {
      obj[name] = cells[i] ?? "";
    });
    return obj;
  });
}
