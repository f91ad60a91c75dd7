/** Parsing and rendering of linearized tables.
 *
 * Format: an optional "title | <text>" first line, then one row per
 * line with " | " separators; a literal pipe inside a cell is escaped
 * as "\|". The first data row is the header row.
 */

export interface ParsedTable {
  title: string;
  headers: string[];
  rows: string[][];
}

const CELL_SEPARATOR = /(?<!\\)\|/;

function splitRow(line: string): string[] {
  return line
    .split(CELL_SEPARATOR)
    .map((cell) => cell.replace(/\\\|/g, '|').trim());
}

export function parseLinearizedTable(text: string): ParsedTable {
  const lines = text
    .split('\n')
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  let title = '';
  if (lines.length > 0 && /^title\s*(?<!\\)\|/.test(lines[0]!)) {
    title = splitRow(lines[0]!).slice(1).join(' | ');
    lines.shift();
  }
  const headers = lines.length > 0 ? splitRow(lines[0]!) : [];
  const rows = lines.slice(1).map(splitRow);
  // pad ragged rows so the grid stays rectangular
  const width = Math.max(headers.length, ...rows.map((r) => r.length), 0);
  for (const row of rows) {
    while (row.length < width) row.push('');
  }
  return { title, headers, rows };
}

/** Render the table as an HTML grid element. */
export function renderTable(doc: Document, parsed: ParsedTable): HTMLTableElement {
  const table = doc.createElement('table');
  table.className = 'data-table';
  if (parsed.headers.length > 0) {
    const thead = doc.createElement('thead');
    const tr = doc.createElement('tr');
    for (const header of parsed.headers) {
      const th = doc.createElement('th');
      th.textContent = header;
      tr.appendChild(th);
    }
    thead.appendChild(tr);
    table.appendChild(thead);
  }
  const tbody = doc.createElement('tbody');
  for (const row of parsed.rows) {
    const tr = doc.createElement('tr');
    for (const cell of row) {
      const td = doc.createElement('td');
      td.textContent = cell;
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
  table.appendChild(tbody);
  return table;
}
