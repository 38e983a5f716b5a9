// A1 helpers for rendering only; no structural computation happens here.

export interface Rect {
  sheet: string | null;
  c1: number;
  r1: number;
  c2: number;
  r2: number;
}

export function colToLetters(col: number): string {
  let out = "";
  let n = col;
  while (n > 0) {
    const rem = (n - 1) % 26;
    out = String.fromCharCode(65 + rem) + out;
    n = Math.floor((n - 1) / 26);
  }
  return out;
}

export function lettersToCol(letters: string): number {
  let n = 0;
  for (const ch of letters) {
    n = n * 26 + (ch.charCodeAt(0) - 64);
  }
  return n;
}

const CELL_RE = /^\$?([A-Z]{1,3})\$?([0-9]+)$/;

export function parseCell(text: string): { col: number; row: number } {
  const match = CELL_RE.exec(text);
  if (!match) throw new Error(`bad cell address: ${text}`);
  return { col: lettersToCol(match[1]), row: parseInt(match[2], 10) };
}

/** Parses "D2:D8", "C6" or "Loan!C2:C9" into an inclusive rectangle. */
export function parseRange(text: string): Rect {
  let sheet: string | null = null;
  let rest = text;
  const bang = text.indexOf("!");
  if (bang >= 0) {
    sheet = text.slice(0, bang);
    rest = text.slice(bang + 1);
  }
  const [first, second] = rest.split(":");
  const start = parseCell(first);
  const end = second ? parseCell(second) : start;
  return {
    sheet,
    c1: Math.min(start.col, end.col),
    r1: Math.min(start.row, end.row),
    c2: Math.max(start.col, end.col),
    r2: Math.max(start.row, end.row),
  };
}

export function cellName(col: number, row: number): string {
  return `${colToLetters(col)}${row}`;
}

export function rectContains(rect: Rect, col: number, row: number): boolean {
  return col >= rect.c1 && col <= rect.c2 && row >= rect.r1 && row <= rect.r2;
}
