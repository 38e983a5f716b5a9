"""Cell addresses and rectangular ranges in A1 notation."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MalformedAddress, OutOfBounds

MAX_COL = 16384
MAX_ROW = 1048576

_A1_RE = re.compile(r"^(?:([^!]+)!)?([A-Z]+)([0-9]+)$")


def col_to_letters(col: int) -> str:
    """1 -> "A", 27 -> "AA" (bijective base 26)."""
    s = ""
    while col:
        col, rem = divmod(col - 1, 26)
        s = chr(ord("A") + rem) + s
    return s


def letters_to_col(letters: str) -> int:
    col = 0
    for ch in letters:
        col = col * 26 + (ord(ch) - ord("A") + 1)
    return col


@dataclass(frozen=True, order=True)
class CellAddress:
    sheet: str
    col: int
    row: int

    def a1(self, with_sheet: bool = False) -> str:
        text = f"{col_to_letters(self.col)}{self.row}"
        return f"{self.sheet}!{text}" if with_sheet else text

    def offset(self, dcol: int, drow: int) -> "CellAddress":
        col, row = self.col + dcol, self.row + drow
        if not (1 <= col <= MAX_COL and 1 <= row <= MAX_ROW):
            raise OutOfBounds(f"offset ({dcol},{drow}) from {self.a1()} leaves the grid")
        return CellAddress(self.sheet, col, row)

    def __str__(self):
        return self.a1()


def parse_a1(text: str, default_sheet: str = "") -> CellAddress:
    """Parse "A1" or "Sheet!A1"; column letters must be uppercase."""
    m = _A1_RE.match(text)
    if not m:
        raise MalformedAddress(f"not a cell address: {text!r}")
    sheet = m.group(1) or default_sheet
    col = letters_to_col(m.group(2))
    row = int(m.group(3))
    if col > MAX_COL or row > MAX_ROW or row < 1:
        raise OutOfBounds(f"address {text!r} exceeds grid limits")
    return CellAddress(sheet, col, row)


@dataclass(frozen=True, order=True)
class CellRange:
    """Normalized rectangle: start is the top-left corner, end bottom-right."""

    start: CellAddress
    end: CellAddress

    def __post_init__(self):
        if self.start.sheet != self.end.sheet:
            raise MalformedAddress("range corners on different sheets")
        if self.start.col > self.end.col or self.start.row > self.end.row:
            s, e = self.start, self.end
            object.__setattr__(self, "start", CellAddress(s.sheet, min(s.col, e.col), min(s.row, e.row)))
            object.__setattr__(self, "end", CellAddress(s.sheet, max(s.col, e.col), max(s.row, e.row)))

    @property
    def sheet(self) -> str:
        return self.start.sheet

    @property
    def width(self) -> int:
        return self.end.col - self.start.col + 1

    @property
    def height(self) -> int:
        return self.end.row - self.start.row + 1

    @property
    def area(self) -> int:
        return self.width * self.height

    def contains(self, addr: CellAddress) -> bool:
        return (addr.sheet == self.sheet
                and self.start.col <= addr.col <= self.end.col
                and self.start.row <= addr.row <= self.end.row)

    def overlaps(self, other: "CellRange") -> bool:
        return (self.sheet == other.sheet
                and self.start.col <= other.end.col and other.start.col <= self.end.col
                and self.start.row <= other.end.row and other.start.row <= self.end.row)

    def cells(self):
        for row in range(self.start.row, self.end.row + 1):
            for col in range(self.start.col, self.end.col + 1):
                yield CellAddress(self.sheet, col, row)

    def a1(self, with_sheet: bool = False) -> str:
        if self.start == self.end:
            return self.start.a1(with_sheet)
        return f"{self.start.a1(with_sheet)}:{self.end.a1()}"

    def __str__(self):
        return self.a1()


def single_cell(addr: CellAddress) -> CellRange:
    return CellRange(addr, addr)


def parse_range_a1(text: str, default_sheet: str = "") -> CellRange:
    if ":" in text:
        a, b = text.split(":", 1)
        start = parse_a1(a, default_sheet)
        end = parse_a1(b, start.sheet)
        return CellRange(start, end)
    return single_cell(parse_a1(text, default_sheet))
