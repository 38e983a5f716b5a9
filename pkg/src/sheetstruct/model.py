"""In-memory workbook with canonical JSON I/O and CSV import.

The canonical JSON layout is byte-stable: sheets in stored order, cells
sorted row-major, 2-space indent, keys in schema order. save/load round-trips
are exact, which the undo machinery and golden tests rely on.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from .errors import (
    CsvSyntaxError, FormulaParseError, SchemaError, UnknownSheet,
)
from .formula import parse_formula, print_formula
from .formula.ast import Node
from .formula.parser import format_number
from .grid import CellAddress, CellRange, parse_a1

EMPTY_KIND = "empty"
NUMBER = "number"
TEXT = "text"
BOOL = "bool"
FORMULA = "formula"


@dataclass(frozen=True)
class CellContent:
    kind: str
    number: float = 0.0
    text: str = ""
    boolean: bool = False
    formula_text: str = ""
    ast: Optional[Node] = field(default=None, compare=False, repr=False)
    _rects: Optional[Tuple] = field(default=None, compare=False, repr=False)
    _relkey: Optional[Tuple] = field(default=None, compare=False, repr=False)

    def ref_rects(self) -> Tuple:
        """Absolute (c1, r1, c2, r2) rectangles the formula references."""
        if self._rects is None:
            from .evaluator import _ref_rects
            rects = tuple(_ref_rects(self.ast)) if self.ast is not None else ()
            object.__setattr__(self, "_rects", rects)
        return self._rects

    def relative_key(self, col: int, row: int) -> Optional[Tuple]:
        """Cached kernel (key, shape, rects) triple, valid for one host."""
        if self._relkey is not None and self._relkey[0] == (col, row):
            return self._relkey[1]
        return None

    def cache_relative_key(self, col: int, row: int, value: Tuple):
        object.__setattr__(self, "_relkey", ((col, row), value))

    @property
    def is_empty(self) -> bool:
        return self.kind == EMPTY_KIND

    @property
    def is_formula(self) -> bool:
        return self.kind == FORMULA


EMPTY = CellContent(EMPTY_KIND)


def number_content(value: float) -> CellContent:
    return CellContent(NUMBER, number=float(value))


def text_content(value: str) -> CellContent:
    return CellContent(TEXT, text=value)


def bool_content(value: bool) -> CellContent:
    return CellContent(BOOL, boolean=bool(value))


def formula_content(text: str) -> CellContent:
    """Parses and canonicalizes; raises FormulaParseError on bad input."""
    ast = parse_formula(text)
    return CellContent(FORMULA, formula_text=print_formula(ast), ast=ast)


def content_from_input(text: str) -> CellContent:
    """Classify free-form user input the way the CSV importer does."""
    if text == "":
        return EMPTY
    if text.startswith("="):
        return formula_content(text)
    if text in ("TRUE", "FALSE"):
        return bool_content(text == "TRUE")
    try:
        return number_content(float(text))
    except ValueError:
        return text_content(text)


@dataclass(frozen=True)
class Delta:
    addr: CellAddress
    before: CellContent
    after: CellContent


Coord = Tuple[int, int]  # (col, row)


class Workbook:
    def __init__(self, sheets: Optional[Dict[str, Dict[Coord, CellContent]]] = None,
                 version: str = "1"):
        self.version = version
        self.sheets: Dict[str, Dict[Coord, CellContent]] = sheets or {}
        self._fp: Optional[str] = None

    # -- basics ------------------------------------------------------------

    @property
    def sheet_names(self) -> List[str]:
        return list(self.sheets)

    @property
    def default_sheet(self) -> str:
        if not self.sheets:
            raise UnknownSheet("workbook has no sheets")
        return next(iter(self.sheets))

    def add_sheet(self, name: str):
        if not name:
            raise SchemaError("sheet name must be non-empty")
        if name in self.sheets:
            raise SchemaError(f"duplicate sheet name {name!r}")
        self.sheets[name] = {}
        self._fp = None

    def _cells(self, sheet: str) -> Dict[Coord, CellContent]:
        try:
            return self.sheets[sheet]
        except KeyError:
            raise UnknownSheet(f"no sheet named {sheet!r}") from None

    def get_cell(self, addr: CellAddress) -> CellContent:
        return self._cells(addr.sheet).get((addr.col, addr.row), EMPTY)

    def set_cell(self, addr: CellAddress, content: CellContent) -> Delta:
        cells = self._cells(addr.sheet)
        self._fp = None
        before = cells.get((addr.col, addr.row), EMPTY)
        if content.is_empty:
            cells.pop((addr.col, addr.row), None)
        else:
            if content.is_formula and content.ast is None:
                content = formula_content(content.formula_text)
            cells[(addr.col, addr.row)] = content
        return Delta(addr, before, content)

    def undo_deltas(self, deltas: List[Delta]):
        for delta in reversed(deltas):
            self.set_cell(delta.addr, delta.before)

    def iter_cells(self, sheet: str) -> Iterator[Tuple[CellAddress, CellContent]]:
        for (col, row), content in self._cells(sheet).items():
            yield CellAddress(sheet, col, row), content

    def formula_cells(self, sheet: str) -> List[Tuple[CellAddress, CellContent]]:
        return [(a, c) for a, c in self.iter_cells(sheet) if c.is_formula]

    def used_range(self, sheet: str) -> Optional[CellRange]:
        cells = self._cells(sheet)
        if not cells:
            return None
        cols = [c for c, _ in cells]
        rows = [r for _, r in cells]
        return CellRange(CellAddress(sheet, min(cols), min(rows)),
                         CellAddress(sheet, max(cols), max(rows)))

    def copy(self) -> "Workbook":
        return Workbook({name: dict(cells) for name, cells in self.sheets.items()},
                        version=self.version)

    def restore(self, snapshot: "Workbook"):
        """Adopt a snapshot's cells wholesale (rollback path)."""
        self.sheets = snapshot.sheets
        self._fp = None

    def fingerprint(self) -> str:
        """Digest of the canonical content, cached until the next mutation."""
        if self._fp is None:
            h = hashlib.sha1(self.version.encode("utf-8"))
            for name, cells in self.sheets.items():
                h.update(name.encode("utf-8"))
                h.update(b"\x00")
                for (col, row), c in sorted(cells.items(),
                                            key=lambda kv: (kv[0][1], kv[0][0])):
                    token = (f"{col},{row},{c.kind},{c.number!r},"
                             f"{c.text},{c.boolean},{c.formula_text};")
                    h.update(token.encode("utf-8"))
            self._fp = h.hexdigest()
        return self._fp

    def structural_equals(self, other: "Workbook") -> bool:
        return save_json(self) == save_json(other)


# -- JSON ------------------------------------------------------------------


def _cell_json(addr_text: str, content: CellContent) -> dict:
    if content.kind == NUMBER:
        value = content.number
        if value == int(value) and abs(value) < 1e16:
            value = int(value)
        return {"addr": addr_text, "kind": "number", "value": value}
    if content.kind == TEXT:
        return {"addr": addr_text, "kind": "text", "value": content.text}
    if content.kind == BOOL:
        return {"addr": addr_text, "kind": "bool", "value": content.boolean}
    return {"addr": addr_text, "kind": "formula", "formula": content.formula_text}


def content_to_json(content: CellContent):
    """Content as the cell-object schema minus the addr key; None for empty."""
    if content.is_empty:
        return None
    cell = _cell_json("", content)
    cell.pop("addr")
    return cell


def content_from_json(obj: dict, pointer: str = "") -> CellContent:
    kind = obj.get("kind")
    if kind == "number":
        value = obj.get("value")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError("number cell needs a numeric value", f"{pointer}/value")
        return number_content(float(value))
    if kind == "text":
        value = obj.get("value")
        if not isinstance(value, str):
            raise SchemaError("text cell needs a string value", f"{pointer}/value")
        return text_content(value)
    if kind == "bool":
        value = obj.get("value")
        if not isinstance(value, bool):
            raise SchemaError("bool cell needs a boolean value", f"{pointer}/value")
        return bool_content(value)
    if kind == "formula":
        text = obj.get("formula")
        if not isinstance(text, str) or not text.startswith("="):
            raise SchemaError("formula cell needs a formula string", f"{pointer}/formula")
        return formula_content(text)
    raise SchemaError(f"unknown cell kind {kind!r}", f"{pointer}/kind")


def save_json(wb: Workbook) -> bytes:
    doc = {"version": wb.version, "sheets": []}
    for name, cells in wb.sheets.items():
        cell_list = [
            _cell_json(CellAddress(name, col, row).a1(), content)
            for (col, row), content in sorted(cells.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        ]
        doc["sheets"].append({"name": name, "cells": cell_list})
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def load_json(data: bytes) -> Workbook:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"not valid UTF-8 JSON: {exc}", "") from exc
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", "")
    if doc.get("version") != "1":
        raise SchemaError("unsupported version", "/version")
    sheets = doc.get("sheets")
    if not isinstance(sheets, list):
        raise SchemaError("sheets must be a list", "/sheets")
    wb = Workbook(version="1")
    for si, sheet in enumerate(sheets):
        pointer = f"/sheets/{si}"
        if not isinstance(sheet, dict) or not isinstance(sheet.get("name"), str):
            raise SchemaError("sheet needs a string name", f"{pointer}/name")
        name = sheet["name"]
        if not name or name in wb.sheets:
            raise SchemaError(f"invalid or duplicate sheet name {name!r}", f"{pointer}/name")
        wb.sheets[name] = {}
        cells = sheet.get("cells")
        if not isinstance(cells, list):
            raise SchemaError("cells must be a list", f"{pointer}/cells")
        for ci, cell in enumerate(cells):
            cptr = f"{pointer}/cells/{ci}"
            if not isinstance(cell, dict) or not isinstance(cell.get("addr"), str):
                raise SchemaError("cell needs an addr", f"{cptr}/addr")
            try:
                addr = parse_a1(cell["addr"], name)
            except Exception as exc:
                raise SchemaError(str(exc), f"{cptr}/addr") from exc
            try:
                content = content_from_json(cell, cptr)
            except FormulaParseError as exc:
                raise SchemaError(f"bad formula at {cell['addr']}: {exc}",
                                  f"{cptr}/formula") from exc
            if (addr.col, addr.row) in wb.sheets[name]:
                raise SchemaError(f"duplicate cell {cell['addr']}", f"{cptr}/addr")
            wb.sheets[name][(addr.col, addr.row)] = content
    return wb


# -- CSV -------------------------------------------------------------------


def import_csv(data: bytes, sheet_name: str) -> Workbook:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CsvSyntaxError(f"not UTF-8: {exc}") from exc
    if text.count('"') % 2:
        raise CsvSyntaxError("unbalanced quote in CSV input",
                             line=text[:text.rfind('"')].count("\n") + 1)
    wb = Workbook()
    wb.add_sheet(sheet_name)
    reader = csv.reader(io.StringIO(text), strict=True)
    try:
        for row_idx, record in enumerate(reader, start=1):
            for col_idx, fld in enumerate(record, start=1):
                addr = CellAddress(sheet_name, col_idx, row_idx)
                try:
                    content = content_from_input(fld)
                except FormulaParseError as exc:
                    raise FormulaParseError(
                        f"bad formula at {addr.a1()}: {exc.message}",
                        position=exc.position, expected=exc.expected) from exc
                if not content.is_empty:
                    wb.set_cell(addr, content)
    except csv.Error as exc:
        raise CsvSyntaxError(str(exc), line=reader.line_num) from exc
    return wb


def export_csv(wb: Workbook, sheet: str) -> bytes:
    used = wb.used_range(sheet) if sheet in wb.sheets else None
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if used:
        cells = wb.sheets[sheet]
        for row in range(1, used.end.row + 1):
            record = []
            for col in range(1, used.end.col + 1):
                content = cells.get((col, row), EMPTY)
                if content.kind == NUMBER:
                    record.append(format_number(content.number))
                elif content.kind == TEXT:
                    record.append(content.text)
                elif content.kind == BOOL:
                    record.append("TRUE" if content.boolean else "FALSE")
                elif content.kind == FORMULA:
                    record.append(content.formula_text)
                else:
                    record.append("")
            writer.writerow(record)
    return out.getvalue().encode("utf-8")
