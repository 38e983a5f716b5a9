"""Dependency-ordered workbook evaluation.

Errors are values, never exceptions: DIV0, CYCLE, REF, VALUE, NAME.
Blank coerces to 0 in arithmetic and "" in concatenation; IF is eager.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Dict, List, Optional, Tuple

from .formula.ast import (
    Binary, BoolLit, Call, CellRef, NumberLit, Paren, RangeRef, TextLit, Unary,
)
from .formula.parser import format_number
from .grid import CellAddress
from .model import BOOL, FORMULA, NUMBER, TEXT, Delta, Workbook

NUMBER_V = "number"
TEXT_V = "text"
BOOL_V = "bool"
BLANK_V = "blank"
ERROR_V = "error"


@dataclass(frozen=True)
class CellValue:
    kind: str
    value: object = None

    def to_json(self):
        if self.kind == ERROR_V:
            return {"kind": "error", "code": self.value}
        if self.kind == BLANK_V:
            return {"kind": "blank"}
        return {"kind": self.kind, "value": self.value}


BLANK = CellValue(BLANK_V)


def number_value(x: float) -> CellValue:
    return CellValue(NUMBER_V, float(x))


def error(code: str) -> CellValue:
    return CellValue(ERROR_V, code)


def _literal_value(content) -> CellValue:
    if content.kind == NUMBER:
        return number_value(content.number)
    if content.kind == TEXT:
        return CellValue(TEXT_V, content.text)
    if content.kind == BOOL:
        return CellValue(BOOL_V, content.boolean)
    return BLANK


Coord = Tuple[str, int, int]  # (sheet, col, row)


def _ref_rects(ast) -> List[Tuple[int, int, int, int]]:
    """Absolute (c1, r1, c2, r2) rectangles referenced by a formula."""
    rects = []
    stack = [ast]
    while stack:
        node = stack.pop()
        if isinstance(node, CellRef):
            rects.append((node.col, node.row, node.col, node.row))
        elif isinstance(node, RangeRef):
            rects.append((node.start.col, node.start.row, node.end.col, node.end.row))
        elif isinstance(node, Unary):
            stack.append(node.operand)
        elif isinstance(node, Binary):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Call):
            stack.extend(node.args)
        elif isinstance(node, Paren):
            stack.append(node.inner)
    return rects


class _Evaluator:
    def __init__(self, wb: Workbook):
        self.wb = wb
        self.values: Dict[Coord, CellValue] = {}

    # -- expression evaluation --------------------------------------------

    def lookup(self, sheet: str, col: int, row: int) -> CellValue:
        return self.values.get((sheet, col, row), BLANK)

    def eval_cell(self, sheet: str, ast) -> CellValue:
        try:
            return self.eval_node(sheet, ast)
        except _RangeOperand:
            return error("VALUE")

    def eval_node(self, sheet: str, node) -> CellValue:
        if isinstance(node, NumberLit):
            return number_value(node.value)
        if isinstance(node, TextLit):
            return CellValue(TEXT_V, node.value)
        if isinstance(node, BoolLit):
            return CellValue(BOOL_V, node.value)
        if isinstance(node, CellRef):
            return self.lookup(sheet, node.col, node.row)
        if isinstance(node, RangeRef):
            raise _RangeOperand()
        if isinstance(node, Paren):
            return self.eval_node(sheet, node.inner)
        if isinstance(node, Unary):
            val = self.eval_node(sheet, node.operand)
            if val.kind == ERROR_V:
                return val
            num = _to_number(val)
            if num is None:
                return error("VALUE")
            return number_value(num if node.op == "+" else -num)
        if isinstance(node, Binary):
            return self.eval_binary(sheet, node)
        if isinstance(node, Call):
            return self.eval_call(sheet, node)
        raise TypeError(f"cannot evaluate node {node!r}")

    def eval_binary(self, sheet: str, node: Binary) -> CellValue:
        left = self.eval_node(sheet, node.left)
        right = self.eval_node(sheet, node.right)
        for v in (left, right):
            if v.kind == ERROR_V:
                return v
        op = node.op
        if op == "&":
            return CellValue(TEXT_V, _to_text(left) + _to_text(right))
        if op in ("=", "<>", "<", "<=", ">", ">="):
            return _compare(op, left, right)
        a, b = _to_number(left), _to_number(right)
        if a is None or b is None:
            return error("VALUE")
        try:
            if op == "+":
                return number_value(a + b)
            if op == "-":
                return number_value(a - b)
            if op == "*":
                return number_value(a * b)
            if op == "/":
                if b == 0:
                    return error("DIV0")
                return number_value(a / b)
            if op == "^":
                result = a ** b
                if isinstance(result, complex):
                    return error("VALUE")
                return number_value(result)
        except ZeroDivisionError:
            return error("DIV0")
        except OverflowError:
            return error("VALUE")
        raise TypeError(f"unknown operator {op!r}")

    # -- functions ---------------------------------------------------------

    def eval_call(self, sheet: str, node: Call) -> CellValue:
        name = node.name
        if name in ("SUM", "AVERAGE", "MIN", "MAX", "COUNT"):
            nums = []
            for arg in node.args:
                result = self._collect_numbers(sheet, arg, nums)
                if result is not None:
                    return result
            if name == "SUM":
                return number_value(sum(nums))
            if name == "COUNT":
                return number_value(len(nums))
            if name == "AVERAGE":
                if not nums:
                    return error("DIV0")
                return number_value(sum(nums) / len(nums))
            if not nums:
                return number_value(0.0)
            return number_value(min(nums) if name == "MIN" else max(nums))
        if name == "ABS":
            return self._numeric_unary(sheet, node, abs)
        if name == "ROUND":
            if len(node.args) != 2:
                return error("VALUE")
            x = self.eval_node(sheet, node.args[0])
            n = self.eval_node(sheet, node.args[1])
            for v in (x, n):
                if v.kind == ERROR_V:
                    return v
            xf, nf = _to_number(x), _to_number(n)
            if xf is None or nf is None:
                return error("VALUE")
            return number_value(_round_half_away(xf, int(nf)))
        if name == "IF":
            if len(node.args) not in (2, 3):
                return error("VALUE")
            # deliberately eager: every branch is evaluated
            vals = [self.eval_node(sheet, a) for a in node.args]
            for v in vals:
                if v.kind == ERROR_V:
                    return v
            cond = _to_bool(vals[0])
            if cond is None:
                return error("VALUE")
            if cond:
                return vals[1]
            return vals[2] if len(vals) == 3 else CellValue(BOOL_V, False)
        return error("NAME")

    def _numeric_unary(self, sheet: str, node: Call, fn) -> CellValue:
        if len(node.args) != 1:
            return error("VALUE")
        val = self.eval_node(sheet, node.args[0])
        if val.kind == ERROR_V:
            return val
        num = _to_number(val)
        if num is None:
            return error("VALUE")
        return number_value(fn(num))

    def _collect_numbers(self, sheet: str, arg, out: List[float]) -> Optional[CellValue]:
        """Gather numbers for an aggregation; returns an error value to bail."""
        if isinstance(arg, RangeRef):
            for row in range(arg.start.row, arg.end.row + 1):
                for col in range(arg.start.col, arg.end.col + 1):
                    val = self.lookup(sheet, col, row)
                    if val.kind == ERROR_V:
                        return val
                    if val.kind == NUMBER_V:
                        out.append(val.value)
            return None
        if isinstance(arg, Paren):
            return self._collect_numbers(sheet, arg.inner, out)
        val = self.eval_node(sheet, arg)
        if val.kind == ERROR_V:
            return val
        if val.kind == NUMBER_V:
            out.append(val.value)
        elif val.kind == BOOL_V:
            out.append(1.0 if val.value else 0.0)
        return None


class _RangeOperand(Exception):
    """A range reference used where a single value is required."""


def _to_number(val: CellValue) -> Optional[float]:
    if val.kind == NUMBER_V:
        return val.value
    if val.kind == BLANK_V:
        return 0.0
    if val.kind == BOOL_V:
        return 1.0 if val.value else 0.0
    return None


def _to_text(val: CellValue) -> str:
    if val.kind == TEXT_V:
        return val.value
    if val.kind == NUMBER_V:
        return format_number(val.value)
    if val.kind == BOOL_V:
        return "TRUE" if val.value else "FALSE"
    return ""


def _to_bool(val: CellValue) -> Optional[bool]:
    if val.kind == BOOL_V:
        return val.value
    if val.kind == NUMBER_V:
        return val.value != 0
    if val.kind == BLANK_V:
        return False
    return None


def _compare(op: str, left: CellValue, right: CellValue) -> CellValue:
    a, b = _comparable(left, right)
    if a is None:
        # mixed kinds: equality is decidable, ordering is not
        if op == "=":
            return CellValue(BOOL_V, False)
        if op == "<>":
            return CellValue(BOOL_V, True)
        return error("VALUE")
    result = {
        "=": a == b, "<>": a != b, "<": a < b,
        "<=": a <= b, ">": a > b, ">=": a >= b,
    }[op]
    return CellValue(BOOL_V, result)


def _comparable(left: CellValue, right: CellValue):
    kinds = {left.kind, right.kind}
    if kinds <= {NUMBER_V, BLANK_V}:
        return _to_number(left), _to_number(right)
    if kinds <= {TEXT_V, BLANK_V}:
        a = left.value if left.kind == TEXT_V else ""
        b = right.value if right.kind == TEXT_V else ""
        return a.casefold(), b.casefold()
    if kinds == {BOOL_V}:
        return left.value, right.value
    return None, None


def _round_half_away(x: float, digits: int) -> float:
    quantum = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(x)).quantize(quantum, rounding=ROUND_HALF_UP))


def _build_graph(wb: Workbook):
    """Per formula cell: list of precedent coords that are stored formulas."""
    formulas: Dict[Coord, object] = {}
    rects: Dict[Coord, List[Tuple[int, int, int, int]]] = {}
    for sheet in wb.sheet_names:
        for addr, content in wb.formula_cells(sheet):
            coord = (sheet, addr.col, addr.row)
            formulas[coord] = content.ast
            rects[coord] = _ref_rects(content.ast)
    dependents: Dict[Coord, List[Coord]] = {c: [] for c in formulas}
    indegree: Dict[Coord, int] = {c: 0 for c in formulas}
    for coord, rect_list in rects.items():
        sheet = coord[0]
        seen = set()
        for (c1, r1, c2, r2) in rect_list:
            for other in formulas:
                if other[0] != sheet or other in seen:
                    continue
                if c1 <= other[1] <= c2 and r1 <= other[2] <= r2:
                    seen.add(other)
        for other in seen:
            dependents[other].append(coord)
            indegree[coord] += 1
    return formulas, rects, dependents, indegree


def evaluate(wb: Workbook) -> Dict[CellAddress, CellValue]:
    ev = _Evaluator(wb)
    # literals first
    for sheet in wb.sheet_names:
        for addr, content in wb.iter_cells(sheet):
            if not content.is_formula:
                ev.values[(sheet, addr.col, addr.row)] = _literal_value(content)
    formulas, _, dependents, indegree = _build_graph(wb)
    queue = deque(sorted(c for c, d in indegree.items() if d == 0))
    done = set()
    while queue:
        coord = queue.popleft()
        done.add(coord)
        ev.values[coord] = ev.eval_cell(coord[0], formulas[coord])
        for dep in dependents[coord]:
            indegree[dep] -= 1
            if indegree[dep] == 0:
                queue.append(dep)
    # anything left sits in or downstream of a reference cycle
    for coord in formulas:
        if coord not in done:
            ev.values[coord] = error("CYCLE")
    return {CellAddress(s, c, r): v for (s, c, r), v in ev.values.items()}


def evaluate_delta(wb: Workbook, delta: Delta,
                   values_before: Dict[CellAddress, CellValue]) -> Dict[CellAddress, CellValue]:
    """Changed values after `delta` was applied to produce `wb`.

    Incremental: only the edited cell and its transitive dependents are
    recomputed; agrees with a full evaluate (property-tested).
    """
    formulas, rects, dependents, indegree = _build_graph(wb)
    start = (delta.addr.sheet, delta.addr.col, delta.addr.row)
    dirty = {start}
    frontier = deque([start])
    while frontier:
        coord = frontier.popleft()
        sheet, col, row = coord
        for other, rect_list in rects.items():
            if other in dirty or other[0] != sheet:
                continue
            for (c1, r1, c2, r2) in rect_list:
                if c1 <= col <= c2 and r1 <= row <= r2:
                    dirty.add(other)
                    frontier.append(other)
                    break
    before = {(a.sheet, a.col, a.row): v for a, v in values_before.items()}
    ev = _Evaluator(wb)
    ev.values = {c: v for c, v in before.items() if c not in dirty}
    # non-formula dirty cells (including the edit itself when it is a literal)
    for coord in dirty:
        if coord not in formulas:
            content = wb.sheets[coord[0]].get((coord[1], coord[2]))
            if content is not None:
                ev.values[coord] = _literal_value(content)
    dirty_formulas = [c for c in dirty if c in formulas]
    local_indegree = {
        c: sum(1 for p, deps in dependents.items() if c in deps and p in dirty)
        for c in dirty_formulas
    }
    queue = deque(sorted(c for c in dirty_formulas if local_indegree[c] == 0))
    done = set()
    while queue:
        coord = queue.popleft()
        done.add(coord)
        ev.values[coord] = ev.eval_cell(coord[0], formulas[coord])
        for dep in dependents[coord]:
            if dep in dirty and dep not in done:
                local_indegree[dep] -= 1
                if local_indegree[dep] == 0:
                    queue.append(dep)
    for coord in dirty_formulas:
        if coord not in done:
            ev.values[coord] = error("CYCLE")
    changed: Dict[CellAddress, CellValue] = {}
    for coord in dirty:
        new_val = ev.values.get(coord)
        old_val = before.get(coord)
        if new_val is None and old_val is None:
            continue
        if new_val != old_val:
            changed[CellAddress(*coord)] = new_val if new_val is not None else BLANK
    return changed
