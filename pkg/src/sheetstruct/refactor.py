"""Structure-level refactorings as previewable, atomic plans.

Every operation builds a RefactoringPlan: an ordered edit list plus the
predicted group layout and an empirically determined value-impact
classification. Plans are pure over a snapshot; apply_plan mutates.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import (
    InvalidSplitPoint, NoSpace, OutOfBounds, Overlap, StalePlan,
    WouldEmptyGroup,
)
from .evaluator import evaluate
from .formula import absolutize, print_formula
from .formula.ast import (
    Binary, Call, CellRef, Node, Paren, RangeRef, Unary,
)
from .grid import MAX_COL, MAX_ROW, CellAddress, CellRange, col_to_letters
from .model import CellContent, EMPTY, Workbook, formula_content
from .structure import FormulaGroup, StructureModel, infer


@dataclass(frozen=True)
class PlanEdit:
    addr: CellAddress
    content: Optional[CellContent]  # None clears the cell

    def to_json(self):
        from .model import content_to_json
        if self.content is None or self.content.is_empty:
            return {"addr": self.addr.a1(), "clear": True}
        return {"addr": self.addr.a1(), "set": content_to_json(self.content)}


@dataclass(frozen=True)
class RefactoringPlan:
    op: str
    params: dict
    edits: Tuple[PlanEdit, ...]
    predicted_groups: Tuple[Tuple[str, str, int], ...]  # (range, formula, cells)
    value_impact: str  # "preserving" | "altering"
    affected: Tuple[str, ...]  # pre-existing cells whose value changes
    fingerprint: str

    def to_json(self):
        return {
            "op": self.op,
            "params": self.params,
            "valueImpact": self.value_impact,
            "affected": list(self.affected),
            "edits": [e.to_json() for e in self.edits],
            "predictedGroups": [
                {"range": rng, "formula": formula, "cells": cells}
                for rng, formula, cells in self.predicted_groups
            ],
        }


def _finalize(wb: Workbook, op: str, params: dict,
              edits: List[PlanEdit]) -> RefactoringPlan:
    """Run the edits on a scratch copy to predict structure and impact."""
    before = {a: v for a, v in evaluate(wb).items()}
    scratch = wb.copy()
    for e in edits:
        scratch.set_cell(e.addr, e.content or EMPTY)
    model_after = infer(scratch)
    predicted = tuple(
        (g.range.a1(), g.formula_text, g.range.area) for g in model_after.groups)
    after = evaluate(scratch)
    edited = {e.addr for e in edits}
    affected = sorted(
        (a for a, v in before.items()
         if a not in edited and after.get(a, v) != v),
        key=lambda a: (a.sheet, a.row, a.col))
    impact = "preserving" if not affected else "altering"
    return RefactoringPlan(
        op=op, params=params, edits=tuple(edits), predicted_groups=predicted,
        value_impact=impact,
        affected=tuple(a.a1() for a in affected),
        fingerprint=wb.fingerprint())


# -- split -----------------------------------------------------------------


_CHILD_FIELDS = {Unary: ("operand",), Binary: ("left", "right"), Paren: ("inner",)}


def _subexpr_paths(node: Node, path=()) -> List[Tuple[Tuple, Node]]:
    out = [(path, node)]
    fields = _CHILD_FIELDS.get(type(node))
    if fields:
        for name in fields:
            out.extend(_subexpr_paths(getattr(node, name), path + (name,)))
    elif isinstance(node, Call):
        for i, arg in enumerate(node.args):
            out.extend(_subexpr_paths(arg, path + (i,)))
    return out


def _replace_at(node: Node, path: Tuple, new: Node) -> Node:
    if not path:
        return new
    step, rest = path[0], path[1:]
    if isinstance(step, int):
        args = list(node.args)
        args[step] = _replace_at(args[step], rest, new)
        return dataclasses.replace(node, args=tuple(args))
    child = getattr(node, step)
    return dataclasses.replace(node, **{step: _replace_at(child, rest, new)})


def _expr_text(node: Node) -> str:
    return print_formula(node)[1:]


_ROW_DIGITS = re.compile(r"(\$?[A-Z]{1,3})\$?[0-9]+")


def _rowless(text: str) -> str:
    return _ROW_DIGITS.sub(r"\1", text)


def _find_split(abs_root: Node, wanted: str) -> Tuple[Tuple, Node]:
    """Outermost proper subexpression matching `wanted`.

    Column-only shorthand is accepted ("B2+C2" and "B+C" both match).
    """
    wanted = wanted.replace(" ", "").upper().lstrip("=")
    best = None
    for path, node in _subexpr_paths(abs_root):
        text = _expr_text(node)
        if text == wanted or _rowless(text) == wanted:
            if best is None or len(path) < len(best[0]):
                best = (path, node)
    if best is None:
        raise InvalidSplitPoint(f"no subexpression matches {wanted!r}")
    if not best[0]:
        raise InvalidSplitPoint("split point must be a proper subexpression")
    return best


def _helper_lane(wb: Workbook, model: StructureModel, g: FormulaGroup,
                 target: Optional[str]) -> int:
    """Pick the helper column (or row, for row-axis groups)."""
    rng = g.range
    if target is not None:
        if g.axis == "col":
            from .grid import letters_to_col
            lane = letters_to_col(target) if isinstance(target, str) else int(target)
        else:
            lane = int(target)
    else:
        refs = model.reference_groups_of(g.id)
        if g.axis == "col":
            left = any(r.range.start.col < rng.start.col for r in refs)
            right = any(r.range.end.col > rng.end.col for r in refs)
            lane = rng.start.col - 1 if right and not left else rng.end.col + 1
        else:
            above = any(r.range.start.row < rng.start.row for r in refs)
            below = any(r.range.end.row > rng.end.row for r in refs)
            lane = rng.start.row - 1 if below and not above else rng.end.row + 1
    limit = MAX_COL if g.axis == "col" else MAX_ROW
    if not 1 <= lane <= limit:
        raise OutOfBounds("helper lane falls outside the grid")
    occupied = [a for a in _lane_cells(g, lane) if not wb.get_cell(a).is_empty]
    if occupied:
        raise NoSpace(
            f"helper cells occupied at {occupied[0].a1()}",
            overlap=CellRange(occupied[0], occupied[-1]).a1())
    return lane


def _lane_cells(g: FormulaGroup, lane: int) -> List[CellAddress]:
    rng = g.range
    if g.axis == "col":
        return [CellAddress(rng.sheet, lane, r)
                for r in range(rng.start.row, rng.end.row + 1)]
    return [CellAddress(rng.sheet, c, lane)
            for c in range(rng.start.col, rng.end.col + 1)]


def split_group(wb: Workbook, model: StructureModel, group_id: str,
                split_text: str, target: Optional[str] = None) -> RefactoringPlan:
    """Extract a subexpression of a group into an adjacent helper group.

    The helper lane sits next to the group on the side away from its
    reference groups; the base formula is rewritten to reference it.
    """
    g = model.group(group_id)
    if (g.range.width if g.axis == "col" else g.range.height) != 1:
        raise InvalidSplitPoint("only single-lane groups can be split")
    abs_root = absolutize(g.rel, g.range.start)
    path, _node = _find_split(abs_root, split_text)
    lane = _helper_lane(wb, model, g, target)
    edits: List[PlanEdit] = []
    for base in g.range.cells():
        cell_root = absolutize(g.rel, base)
        sub = cell_root
        for step in path:
            sub = sub.args[step] if isinstance(step, int) else getattr(sub, step)
        helper = (CellAddress(base.sheet, lane, base.row) if g.axis == "col"
                  else CellAddress(base.sheet, base.col, lane))
        edits.append(PlanEdit(helper, formula_content(print_formula(sub))))
        replacement = CellRef(helper.col, helper.row)
        rewritten = _replace_at(cell_root, path, replacement)
        edits.append(PlanEdit(base, formula_content(print_formula(rewritten))))
    params = {"group": group_id, "at": split_text,
              "target": (col_to_letters(lane) if g.axis == "col" else lane)}
    return _finalize(wb, "split", params, edits)


# -- extend / shrink -------------------------------------------------------


def _slot_offsets(g: FormulaGroup):
    """Pure-relative (dcol, drow) per single-cell slot of the group."""
    from .formula.ast import RelRef
    from .formula.relative import iter_ref_leaves
    out = []
    for leaf in iter_ref_leaves(g.rel):
        if isinstance(leaf, RelRef) and not leaf.col_abs and not leaf.row_abs:
            out.append((leaf.col, leaf.row))
    return out


def _edge(g: FormulaGroup, direction: str) -> int:
    if g.axis == "col":
        return g.range.end.row if direction == "end" else g.range.start.row
    return g.range.end.col if direction == "end" else g.range.start.col


def _congruent(model: StructureModel, g: FormulaGroup,
               direction: str) -> List[FormulaGroup]:
    """Groups whose edge stays aligned with g's through relative slots.

    A referrer joins when its last cell references the referee's last cell
    (leading edges for direction="start"); the relation is closed
    transitively so whole calculation chains grow and shrink together.
    """
    members = {g.id}
    frontier = [g]
    while frontier:
        current = frontier.pop()
        for other in model.groups:
            if other.id in members or other.axis != current.axis \
                    or other.range.sheet != current.range.sheet:
                continue
            if _edge_linked(current, other, direction):
                members.add(other.id)
                frontier.append(other)
    order = {m.id: i for i, m in enumerate(model.groups)}
    return sorted((model.group(gid) for gid in members), key=lambda m: order[m.id])


def _edge_linked(a: FormulaGroup, b: FormulaGroup, direction: str) -> bool:
    for referrer, referee in ((a, b), (b, a)):
        along = 1 if referrer.axis == "col" else 0
        for offset in _slot_offsets(referrer):
            if _edge(referrer, direction) + offset[along] == _edge(referee, direction):
                return True
    return False


def _step_cell(g: FormulaGroup, cross: int, along: int) -> CellAddress:
    sheet = g.range.sheet
    return (CellAddress(sheet, cross, along) if g.axis == "col"
            else CellAddress(sheet, along, cross))


def _cross_span(g: FormulaGroup):
    rng = g.range
    if g.axis == "col":
        return range(rng.start.col, rng.end.col + 1)
    return range(rng.start.row, rng.end.row + 1)


def extend_group(wb: Workbook, model: StructureModel, group_id: str,
                 count: int, direction: str = "end") -> RefactoringPlan:
    """Grow a group (and its edge-aligned related groups) by `count` cells."""
    g = model.group(group_id)
    params = {"group": group_id, "count": count, "direction": direction}
    if count == 0:
        return _finalize(wb, "extend", params, [])
    if count < 0:
        raise OutOfBounds("count must be non-negative")
    sign = 1 if direction == "end" else -1
    limit = (MAX_ROW if g.axis == "col" else MAX_COL)
    edits: List[PlanEdit] = []
    for member in _congruent(model, g, direction):
        edge = _edge(member, direction)
        for step in range(1, count + 1):
            along = edge + sign * step
            if not 1 <= along <= limit:
                raise OutOfBounds(f"extension leaves the grid at step {step}")
            for cross in _cross_span(member):
                addr = _step_cell(member, cross, along)
                if not wb.get_cell(addr).is_empty:
                    raise NoSpace(f"cell {addr.a1()} is occupied",
                                  overlap=addr.a1())
                text = print_formula(absolutize(member.rel, addr))
                edits.append(PlanEdit(addr, formula_content(text)))
    return _finalize(wb, "extend", params, edits)


def shrink_group(wb: Workbook, model: StructureModel, group_id: str,
                 count: int, direction: str = "end") -> RefactoringPlan:
    """Shrink a group and its edge-aligned related groups by `count` cells."""
    g = model.group(group_id)
    params = {"group": group_id, "count": count, "direction": direction}
    if count == 0:
        return _finalize(wb, "shrink", params, [])
    if count < 0:
        raise OutOfBounds("count must be non-negative")
    members = _congruent(model, g, direction)
    sign = 1 if direction == "end" else -1
    edits: List[PlanEdit] = []
    for member in members:
        length = (member.range.height if member.axis == "col"
                  else member.range.width)
        if count >= length:
            raise WouldEmptyGroup(
                f"shrinking {member.range.a1()} by {count} removes the group")
        edge = _edge(member, direction)
        for step in range(count):
            along = edge - sign * step
            for cross in _cross_span(member):
                edits.append(PlanEdit(_step_cell(member, cross, along), None))
    return _finalize(wb, "shrink", params, edits)


# -- move ------------------------------------------------------------------


def _shift_refs(node: Node, source: CellRange, dcol: int, drow: int) -> Node:
    """Shift reference leaves that target cells inside `source`."""
    if isinstance(node, CellRef):
        addr = CellAddress(source.sheet, node.col, node.row)
        if source.contains(addr):
            return dataclasses.replace(node, col=node.col + dcol,
                                       row=node.row + drow)
        return node
    if isinstance(node, RangeRef):
        inside = all(
            source.contains(CellAddress(source.sheet, ref.col, ref.row))
            for ref in (node.start, node.end))
        if inside:
            return RangeRef(_shift_refs(node.start, source, dcol, drow),
                            _shift_refs(node.end, source, dcol, drow))
        return node
    fields = _CHILD_FIELDS.get(type(node))
    if fields:
        return dataclasses.replace(node, **{
            f: _shift_refs(getattr(node, f), source, dcol, drow)
            for f in fields})
    if isinstance(node, Call):
        return dataclasses.replace(node, args=tuple(
            _shift_refs(a, source, dcol, drow) for a in node.args))
    return node


def move_group(wb: Workbook, model: StructureModel, group_id: str,
               target: CellAddress) -> RefactoringPlan:
    """Relocate a group; its formulas and every referrer keep their targets."""
    g = model.group(group_id)
    src = g.range
    dcol, drow = target.col - src.start.col, target.row - src.start.row
    params = {"group": group_id, "target": target.a1()}
    if (dcol, drow) == (0, 0):
        return _finalize(wb, "move", params, [])
    dst_end_col, dst_end_row = src.end.col + dcol, src.end.row + drow
    if not (1 <= target.col and dst_end_col <= MAX_COL
            and 1 <= target.row and dst_end_row <= MAX_ROW):
        raise OutOfBounds("destination leaves the grid")
    dst = CellRange(CellAddress(src.sheet, target.col, target.row),
                    CellAddress(src.sheet, dst_end_col, dst_end_row))
    for addr in dst.cells():
        if src.contains(addr):
            continue
        if not wb.get_cell(addr).is_empty:
            if model.group_at(addr) is not None:
                raise Overlap(f"destination overlaps the group at {addr.a1()}")
            raise NoSpace(f"destination cell {addr.a1()} is occupied",
                          overlap=addr.a1())
    edits: List[PlanEdit] = []
    for cell in src.cells():
        cell_root = absolutize(g.rel, cell)
        moved = _shift_refs(cell_root, src, dcol, drow)
        moved_to = CellAddress(src.sheet, cell.col + dcol, cell.row + drow)
        edits.append(PlanEdit(moved_to, formula_content(print_formula(moved))))
    for cell in src.cells():
        if not dst.contains(cell):
            edits.append(PlanEdit(cell, None))
    # referrers outside the moved range follow the relocation
    for sheet in wb.sheet_names:
        for addr, content in wb.formula_cells(sheet):
            if sheet == src.sheet and src.contains(addr):
                continue
            rewritten = _shift_refs(content.ast, src, dcol, drow)
            if rewritten != content.ast:
                edits.append(PlanEdit(addr, formula_content(print_formula(rewritten))))
    return _finalize(wb, "move", params, edits)


# -- apply -----------------------------------------------------------------


def apply_plan(wb: Workbook, plan: RefactoringPlan):
    """Apply atomically; returns the delta list. StalePlan on any drift."""
    if plan.fingerprint != wb.fingerprint():
        raise StalePlan("workbook changed since the plan was built")
    deltas = []
    try:
        for e in plan.edits:
            deltas.append(wb.set_cell(e.addr, e.content or EMPTY))
    except Exception:
        wb.undo_deltas(deltas)
        raise
    return deltas
