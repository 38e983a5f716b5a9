"""Structural soundness: violation detection and executable repairs.

Violation kinds:
  DeviantCell        small group breaking an otherwise uniform neighborhood
  FragmentedGroup    same-formula groups separated only by blanks/violations
  BrokenReference    a formula pointing at an empty cell
  DanglingDependent  a formula referencing a just-deleted cell

A repair candidate is an atomic edit list; applying it and re-checking
removes the originating violation (property-tested).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import MissingInput, StaleCandidate, UnknownViolation
from .formula import absolutize, print_formula
from .grid import CellAddress, CellRange, single_cell
from .model import (
    CellContent, Delta, Workbook, content_from_input, formula_content,
)
from .structure import FormulaGroup, StructureModel, infer

DEVIANT_MAX_AREA = 2
NEIGHBOR_MIN_AREA = 3


@dataclass(frozen=True)
class Violation:
    kind: str
    focus: CellRange
    context: Tuple[str, ...]
    message: str
    new: bool = False
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def identity(self) -> Tuple[str, str, Tuple[str, ...]]:
        return (self.kind, self.focus.a1(with_sheet=True), self.context)

    @property
    def id(self) -> str:
        raw = "|".join([self.kind, self.focus.a1(with_sheet=True), *self.context])
        return hashlib.sha1(raw.encode()).hexdigest()[:10]


@dataclass(frozen=True)
class RepairAction:
    addr: CellAddress
    content: Optional[CellContent]  # None means clear
    from_input: bool = False

    def to_json(self):
        from .model import content_to_json
        if self.from_input:
            return {"addr": self.addr.a1(), "set": "<input>"}
        if self.content is None or self.content.is_empty:
            return {"addr": self.addr.a1(), "clear": True}
        return {"addr": self.addr.a1(), "set": content_to_json(self.content)}


@dataclass(frozen=True)
class RepairCandidate:
    id: str
    violation_id: str
    actions: Tuple[RepairAction, ...]
    description: str
    requires_input: Optional[dict] = None
    fingerprint: str = ""

    def to_json(self):
        return {
            "id": self.id,
            "description": self.description,
            "requiresInput": self.requires_input,
            "actions": [a.to_json() for a in self.actions],
        }


@dataclass
class SoundnessReport:
    violations: List[Violation]
    candidates: Dict[str, List[RepairCandidate]]

    @property
    def clean(self) -> bool:
        return not self.violations

    def violation(self, violation_id: str) -> Violation:
        for v in self.violations:
            if v.id == violation_id:
                return v
        raise UnknownViolation(f"no violation {violation_id!r}")

    def to_json(self):
        return {
            "clean": self.clean,
            "violations": [
                {"id": v.id, "kind": v.kind, "focus": v.focus.a1(),
                 "groups": list(v.context), "new": v.new, "message": v.message}
                for v in self.violations
            ],
            "candidates": {
                vid: [c.to_json() for c in cands]
                for vid, cands in self.candidates.items()
            },
        }


# -- detection -------------------------------------------------------------


def _axis_spans(g: FormulaGroup):
    """(cross-axis span, along-axis interval) for the group's growth axis."""
    if g.axis == "col":
        return (g.range.start.col, g.range.end.col), (g.range.start.row, g.range.end.row)
    return (g.range.start.row, g.range.end.row), (g.range.start.col, g.range.end.col)


def _adjacent_group(model: StructureModel, g: FormulaGroup, direction: int) -> Optional[FormulaGroup]:
    """Group directly before/after `g` along its axis with the same cross span."""
    rng = g.range
    if g.axis == "col":
        row = rng.start.row - 1 if direction < 0 else rng.end.row + 1
        probe = model.group_at(CellAddress(rng.sheet, rng.start.col, row)) if row >= 1 else None
        if probe and (probe.range.start.col, probe.range.end.col) == (rng.start.col, rng.end.col):
            return probe
    else:
        col = rng.start.col - 1 if direction < 0 else rng.end.col + 1
        probe = model.group_at(CellAddress(rng.sheet, col, rng.start.row)) if col >= 1 else None
        if probe and (probe.range.start.row, probe.range.end.row) == (rng.start.row, rng.end.row):
            return probe
    return None


def _detect_deviants(model: StructureModel) -> List[Violation]:
    out = []
    for g in model.groups:
        if g.range.area > DEVIANT_MAX_AREA:
            continue
        neighbors = []
        for direction in (-1, 1):
            other = _adjacent_group(model, g, direction)
            if (other is not None
                    and other.range.area >= NEIGHBOR_MIN_AREA
                    and other.shape_key == g.shape_key
                    and other.rel_key != g.rel_key):
                neighbors.append(other)
        if neighbors:
            context = (g.id,) + tuple(n.id for n in neighbors)
            out.append(Violation(
                kind="DeviantCell", focus=g.range, context=context,
                message=(f"{g.range.a1()} deviates from the adjacent group "
                         f"{neighbors[0].range.a1()} ({g.formula_text} vs "
                         f"{neighbors[0].formula_text})"),
                meta={"group": g, "neighbors": neighbors}))
    return out


def _gap_cells(g1: FormulaGroup, g2: FormulaGroup) -> Optional[List[CellAddress]]:
    """Cells strictly between two same-axis, same-cross-span groups."""
    if g1.axis != g2.axis:
        return None
    cross1, along1 = _axis_spans(g1)
    cross2, along2 = _axis_spans(g2)
    if cross1 != cross2:
        return None
    lo, hi = sorted([along1, along2])
    if lo[1] + 1 > hi[0] - 1:
        return None  # touching or overlapping, no gap
    sheet = g1.range.sheet
    cells = []
    for along in range(lo[1] + 1, hi[0]):
        for cross in range(cross1[0], cross1[1] + 1):
            if g1.axis == "col":
                cells.append(CellAddress(sheet, cross, along))
            else:
                cells.append(CellAddress(sheet, along, cross))
    return cells


def _detect_fragments(wb: Workbook, model: StructureModel,
                      violation_cells: set) -> List[Violation]:
    out = []
    by_key: Dict[Tuple[str, str], List[FormulaGroup]] = {}
    for g in model.groups:
        by_key.setdefault((g.range.sheet, g.rel_key), []).append(g)
    for (_, _), members in by_key.items():
        if len(members) < 2:
            continue
        for i, g1 in enumerate(members):
            for g2 in members[i + 1:]:
                gap = _gap_cells(g1, g2)
                if not gap:
                    continue
                ok = all(
                    wb.get_cell(a).is_empty
                    or (a.sheet, a.col, a.row) in violation_cells
                    for a in gap)
                if ok:
                    focus = CellRange(g1.range.start, g2.range.end)
                    out.append(Violation(
                        kind="FragmentedGroup", focus=focus,
                        context=(g1.id, g2.id),
                        message=(f"groups {g1.range.a1()} and {g2.range.a1()} share "
                                 f"the formula {g1.formula_text} but are separated"),
                        meta={"fragments": (g1, g2), "gap": gap}))
    return out


def _detect_broken_refs(wb: Workbook, model: StructureModel,
                        deleted: Sequence[CellAddress]) -> List[Violation]:
    deleted_set = {(a.sheet, a.col, a.row) for a in deleted}
    out = []
    for sheet in wb.sheet_names:
        cells = wb.sheets[sheet]
        for (col, row), content in cells.items():
            if not content.is_formula:
                continue
            for (c1, r1, c2, r2) in content.ref_rects():
                if (c1, r1) != (c2, r2):
                    continue  # ranges legitimately span blanks
                present = cells.get((c1, r1))
                if present is not None and not present.is_empty:
                    continue
                addr = CellAddress(sheet, col, row)
                target = CellAddress(sheet, c1, r1)
                key = (sheet, c1, r1)
                group = model.group_at(addr)
                context = (group.id,) if group else ()
                if key in deleted_set:
                    out.append(Violation(
                        kind="DanglingDependent", focus=single_cell(addr),
                        context=context,
                        message=(f"{addr.a1()} references {target.a1()}, "
                                 f"which was deleted"),
                        meta={"target": target, "deleted": True}))
                else:
                    out.append(Violation(
                        kind="BrokenReference", focus=single_cell(addr),
                        context=context,
                        message=f"{addr.a1()} references the empty cell {target.a1()}",
                        meta={"target": target}))
                break
    return out


def check(wb: Workbook, model: Optional[StructureModel] = None,
          deleted: Sequence[CellAddress] = (),
          prev_identities: Optional[set] = None) -> SoundnessReport:
    """Full soundness check; violations ordered row-major by focus."""
    if model is None:
        model = infer(wb)
    deviants = _detect_deviants(model)
    violation_cells = set()
    for v in deviants:
        for a in v.focus.cells():
            violation_cells.add((a.sheet, a.col, a.row))
    violations = (deviants
                  + _detect_fragments(wb, model, violation_cells)
                  + _detect_broken_refs(wb, model, deleted))
    violations.sort(key=lambda v: (v.focus.sheet, v.focus.start.row,
                                   v.focus.start.col, v.kind))
    if prev_identities is not None:
        violations = [
            Violation(v.kind, v.focus, v.context, v.message,
                      new=v.identity not in prev_identities, meta=v.meta)
            for v in violations
        ]
    fingerprint = wb.fingerprint()
    candidates = {
        v.id: _candidates(wb, model, v, fingerprint) for v in violations
    }
    return SoundnessReport(violations, candidates)


def on_edit(wb: Workbook, deltas: Sequence[Delta],
            prev_report: Optional[SoundnessReport]) -> SoundnessReport:
    """Re-check after a batch of deltas, flagging violations as new or old."""
    deleted = [d.addr for d in deltas if d.after.is_empty and not d.before.is_empty]
    prev = {v.identity for v in prev_report.violations} if prev_report else set()
    return check(wb, None, deleted=deleted, prev_identities=prev)


# -- candidates ------------------------------------------------------------


def _formula_action(addr: CellAddress, rel) -> RepairAction:
    text = print_formula(absolutize(rel, addr))
    return RepairAction(addr, formula_content(text))


def _candidate(vid: str, tag: str, actions, description,
               fingerprint: str, requires_input=None) -> RepairCandidate:
    cid = hashlib.sha1(f"{vid}|{tag}".encode()).hexdigest()[:10]
    return RepairCandidate(cid, vid, tuple(actions), description,
                           requires_input, fingerprint)


def _shape_run(model: StructureModel, g: FormulaGroup) -> List[FormulaGroup]:
    """Maximal chain of same-shape, same-cross-span groups through `g`."""
    run = [g]
    for direction in (-1, 1):
        current = g
        while True:
            nxt = _adjacent_group(model, current, direction)
            if nxt is None or nxt.shape_key != g.shape_key:
                break
            run.insert(0, nxt) if direction < 0 else run.append(nxt)
            current = nxt
    return run


def _deviant_candidates(wb, model, v, fingerprint):
    g: FormulaGroup = v.meta["group"]
    run = _shape_run(model, g)
    others = [m for m in run if m.id != g.id]
    dominant = max(others, key=lambda m: m.range.area)
    run_range = CellRange(run[0].range.start, run[-1].range.end)
    inward = _candidate(
        v.id, "propagate-inward",
        [_formula_action(a, dominant.rel) for a in g.range.cells()],
        f"Rewrite {g.range.a1()} with the surrounding formula {dominant.formula_text}",
        fingerprint)
    outward_cells = [a for m in others for a in m.range.cells()]
    outward = _candidate(
        v.id, "propagate-outward",
        [_formula_action(a, g.rel) for a in outward_cells],
        f"Apply the formula of {g.range.a1()} to the remainder of {run_range.a1()}",
        fingerprint)
    return [inward, outward]


def _fragment_candidates(wb, model, v, fingerprint):
    g1, _g2 = v.meta["fragments"]
    gap = v.meta["gap"]
    unify = _candidate(
        v.id, "unify",
        [_formula_action(a, g1.rel) for a in gap],
        f"Fill {', '.join(a.a1() for a in gap)} to reunify {v.focus.a1()}",
        fingerprint)
    return [unify]


def _extendable_onto(model: StructureModel, target: CellAddress) -> Optional[FormulaGroup]:
    """A group whose trailing/leading edge sits directly beside `target`."""
    for dcol, drow in ((0, -1), (0, 1), (-1, 0), (1, 0)):
        col, row = target.col + dcol, target.row + drow
        if col < 1 or row < 1:
            continue
        g = model.group_at(CellAddress(target.sheet, col, row))
        if g is None:
            continue
        vertical = drow != 0
        if vertical and g.axis == "col" \
                and g.range.start.col <= target.col <= g.range.end.col:
            return g
        if not vertical and g.axis == "row" \
                and g.range.start.row <= target.row <= g.range.end.row:
            return g
    return None


def _broken_ref_candidates(wb, model, v, fingerprint):
    target: CellAddress = v.meta["target"]
    out = []
    extend_from = _extendable_onto(model, target)
    if extend_from is not None:
        out.append(_candidate(
            v.id, "cascade-insert",
            [_formula_action(target, extend_from.rel)],
            f"Extend {extend_from.range.a1()} onto {target.a1()}",
            fingerprint))
    out.append(_candidate(
        v.id, "prompt-value",
        [RepairAction(target, None, from_input=True)],
        f"Provide a value for the empty cell {target.a1()}",
        fingerprint,
        requires_input={"prompt": f"Value for {target.a1()}", "choices": None}))
    return out


def _dangling_candidates(wb, model, v, fingerprint):
    target: CellAddress = v.meta["target"]
    out = []
    restore_from = _extendable_onto(model, target)
    if restore_from is not None:
        out.append(_candidate(
            v.id, "restore",
            [_formula_action(target, restore_from.rel)],
            f"Restore {target.a1()} from the formula of {restore_from.range.a1()}",
            fingerprint))
    else:
        out.append(_candidate(
            v.id, "prompt-value",
            [RepairAction(target, None, from_input=True)],
            f"Provide a replacement value for {target.a1()}",
            fingerprint,
            requires_input={"prompt": f"Value for {target.a1()}", "choices": None}))
    cascade = _cascade_delete(wb, model, target, v.id, fingerprint)
    if cascade is not None:
        out.append(cascade)
    return out


def _cascade_delete(wb: Workbook, model: StructureModel, deleted: CellAddress,
                    vid: str, fingerprint: str) -> Optional[RepairCandidate]:
    """Remove the deleted cell's row (or column) across the related groups.

    Cells below the deleted row move up one step, re-anchored via each
    group's relative formula; trailing cells are cleared.
    """
    vertical = True
    neighbor = _extendable_onto(model, deleted)
    if neighbor is not None:
        vertical = neighbor.axis == "col"
    related = _related_component(model, deleted)
    if not related:
        return None
    actions: List[RepairAction] = []
    removed: List[str] = []
    for g in related:
        rng = g.range
        if vertical:
            if g.axis != "col" or rng.end.row < deleted.row:
                continue
            for col in range(rng.start.col, rng.end.col + 1):
                if rng.start.row <= deleted.row <= rng.end.row:
                    removed.append(CellAddress(rng.sheet, col, deleted.row).a1())
                first_dst = max(deleted.row, rng.start.row - 1)
                for dst_row in range(first_dst, rng.end.row):
                    dst = CellAddress(rng.sheet, col, dst_row)
                    actions.append(_formula_action(dst, g.rel))
                actions.append(RepairAction(CellAddress(rng.sheet, col, rng.end.row), None))
        else:
            if g.axis != "row" or rng.end.col < deleted.col:
                continue
            for row in range(rng.start.row, rng.end.row + 1):
                if rng.start.col <= deleted.col <= rng.end.col:
                    removed.append(CellAddress(rng.sheet, deleted.col, row).a1())
                first_dst = max(deleted.col, rng.start.col - 1)
                for dst_col in range(first_dst, rng.end.col):
                    dst = CellAddress(rng.sheet, dst_col, row)
                    actions.append(_formula_action(dst, g.rel))
                actions.append(RepairAction(CellAddress(rng.sheet, rng.end.col, row), None))
    if not actions:
        return None
    axis_name = "row" if vertical else "column"
    label = deleted.row if vertical else deleted.col
    desc = f"Remove {axis_name} {label} across the calculation chain"
    if removed:
        desc += f" (also removes {', '.join(sorted(set(removed)))})"
    return _candidate(vid, "cascade-delete", actions, desc, fingerprint)


def _related_component(model: StructureModel, deleted: CellAddress) -> List[FormulaGroup]:
    """Undirected closure over the group graph around the deleted cell."""
    seeds = set()
    for g in model.groups:
        if g.range.sheet != deleted.sheet:
            continue
        rng = g.range
        near_vertically = (rng.start.col <= deleted.col <= rng.end.col
                           and rng.start.row - 1 <= deleted.row <= rng.end.row + 1)
        near_horizontally = (rng.start.row <= deleted.row <= rng.end.row
                             and rng.start.col - 1 <= deleted.col <= rng.end.col + 1)
        if near_vertically or near_horizontally:
            seeds.add(g.id)
    if not seeds:
        return []
    undirected: Dict[str, set] = {}
    for a, b in model.edges:
        undirected.setdefault(a, set()).add(b)
        undirected.setdefault(b, set()).add(a)
    component = set(seeds)
    frontier = list(seeds)
    while frontier:
        gid = frontier.pop()
        for other in undirected.get(gid, ()):
            if other not in component:
                component.add(other)
                frontier.append(other)
    order = {g.id: i for i, g in enumerate(model.groups)}
    return sorted((model.group(gid) for gid in component), key=lambda g: order[g.id])


_CANDIDATE_BUILDERS = {
    "DeviantCell": _deviant_candidates,
    "FragmentedGroup": _fragment_candidates,
    "BrokenReference": _broken_ref_candidates,
    "DanglingDependent": _dangling_candidates,
}


def _candidates(wb, model, v, fingerprint) -> List[RepairCandidate]:
    cands = _CANDIDATE_BUILDERS[v.kind](wb, model, v, fingerprint)
    # smallest edit first; inward-style rewrites win ties by construction order
    cands.sort(key=lambda c: len(c.actions))
    return cands


def candidates_for(report: SoundnessReport, violation_id: str,
                   wb: Workbook, model: StructureModel) -> List[RepairCandidate]:
    report.violation(violation_id)
    return report.candidates.get(violation_id, [])


def apply_candidate(wb: Workbook, candidate: RepairCandidate,
                    input_text: Optional[str] = None):
    """Apply atomically; returns (deltas, fresh report for the new state)."""
    if candidate.fingerprint != wb.fingerprint():
        raise StaleCandidate("workbook changed since the candidate was generated")
    if candidate.requires_input and input_text is None:
        raise MissingInput(candidate.requires_input.get("prompt", "input required"))
    resolved = []
    for action in candidate.actions:
        if action.from_input:
            resolved.append((action.addr, content_from_input(input_text)))
        else:
            from .model import EMPTY
            resolved.append((action.addr, action.content or EMPTY))
    deltas = []
    try:
        for addr, content in resolved:
            deltas.append(wb.set_cell(addr, content))
    except Exception:
        wb.undo_deltas(deltas)
        raise
    report = on_edit(wb, deltas, prev_report=None)
    return deltas, report


# -- guided transition -----------------------------------------------------


def guided_repair(wb: Workbook, ask=None, max_steps: int = 1000):
    """Apply top-ranked candidates until clean or fixpoint.

    `ask(prompt_spec)` supplies answers for candidates that need input;
    when absent those candidates are skipped. Returns (report, applied
    descriptions); `wb` is mutated in place.
    """
    applied = []
    report = check(wb)
    for _ in range(max_steps):
        if report.clean:
            break
        metric = _repair_metric(report)
        progressed = False
        for violation in report.violations:
            for candidate in report.candidates.get(violation.id, []):
                answer = None
                if candidate.requires_input:
                    if ask is None:
                        continue
                    answer = ask(candidate.requires_input)
                    if answer is None:
                        continue
                snapshot = wb.copy()
                deltas, new_report = apply_candidate(wb, candidate, answer)
                if _repair_metric(new_report) < metric:
                    applied.append(candidate.description)
                    report = new_report
                    progressed = True
                    break
                wb.restore(snapshot)  # revert: no strict progress
            if progressed:
                break
        if not progressed:
            break
    return report, applied


def _repair_metric(report: SoundnessReport):
    total_edits = sum(
        min((len(c.actions) for c in report.candidates.get(v.id, [])), default=0)
        for v in report.violations)
    return (len(report.violations), total_edits)
