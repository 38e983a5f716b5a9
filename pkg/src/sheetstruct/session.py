"""In-memory editing session: one workbook plus derived state and undo.

The model, soundness report and value map are recomputed after every
mutation, so readers always observe a consistent snapshot. Each session
carries its own lock; the service serializes mutating requests with it.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from . import refactor as refactor_mod
from . import soundness
from .errors import SheetStructError, UnknownGroup
from .evaluator import CellValue, evaluate
from .grid import CellAddress, parse_a1
from .model import (
    CellContent, Delta, EMPTY, Workbook, content_from_input, content_from_json,
)
from .refactor import RefactoringPlan
from .soundness import RepairCandidate, SoundnessReport
from .structure import StructureModel, infer


class NothingToUndo(SheetStructError):
    code = "NothingToUndo"


class UnknownCandidate(SheetStructError):
    code = "UnknownCandidate"


@dataclass
class Session:
    wb: Workbook
    id: str = field(default_factory=lambda: uuid.uuid4().hex[:16])
    soundness_enabled: bool = True
    model: StructureModel = None
    report: SoundnessReport = None
    values: Dict[CellAddress, CellValue] = None
    undo_stack: List[List[Delta]] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self):
        self._recompute()

    def _recompute(self, deltas: Optional[List[Delta]] = None):
        self.model = infer(self.wb)
        if not self.soundness_enabled:
            self.report = SoundnessReport([], {})
        elif deltas is not None:
            self.report = soundness.on_edit(self.wb, deltas, self.report)
        else:
            self.report = soundness.check(self.wb, self.model)
        self.values = evaluate(self.wb)

    # -- queries -----------------------------------------------------------

    def values_json(self) -> Dict[str, dict]:
        return {a.a1(with_sheet=True): v.to_json()
                for a, v in sorted(self.values.items(),
                                   key=lambda kv: (kv[0].sheet, kv[0].row, kv[0].col))}

    def find_candidate(self, candidate_id: str) -> RepairCandidate:
        for cands in self.report.candidates.values():
            for c in cands:
                if c.id == candidate_id:
                    return c
        raise UnknownCandidate(f"no repair candidate {candidate_id!r}")

    # -- mutations (callers hold self.lock) --------------------------------

    def edit(self, batch: List[dict]) -> Dict[str, Optional[dict]]:
        """Apply a batch of cell edits; returns the changed-value map."""
        before = dict(self.values)
        deltas = []
        try:
            for item in batch:
                addr = parse_a1(str(item["addr"]), self.wb.default_sheet)
                deltas.append(self.wb.set_cell(addr, _item_content(item)))
        except Exception:
            self.wb.undo_deltas(deltas)
            raise
        self.undo_stack.append(deltas)
        self._recompute(deltas)
        return self._changed(before)

    def apply_repair(self, candidate_id: str,
                     input_text: Optional[str] = None) -> Dict[str, Optional[dict]]:
        candidate = self.find_candidate(candidate_id)
        before = dict(self.values)
        deltas, _ = soundness.apply_candidate(self.wb, candidate, input_text)
        self.undo_stack.append(deltas)
        self._recompute(deltas)
        return self._changed(before)

    def build_plan(self, op: str, params: dict) -> RefactoringPlan:
        group_id = params.get("group")
        if op == "split":
            return refactor_mod.split_group(
                self.wb, self.model, group_id, params.get("at", ""),
                params.get("target"))
        if op == "extend":
            return refactor_mod.extend_group(
                self.wb, self.model, group_id, int(params.get("count", 1)),
                params.get("direction", "end"))
        if op == "shrink":
            return refactor_mod.shrink_group(
                self.wb, self.model, group_id, int(params.get("count", 1)),
                params.get("direction", "end"))
        if op == "move":
            target = parse_a1(str(params.get("target")), self.wb.default_sheet)
            return refactor_mod.move_group(self.wb, self.model, group_id, target)
        raise UnknownGroup(f"unknown refactoring op {op!r}")

    def apply_plan(self, plan: RefactoringPlan) -> Dict[str, Optional[dict]]:
        before = dict(self.values)
        deltas = refactor_mod.apply_plan(self.wb, plan)
        self.undo_stack.append(deltas)
        self._recompute(deltas)
        return self._changed(before)

    def undo(self) -> Dict[str, Optional[dict]]:
        if not self.undo_stack:
            raise NothingToUndo("nothing to undo")
        before = dict(self.values)
        self.wb.undo_deltas(self.undo_stack.pop())
        self._recompute()
        return self._changed(before)

    def set_soundness(self, enabled: bool):
        self.soundness_enabled = enabled
        self._recompute()

    def _changed(self, before) -> Dict[str, Optional[dict]]:
        out = {}
        for addr, value in self.values.items():
            if before.get(addr) != value:
                out[addr.a1(with_sheet=True)] = value.to_json()
        for addr in before:
            if addr not in self.values:
                out[addr.a1(with_sheet=True)] = None
        return dict(sorted(out.items()))


def _item_content(item: dict) -> CellContent:
    if "input" in item:
        return content_from_input(str(item["input"]))
    content = item.get("content")
    if content is None:
        return EMPTY
    return content_from_json(content)
