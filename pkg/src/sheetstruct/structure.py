"""Inference of formula groups and reference groups.

A formula group is a maximal rectangle of formula cells sharing one
host-relative formula; groups partition the formula cells. A reference group
is the rectangle referenced by a whole group through one reference slot.
The decomposition is deterministic: seeds row-major, grow down, then widen
right (see kernel.decompose).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import kernel
from .errors import UnknownGroup
from .formula import absolutize, print_formula, relativize
from .formula.ast import Node, RelRangeRef, RelRef
from .formula.relative import iter_ref_leaves, relative_text, shape_text
from .grid import CellAddress, CellRange
from .model import Workbook

PALETTE_SIZE = 8


@dataclass(frozen=True)
class FormulaGroup:
    id: str
    range: CellRange
    rel: Node = field(compare=False, repr=False)
    rel_key: str = ""
    shape_key: str = ""

    @property
    def formula_text(self) -> str:
        """Canonical formula instantiated at the group's top-left cell."""
        return print_formula(absolutize(self.rel, self.range.start))

    @property
    def axis(self) -> str:
        return "col" if self.range.height >= self.range.width else "row"


@dataclass(frozen=True)
class ReferenceGroup:
    owner: str
    slot: int
    shape: str  # "cell" | "range"
    range: CellRange
    fragmented: bool = False


@dataclass
class StructureModel:
    groups: List[FormulaGroup]
    ref_groups: List[ReferenceGroup]
    edges: List[Tuple[str, str]]
    by_id: Dict[str, FormulaGroup]
    cell_group: Dict[Tuple[str, int, int], str]

    def group(self, group_id: str) -> FormulaGroup:
        try:
            return self.by_id[group_id]
        except KeyError:
            raise UnknownGroup(f"no formula group {group_id!r}") from None

    def group_at(self, addr: CellAddress) -> Optional[FormulaGroup]:
        gid = self.cell_group.get((addr.sheet, addr.col, addr.row))
        return self.by_id[gid] if gid else None

    def reference_groups_of(self, group_id: str) -> List[ReferenceGroup]:
        self.group(group_id)
        return [rg for rg in self.ref_groups if rg.owner == group_id]

    def groups_at(self, addr: CellAddress):
        owner = self.group_at(addr)
        covering = [rg for rg in self.ref_groups if rg.range.contains(addr)]
        return owner, covering

    def style_of(self, group_id: str) -> int:
        order = {g.id: i for i, g in enumerate(self.groups)}
        if group_id not in order:
            raise UnknownGroup(f"no formula group {group_id!r}")
        return order[group_id] % PALETTE_SIZE

    def find_by_range(self, range_a1: str) -> Optional[FormulaGroup]:
        for g in self.groups:
            if g.range.a1() == range_a1 or g.range.a1(with_sheet=True) == range_a1:
                return g
        return None


def _group_id(sheet: str, rng: CellRange, rel_key: str) -> str:
    digest = hashlib.sha1(f"{sheet}|{rng.a1()}|{rel_key}".encode()).hexdigest()
    return digest[:12]


def _slot_interval(part_abs: bool, part_val: int, lo_host: int, hi_host: int) -> Tuple[int, int]:
    if part_abs:
        return part_val, part_val
    return lo_host + part_val, hi_host + part_val


def _ref_group_range(group: FormulaGroup, leaf) -> CellRange:
    """Union of the slot's per-cell instantiations.

    Column and row specs instantiate independently, so the union over the
    rectangular owner range is itself a rectangle (hence fragmented=False).
    """
    rng = group.range
    if isinstance(leaf, RelRef):
        start_spec = end_spec = leaf
    else:
        start_spec, end_spec = leaf.start, leaf.end
    c1, _ = _slot_interval(start_spec.col_abs, start_spec.col, rng.start.col, rng.end.col)
    _, c2 = _slot_interval(end_spec.col_abs, end_spec.col, rng.start.col, rng.end.col)
    r1, _ = _slot_interval(start_spec.row_abs, start_spec.row, rng.start.row, rng.end.row)
    _, r2 = _slot_interval(end_spec.row_abs, end_spec.row, rng.start.row, rng.end.row)
    sheet = rng.sheet
    return CellRange(CellAddress(sheet, min(c1, c2), min(r1, r2)),
                     CellAddress(sheet, max(c1, c2), max(r1, r2)))


def infer(wb: Workbook) -> StructureModel:
    """Deterministic structure inference over every sheet of the workbook."""
    groups: List[FormulaGroup] = []
    ref_groups: List[ReferenceGroup] = []
    cell_group: Dict[Tuple[str, int, int], str] = {}
    for sheet in wb.sheet_names:
        cells = wb.sheets[sheet]
        formulas = [(col, row, c)
                    for (col, row), c in cells.items() if c.is_formula]
        if not formulas:
            continue
        pending = [(col, row, c.formula_text) for col, row, c in formulas
                   if c.relative_key(col, row) is None]
        computed = iter(kernel.relative_keys(pending)) if pending else iter(())
        key_ids: Dict[str, int] = {}
        shape_by_key: Dict[int, str] = {}
        cells_by_coord: Dict[Tuple[int, int], int] = {}
        for col, row, c in formulas:
            entry = c.relative_key(col, row)
            if entry is None:
                entry = next(computed)
                c.cache_relative_key(col, row, entry)
            key, shape, _refs = entry
            kid = key_ids.setdefault(key, len(key_ids))
            shape_by_key[kid] = shape
            cells_by_coord[(col, row)] = kid
        key_text = {kid: key for key, kid in key_ids.items()}
        for (c1, r1, c2, r2, kid) in kernel.decompose(cells_by_coord):
            rng = CellRange(CellAddress(sheet, c1, r1), CellAddress(sheet, c2, r2))
            rel = relativize(cells[(c1, r1)].ast, rng.start)
            group = FormulaGroup(
                id=_group_id(sheet, rng, key_text[kid]),
                range=rng,
                rel=rel,
                rel_key=key_text[kid],
                shape_key=shape_by_key[kid],
            )
            groups.append(group)
            for cc in range(c1, c2 + 1):
                for rr in range(r1, r2 + 1):
                    cell_group[(sheet, cc, rr)] = group.id
            for slot, leaf in enumerate(iter_ref_leaves(rel), start=1):
                ref_groups.append(ReferenceGroup(
                    owner=group.id,
                    slot=slot,
                    shape="cell" if isinstance(leaf, RelRef) else "range",
                    range=_ref_group_range(group, leaf),
                ))
    groups.sort(key=lambda g: (list(wb.sheet_names).index(g.range.sheet),
                               g.range.start.row, g.range.start.col))
    by_id = {g.id: g for g in groups}
    group_order = {gid: i for i, gid in enumerate(by_id)}
    ref_groups.sort(key=lambda rg: (group_order[rg.owner], rg.slot))
    edges = _group_edges(groups, ref_groups, cell_group)
    return StructureModel(groups, ref_groups, edges, by_id, cell_group)


def _group_edges(groups, ref_groups, cell_group) -> List[Tuple[str, str]]:
    edges = set()
    by_id = {g.id: g for g in groups}
    for rg in ref_groups:
        rng = rg.range
        if rng.area <= 4096:
            seen = set()
            for addr in rng.cells():
                gid = cell_group.get((addr.sheet, addr.col, addr.row))
                if gid and gid not in seen:
                    seen.add(gid)
                    edges.add((rg.owner, gid))
        else:
            for g in groups:
                if g.range.overlaps(rng):
                    edges.add((rg.owner, g.id))
    order = {gid: i for i, gid in enumerate(by_id)}
    return sorted(edges, key=lambda e: (order[e[0]], order[e[1]]))


# -- perspectives ----------------------------------------------------------


def perspective(model: StructureModel, kind: str,
                group_id: Optional[str] = None,
                addr: Optional[CellAddress] = None) -> dict:
    """RenderSet for one user-selectable view of the structure."""
    if kind == "formula-groups":
        items = [{"range": g.range.a1(), "style": i % PALETTE_SIZE,
                  "role": "formula-group", "group": g.id}
                 for i, g in enumerate(model.groups)]
        return {"perspective": kind, "items": items, "edges": []}
    if kind == "reference-groups":
        owner = model.group(group_id)
        items = [_group_item(model, owner)]
        for rg in model.reference_groups_of(owner.id):
            items.append(_ref_item(rg))
        return {"perspective": kind, "items": items, "edges": []}
    if kind == "cell":
        owner, covering = model.groups_at(addr)
        items = []
        if owner:
            items.append(_group_item(model, owner))
        items.extend(_ref_item(rg) for rg in covering)
        return {"perspective": kind, "items": items, "edges": []}
    if kind == "group-graph":
        items = [{"range": g.range.a1(), "style": i % PALETTE_SIZE,
                  "role": "formula-group", "group": g.id}
                 for i, g in enumerate(model.groups)]
        return {"perspective": kind, "items": items,
                "edges": [list(e) for e in model.edges]}
    raise UnknownGroup(f"unknown perspective {kind!r}")


def _group_item(model: StructureModel, g: FormulaGroup) -> dict:
    return {"range": g.range.a1(), "style": model.style_of(g.id),
            "role": "formula-group", "group": g.id}


def _ref_item(rg: ReferenceGroup) -> dict:
    return {"range": rg.range.a1(), "style": (rg.slot - 1) % PALETTE_SIZE,
            "role": "reference-group", "owner": rg.owner, "slot": rg.slot}


def model_to_json(model: StructureModel) -> dict:
    return {
        "groups": [
            {"id": g.id, "range": g.range.a1(), "formula": g.formula_text,
             "cells": g.range.area}
            for g in model.groups
        ],
        "refGroups": [
            {"owner": rg.owner, "slot": rg.slot, "range": rg.range.a1(),
             "fragmented": rg.fragmented}
            for rg in model.ref_groups
        ],
        "edges": [list(e) for e in model.edges],
    }
