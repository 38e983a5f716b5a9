"""Host-relative normalization of formulas.

The relative form rewrites every reference as an offset from the host cell
($-anchored coordinates stay absolute) and is the equality key for group
inference. `relative_text` / `shape_text` are the canonical string renderings
used for group ids and for literal-insensitive matching.
"""

from __future__ import annotations

from typing import List, Tuple

from ..errors import OutOfBounds
from ..grid import MAX_COL, MAX_ROW, CellAddress, CellRange
from .ast import (
    Binary, BoolLit, Call, CellRef, Node, NumberLit, Paren, RangeRef,
    RelRangeRef, RelRef, TextLit, Unary,
)
from .parser import print_formula


def _rel_ref(ref: CellRef, host: CellAddress) -> RelRef:
    return RelRef(
        col=ref.col if ref.col_abs else ref.col - host.col,
        row=ref.row if ref.row_abs else ref.row - host.row,
        col_abs=ref.col_abs,
        row_abs=ref.row_abs,
    )


def _abs_ref(ref: RelRef, host: CellAddress) -> CellRef:
    col = ref.col if ref.col_abs else host.col + ref.col
    row = ref.row if ref.row_abs else host.row + ref.row
    if not (1 <= col <= MAX_COL and 1 <= row <= MAX_ROW):
        raise OutOfBounds(
            f"relative reference leaves the grid when anchored at {host.a1()}")
    return CellRef(col, row, ref.col_abs, ref.row_abs)


def relativize(node: Node, host: CellAddress) -> Node:
    if isinstance(node, CellRef):
        return _rel_ref(node, host)
    if isinstance(node, RangeRef):
        return RelRangeRef(_rel_ref(node.start, host), _rel_ref(node.end, host))
    if isinstance(node, Unary):
        return Unary(node.op, relativize(node.operand, host))
    if isinstance(node, Binary):
        return Binary(node.op, relativize(node.left, host), relativize(node.right, host))
    if isinstance(node, Call):
        return Call(node.name, tuple(relativize(a, host) for a in node.args))
    if isinstance(node, Paren):
        return Paren(relativize(node.inner, host))
    return node


def absolutize(node: Node, host: CellAddress) -> Node:
    if isinstance(node, RelRef):
        return _abs_ref(node, host)
    if isinstance(node, RelRangeRef):
        return RangeRef(_abs_ref(node.start, host), _abs_ref(node.end, host))
    if isinstance(node, Unary):
        return Unary(node.op, absolutize(node.operand, host))
    if isinstance(node, Binary):
        return Binary(node.op, absolutize(node.left, host), absolutize(node.right, host))
    if isinstance(node, Call):
        return Call(node.name, tuple(absolutize(a, host) for a in node.args))
    if isinstance(node, Paren):
        return Paren(absolutize(node.inner, host))
    return node


def relative_text(rel: Node) -> str:
    """Canonical string of a relative formula, e.g. "=R[0]C[-2]+R[0]C[-1]-5000"."""
    return print_formula(rel)


def shape_text(rel: Node) -> str:
    """Like relative_text but with number/text literals wildcarded."""
    return print_formula(rel, wildcard_literals=True)


def iter_ref_leaves(node: Node):
    """Reference leaves (CellRef/RangeRef or relative forms) in source order."""
    if isinstance(node, (CellRef, RangeRef, RelRef, RelRangeRef)):
        yield node
    elif isinstance(node, Unary):
        yield from iter_ref_leaves(node.operand)
    elif isinstance(node, Binary):
        yield from iter_ref_leaves(node.left)
        yield from iter_ref_leaves(node.right)
    elif isinstance(node, Call):
        for arg in node.args:
            yield from iter_ref_leaves(arg)
    elif isinstance(node, Paren):
        yield from iter_ref_leaves(node.inner)


def reference_slots(node: Node, host: CellAddress) -> List[Tuple[int, str, CellRange]]:
    """(1-based slot index, "cell"|"range", referenced rectangle) per leaf.

    `node` is an absolute AST; `host` supplies the sheet for the rectangles.
    """
    slots = []
    for i, leaf in enumerate(iter_ref_leaves(node), start=1):
        if isinstance(leaf, CellRef):
            addr = CellAddress(host.sheet, leaf.col, leaf.row)
            slots.append((i, "cell", CellRange(addr, addr)))
        elif isinstance(leaf, RangeRef):
            start = CellAddress(host.sheet, leaf.start.col, leaf.start.row)
            end = CellAddress(host.sheet, leaf.end.col, leaf.end.row)
            slots.append((i, "range", CellRange(start, end)))
        else:
            raise TypeError("reference_slots expects an absolute AST")
    return slots
