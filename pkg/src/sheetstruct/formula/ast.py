"""Formula AST nodes.

Two parallel node families share the operator/literal nodes:
absolute trees produced by the parser use CellRef/RangeRef leaves,
host-relative trees (the grouping key) use RelRef/RelRangeRef leaves.
All nodes are frozen, so structural equality and hashing come for free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union


@dataclass(frozen=True)
class NumberLit:
    value: float


@dataclass(frozen=True)
class TextLit:
    value: str


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class CellRef:
    """Absolute grid coordinates; the *_abs flags record $ anchors."""

    col: int
    row: int
    col_abs: bool = False
    row_abs: bool = False


@dataclass(frozen=True)
class RangeRef:
    start: CellRef
    end: CellRef


@dataclass(frozen=True)
class RelRef:
    """Host-relative reference: coordinate is an offset unless anchored."""

    col: int
    row: int
    col_abs: bool = False
    row_abs: bool = False


@dataclass(frozen=True)
class RelRangeRef:
    start: RelRef
    end: RelRef


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Node", ...]


@dataclass(frozen=True)
class Paren:
    inner: "Node"


Node = Union[NumberLit, TextLit, BoolLit, CellRef, RangeRef, RelRef,
             RelRangeRef, Unary, Binary, Call, Paren]
