from .ast import (
    Binary,
    BoolLit,
    Call,
    CellRef,
    NumberLit,
    Paren,
    RangeRef,
    RelRangeRef,
    RelRef,
    TextLit,
    Unary,
)
from .parser import parse_formula, print_formula
from .relative import (
    absolutize,
    reference_slots,
    relative_text,
    relativize,
    shape_text,
)

__all__ = [
    "NumberLit", "TextLit", "BoolLit", "CellRef", "RangeRef", "Unary",
    "Binary", "Call", "Paren", "RelRef", "RelRangeRef",
    "parse_formula", "print_formula",
    "relativize", "absolutize", "reference_slots", "relative_text", "shape_text",
]
