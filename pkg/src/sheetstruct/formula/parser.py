"""Recursive-descent formula parser and canonical printer.

Grammar (input case-insensitive, canonical output uppercase):

    formula := "=" expr
    expr    := cmp
    cmp     := concat {("="|"<>"|"<"|"<="|">"|">=") concat}
    concat  := add {"&" add}
    add     := mul {("+"|"-") mul}
    mul     := pow {("*"|"/") pow}
    pow     := unary ["^" pow]          (right-associative)
    unary   := ["-"|"+"] atom
    atom    := number | string | ref | range | call | "(" expr ")"
"""

from __future__ import annotations

import re
from typing import List, Optional, Tuple

from ..errors import FormulaParseError
from ..grid import MAX_COL, MAX_ROW, col_to_letters, letters_to_col
from .ast import (
    Binary, BoolLit, Call, CellRef, Node, NumberLit, Paren, RangeRef,
    RelRangeRef, RelRef, TextLit, Unary,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"]|"")*")
  | (?P<number>[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)
  | (?P<ref>\$?[A-Za-z]{1,3}\$?[0-9]+)
  | (?P<name>[A-Za-z][A-Za-z.]*)
  | (?P<op><>|<=|>=|[=<>+\-*/^&(),:])
    """,
    re.VERBOSE,
)

_REF_RE = re.compile(r"(\$?)([A-Za-z]+)(\$?)([0-9]+)$")


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    pos = 1  # skip leading "="
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaParseError(
                f"unexpected character {text[pos]!r} at {pos}",
                position=pos, expected="token")
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", pos))
    return tokens


def _ref_from_token(tok: _Token) -> CellRef:
    m = _REF_RE.match(tok.text)
    col = letters_to_col(m.group(2).upper())
    row = int(m.group(4))
    if col > MAX_COL or row < 1 or row > MAX_ROW:
        raise FormulaParseError(
            f"reference {tok.text!r} outside the grid",
            position=tok.pos, expected="in-bounds reference")
    return CellRef(col, row, col_abs=bool(m.group(1)), row_abs=bool(m.group(3)))


class _Parser:
    def __init__(self, tokens: List[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        tok = self.next()
        if tok.kind != "op" or tok.text != op:
            raise FormulaParseError(
                f"expected {op!r} at {tok.pos}", position=tok.pos, expected=op)

    def at_op(self, *ops: str) -> Optional[str]:
        tok = self.peek()
        if tok.kind == "op" and tok.text in ops:
            return tok.text
        return None

    def parse(self) -> Node:
        node = self.cmp()
        tok = self.peek()
        if tok.kind != "end":
            raise FormulaParseError(
                f"trailing input at {tok.pos}: {tok.text!r}",
                position=tok.pos, expected="end of formula")
        return node

    def cmp(self) -> Node:
        node = self.concat()
        while (op := self.at_op("=", "<>", "<", "<=", ">", ">=")):
            self.next()
            node = Binary(op, node, self.concat())
        return node

    def concat(self) -> Node:
        node = self.add()
        while self.at_op("&"):
            self.next()
            node = Binary("&", node, self.add())
        return node

    def add(self) -> Node:
        node = self.mul()
        while (op := self.at_op("+", "-")):
            self.next()
            node = Binary(op, node, self.mul())
        return node

    def mul(self) -> Node:
        node = self.pow()
        while (op := self.at_op("*", "/")):
            self.next()
            node = Binary(op, node, self.pow())
        return node

    def pow(self) -> Node:
        node = self.unary()
        if self.at_op("^"):
            self.next()
            node = Binary("^", node, self.pow())
        return node

    def unary(self) -> Node:
        if (op := self.at_op("-", "+")):
            self.next()
            return Unary(op, self.atom())
        return self.atom()

    def atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "number":
            self.next()
            return NumberLit(float(tok.text))
        if tok.kind == "string":
            self.next()
            return TextLit(tok.text[1:-1].replace('""', '"'))
        if tok.kind == "ref":
            self.next()
            start = _ref_from_token(tok)
            if self.at_op(":"):
                self.next()
                end_tok = self.next()
                if end_tok.kind != "ref":
                    raise FormulaParseError(
                        f"expected reference after ':' at {end_tok.pos}",
                        position=end_tok.pos, expected="reference")
                return _normalized_range(start, _ref_from_token(end_tok))
            return start
        if tok.kind == "name":
            self.next()
            name = tok.text.upper()
            if name in ("TRUE", "FALSE") and not self.at_op("("):
                return BoolLit(name == "TRUE")
            self.expect_op("(")
            args: List[Node] = []
            if not self.at_op(")"):
                args.append(self.cmp())
                while self.at_op(","):
                    self.next()
                    args.append(self.cmp())
            self.expect_op(")")
            return Call(name, tuple(args))
        if self.at_op("("):
            self.next()
            inner = self.cmp()
            self.expect_op(")")
            return Paren(inner)
        raise FormulaParseError(
            f"expected a value at {tok.pos}", position=tok.pos, expected="atom")


def _normalized_range(a: CellRef, b: CellRef) -> RangeRef:
    # corners normalized per axis, keeping each coordinate's $ anchor with it
    (c1, ca1), (c2, ca2) = sorted([(a.col, a.col_abs), (b.col, b.col_abs)])
    (r1, ra1), (r2, ra2) = sorted([(a.row, a.row_abs), (b.row, b.row_abs)])
    return RangeRef(CellRef(c1, r1, ca1, ra1), CellRef(c2, r2, ca2, ra2))


def parse_formula(text: str) -> Node:
    """Parse formula text (must start with "=") into an AST."""
    if not text.startswith("="):
        raise FormulaParseError("formula must start with '='", position=0, expected="=")
    return _Parser(_tokenize(text)).parse()


# precedence levels for minimal-parenthesis printing
_PREC = {"=": 1, "<>": 1, "<": 1, "<=": 1, ">": 1, ">=": 1,
         "&": 2, "+": 3, "-": 3, "*": 4, "/": 4, "^": 5}
_ATOM_PREC = 10


def format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _ref_text(ref: CellRef) -> str:
    return (("$" if ref.col_abs else "") + col_to_letters(ref.col)
            + ("$" if ref.row_abs else "") + str(ref.row))


def _rel_coord(value: int, anchored: bool) -> str:
    return str(value) if anchored else f"[{value}]"


def _rel_ref_text(ref: RelRef) -> str:
    return (f"R{_rel_coord(ref.row, ref.row_abs)}"
            f"C{_rel_coord(ref.col, ref.col_abs)}")


def _print(node: Node, wildcard_literals: bool) -> Tuple[str, int]:
    """Returns (text, precedence-level of the produced expression)."""
    if isinstance(node, NumberLit):
        return ("#" if wildcard_literals else format_number(node.value)), _ATOM_PREC
    if isinstance(node, TextLit):
        return ("~" if wildcard_literals else '"%s"' % node.value.replace('"', '""')), _ATOM_PREC
    if isinstance(node, BoolLit):
        return ("TRUE" if node.value else "FALSE"), _ATOM_PREC
    if isinstance(node, CellRef):
        return _ref_text(node), _ATOM_PREC
    if isinstance(node, RangeRef):
        return f"{_ref_text(node.start)}:{_ref_text(node.end)}", _ATOM_PREC
    if isinstance(node, RelRef):
        return _rel_ref_text(node), _ATOM_PREC
    if isinstance(node, RelRangeRef):
        return f"{_rel_ref_text(node.start)}:{_rel_ref_text(node.end)}", _ATOM_PREC
    if isinstance(node, Paren):
        inner, _ = _print(node.inner, wildcard_literals)
        return f"({inner})", _ATOM_PREC
    if isinstance(node, Call):
        args = ",".join(_print(a, wildcard_literals)[0] for a in node.args)
        return f"{node.name}({args})", _ATOM_PREC
    if isinstance(node, Unary):
        text, prec = _print(node.operand, wildcard_literals)
        if prec < _ATOM_PREC:
            text = f"({text})"
        return f"{node.op}{text}", 6
    if isinstance(node, Binary):
        prec = _PREC[node.op]
        lmin = prec + 1 if node.op == "^" else prec
        rmin = prec if node.op == "^" else prec + 1
        ltext, lprec = _print(node.left, wildcard_literals)
        rtext, rprec = _print(node.right, wildcard_literals)
        if lprec < lmin:
            ltext = f"({ltext})"
        if rprec < rmin:
            rtext = f"({rtext})"
        return f"{ltext}{node.op}{rtext}", prec
    raise TypeError(f"not a formula node: {node!r}")


def print_formula(node: Node, wildcard_literals: bool = False) -> str:
    """Canonical text: uppercase, no spaces, minimal parentheses."""
    return "=" + _print(node, wildcard_literals)[0]
