"""Pure-Python kernel: relative-key extraction and rectangle decomposition.

These two passes dominate inference time on large sheets; the Cython module
`_native` implements the same contract. Inputs are canonical formula texts as
produced by the printer, which keeps the token scan trivial (uppercase refs,
no whitespace, digit-free function names).
"""

from __future__ import annotations

import re
from typing import Dict, List, Tuple

_SCAN_RE = re.compile(
    r"""
    (?P<string>"(?:[^"]|"")*")
  | (?P<ref>(\$?)([A-Z]{1,3})(\$?)([0-9]+)(?::(\$?)([A-Z]{1,3})(\$?)([0-9]+))?)
  | (?P<number>[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)
    """,
    re.VERBOSE,
)


def _letters_to_col(letters: str) -> int:
    col = 0
    for ch in letters:
        col = col * 26 + (ord(ch) - 64)
    return col


def _rel_part(host: int, value: int, anchored: str) -> str:
    return str(value) if anchored else f"[{value - host}]"


def _ref_key(host_col: int, host_row: int,
             col_anchor: str, letters: str, row_anchor: str, digits: str) -> str:
    col = _letters_to_col(letters)
    row = int(digits)
    return (f"R{_rel_part(host_row, row, row_anchor)}"
            f"C{_rel_part(host_col, col, col_anchor)}")


def relative_keys(cells: List[Tuple[int, int, str]]):
    """Per (col, row, canonical_text): (relative key, shape key, ref rects).

    The relative key equals relative_text(relativize(parse(text), host)),
    the shape key the literal-wildcarded variant; rects are absolute
    (c1, r1, c2, r2) tuples in source order.
    """
    out = []
    for host_col, host_row, text in cells:
        key_parts = []
        shape_parts = []
        refs = []
        pos = 0
        for m in _SCAN_RE.finditer(text):
            if m.start() > pos:
                chunk = text[pos:m.start()]
                key_parts.append(chunk)
                shape_parts.append(chunk)
            pos = m.end()
            kind = m.lastgroup
            if kind == "string":
                key_parts.append(m.group())
                shape_parts.append("~")
            elif kind == "number":
                key_parts.append(m.group())
                shape_parts.append("#")
            else:
                ca1, l1, ra1, d1, ca2, l2, ra2, d2 = m.groups()[2:10]
                token = _ref_key(host_col, host_row, ca1, l1, ra1, d1)
                c1, r1 = _letters_to_col(l1), int(d1)
                if l2 is not None:
                    token += ":" + _ref_key(host_col, host_row, ca2, l2, ra2, d2)
                    refs.append((c1, r1, _letters_to_col(l2), int(d2)))
                else:
                    refs.append((c1, r1, c1, r1))
                key_parts.append(token)
                shape_parts.append(token)
        if pos < len(text):
            key_parts.append(text[pos:])
            shape_parts.append(text[pos:])
        out.append(("".join(key_parts), "".join(shape_parts), tuple(refs)))
    return out


def decompose(keyed_cells: Dict[Tuple[int, int], int]) -> List[Tuple[int, int, int, int, int]]:
    """Greedy rectangle decomposition of same-key cells.

    Seeds are visited row-major; each rectangle grows downward maximally and
    then widens right while every added column matches key and is unclaimed.
    Returns (c1, r1, c2, r2, key) rectangles in seed order.
    """
    claimed = set()
    rects = []
    for (col, row) in sorted(keyed_cells, key=lambda cr: (cr[1], cr[0])):
        if (col, row) in claimed:
            continue
        key = keyed_cells[(col, row)]
        bottom = row
        while ((col, bottom + 1) not in claimed
               and keyed_cells.get((col, bottom + 1)) == key):
            bottom += 1
        right = col
        while True:
            nxt = right + 1
            if all((nxt, r) not in claimed and keyed_cells.get((nxt, r)) == key
                   for r in range(row, bottom + 1)):
                right = nxt
            else:
                break
        for c in range(col, right + 1):
            for r in range(row, bottom + 1):
                claimed.add((c, r))
        rects.append((col, row, right, bottom, key))
    return rects
