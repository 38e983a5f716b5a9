# cython: boundscheck=False, wraparound=False
"""Compiled kernel: same contract as kernel.pure, hand-rolled token scan."""

from cpython.unicode cimport PyUnicode_READ_CHAR


cdef inline bint _is_digit(Py_UCS4 ch):
    return u'0' <= ch <= u'9'


cdef inline bint _is_upper(Py_UCS4 ch):
    return u'A' <= ch <= u'Z'


def relative_keys(cells):
    """Per (col, row, canonical_text): (relative key, shape key, ref rects)."""
    out = []
    cdef Py_ssize_t pos, n, start, letters, digits_start, i
    cdef int host_col, host_row, col, row, c1, r1
    cdef Py_UCS4 ch
    for host_col, host_row, text in cells:
        n = len(text)
        key_parts = []
        shape_parts = []
        refs = []
        pos = 0
        pending = -1  # start of a pending single-cell ref within a range
        pending_c = 0
        pending_r = 0
        while pos < n:
            ch = PyUnicode_READ_CHAR(text, pos)
            if ch == u'"':
                start = pos
                pos += 1
                while pos < n:
                    if PyUnicode_READ_CHAR(text, pos) == u'"':
                        if pos + 1 < n and PyUnicode_READ_CHAR(text, pos + 1) == u'"':
                            pos += 2
                            continue
                        pos += 1
                        break
                    pos += 1
                key_parts.append(text[start:pos])
                shape_parts.append(u"~")
                continue
            if _is_digit(ch):
                start = pos
                while pos < n and _is_digit(PyUnicode_READ_CHAR(text, pos)):
                    pos += 1
                if pos < n and PyUnicode_READ_CHAR(text, pos) == u'.':
                    pos += 1
                    while pos < n and _is_digit(PyUnicode_READ_CHAR(text, pos)):
                        pos += 1
                if pos < n and (PyUnicode_READ_CHAR(text, pos) == u'e'
                                or PyUnicode_READ_CHAR(text, pos) == u'E'):
                    i = pos + 1
                    if i < n and (PyUnicode_READ_CHAR(text, i) == u'+'
                                  or PyUnicode_READ_CHAR(text, i) == u'-'):
                        i += 1
                    if i < n and _is_digit(PyUnicode_READ_CHAR(text, i)):
                        pos = i
                        while pos < n and _is_digit(PyUnicode_READ_CHAR(text, pos)):
                            pos += 1
                key_parts.append(text[start:pos])
                shape_parts.append(u"#")
                continue
            if ch == u'$' or _is_upper(ch):
                start = pos
                col_abs = ch == u'$'
                if col_abs:
                    pos += 1
                letters = 0
                while pos < n and _is_upper(PyUnicode_READ_CHAR(text, pos)):
                    letters += 1
                    pos += 1
                row_abs = pos < n and PyUnicode_READ_CHAR(text, pos) == u'$'
                if row_abs:
                    pos += 1
                digits_start = pos
                while pos < n and _is_digit(PyUnicode_READ_CHAR(text, pos)):
                    pos += 1
                if letters == 0 or letters > 3 or pos == digits_start:
                    # a function name or TRUE/FALSE, copied verbatim
                    while pos < n:
                        ch = PyUnicode_READ_CHAR(text, pos)
                        if _is_upper(ch) or ch == u'.':
                            pos += 1
                        else:
                            break
                    chunk = text[start:pos]
                    key_parts.append(chunk)
                    shape_parts.append(chunk)
                    continue
                col = 0
                i = start + (1 if col_abs else 0)
                while i < digits_start - (1 if row_abs else 0):
                    col = col * 26 + (<int>PyUnicode_READ_CHAR(text, i) - 64)
                    i += 1
                row = 0
                i = digits_start
                while i < pos:
                    row = row * 10 + (<int>PyUnicode_READ_CHAR(text, i) - 48)
                    i += 1
                token = u"R%s" % (str(row) if row_abs else u"[%d]" % (row - host_row))
                token += u"C%s" % (str(col) if col_abs else u"[%d]" % (col - host_col))
                key_parts.append(token)
                shape_parts.append(token)
                if pending >= 0:
                    refs.append((pending_c, pending_r, col, row))
                    pending = -1
                elif pos < n and PyUnicode_READ_CHAR(text, pos) == u':':
                    pending = start
                    pending_c = col
                    pending_r = row
                else:
                    refs.append((col, row, col, row))
                continue
            pos += 1
            key_parts.append(text[pos - 1:pos])
            shape_parts.append(text[pos - 1:pos])
        result_key = u"".join(key_parts)
        result_shape = u"".join(shape_parts)
        out.append((result_key, result_shape, tuple(refs)))
    return out


def decompose(keyed_cells):
    """Greedy rectangle decomposition; see kernel.pure.decompose."""
    cdef int col, row, bottom, right, nxt, r, c
    cdef bint column_ok
    claimed = set()
    rects = []
    order = sorted(keyed_cells, key=_row_major)
    for coord in order:
        if coord in claimed:
            continue
        col = coord[0]
        row = coord[1]
        key = keyed_cells[coord]
        bottom = row
        while True:
            below = (col, bottom + 1)
            if below not in claimed and keyed_cells.get(below) == key:
                bottom += 1
            else:
                break
        right = col
        while True:
            nxt = right + 1
            column_ok = True
            for r in range(row, bottom + 1):
                cand = (nxt, r)
                if cand in claimed or keyed_cells.get(cand) != key:
                    column_ok = False
                    break
            if not column_ok:
                break
            right = nxt
        for c in range(col, right + 1):
            for r in range(row, bottom + 1):
                claimed.add((c, r))
        rects.append((col, row, right, bottom, key))
    return rects


def _row_major(coord):
    return (coord[1], coord[0])
