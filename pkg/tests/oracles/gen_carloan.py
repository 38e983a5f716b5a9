"""Generate the car-loan fixture and its expected-value tables.

Deliberately independent of the engine: the amortization is computed with a
plain Python loop and the workbook file is emitted directly in the canonical
layout. Run from the repo root to refresh tests/fixtures/.
"""

import json
import pathlib

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

SHEET = "Loan"
PRINCIPAL = 25000.0
PAYMENT = 5000.0
RATE_BASE = 0.035
RATE_EDIT = 0.05


def col_letter(col):
    s = ""
    while col:
        col, rem = divmod(col - 1, 26)
        s = chr(ord("A") + rem) + s
    return s


def amortize(rates):
    """Rows of (start, interest, end) for the given per-period rates.

    The final period has no end balance (the sheet's End column stops one
    row short of the Start/Interest columns).
    """
    rows = []
    balance = PRINCIPAL
    for i, rate in enumerate(rates):
        interest = balance * rate
        if i == len(rates) - 1:
            rows.append((balance, interest, None))
        else:
            end = balance + interest - PAYMENT
            rows.append((balance, interest, end))
            balance = end
    return rows


def number_cell(addr, value):
    # canonical serialization writes integral numbers without a fraction
    if value == int(value):
        value = int(value)
    return {"addr": addr, "kind": "number", "value": value}


def text_cell(addr, value):
    return {"addr": addr, "kind": "text", "value": value}


def formula_cell(addr, text):
    return {"addr": addr, "kind": "formula", "formula": text}


def build_workbook():
    cells = [
        text_cell("A1", "Year"),
        text_cell("B1", "Start balance"),
        text_cell("C1", "Interest"),
        text_cell("D1", "End balance"),
    ]
    for row in range(2, 10):
        cells.append(number_cell(f"A{row}", float(row - 1)))
        if row == 2:
            cells.append(number_cell("B2", PRINCIPAL))
        else:
            cells.append(formula_cell(f"B{row}", f"=D{row - 1}"))
        cells.append(formula_cell(f"C{row}", f"=B{row}*{RATE_BASE}"))
        if row <= 8:
            cells.append(formula_cell(f"D{row}", f"=B{row}+C{row}-{PAYMENT:.0f}"))
    cells.sort(key=lambda c: (int(c["addr"][1:]), c["addr"][0]))
    return {"version": "1", "sheets": [{"name": SHEET, "cells": cells}]}


def expected_values(rates):
    values = {}
    for i, (start, interest, end) in enumerate(amortize(rates)):
        row = i + 2
        values[f"B{row}"] = start
        values[f"C{row}"] = interest
        if end is not None:
            values[f"D{row}"] = end
    return values


def dump(path, obj):
    path.write_text(json.dumps(obj, indent=2) + "\n")
    print("wrote", path)


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    dump(FIXTURES / "carloan.wbk.json", build_workbook())

    dump(FIXTURES / "carloan.expected.json", expected_values([RATE_BASE] * 8))

    # every period at 5%: the state after the C6 rate edit is propagated
    # outward over the rest of the column
    dump(FIXTURES / "carloan_rate5.expected.json",
         expected_values([RATE_EDIT] * 8))

    # year 6 (row 6) cascade-deleted: one fewer period
    dump(FIXTURES / "carloan_drop_year6.expected.json",
         expected_values([RATE_BASE] * 7))


if __name__ == "__main__":
    main()
