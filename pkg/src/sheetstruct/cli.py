"""Command-line frontend.

Exit codes: 0 clean/success, 1 violations found, 2 usage or I/O error,
3 operation error (stale or invalid operation). JSON output reuses the
service serializers, so `--json` bodies match the HTTP responses.
"""

from __future__ import annotations

import json
import pathlib
import sys

import click

from . import soundness
from .errors import (
    InvalidSplitPoint, MissingInput, NoSpace, Overlap, SheetStructError,
    StaleCandidate, StalePlan, UnknownGroup, WouldEmptyGroup,
)
from .evaluator import evaluate
from .grid import parse_a1
from .model import Workbook, export_csv, import_csv, load_json, save_json
from .refactor import (
    apply_plan, extend_group, move_group, shrink_group, split_group,
)
from .structure import infer, model_to_json

_OPERATION_ERRORS = (StaleCandidate, StalePlan, InvalidSplitPoint, NoSpace,
                     Overlap, WouldEmptyGroup, MissingInput, UnknownGroup)


def _load(path: str, format_: str = None) -> Workbook:
    p = pathlib.Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    kind = format_ or ("csv" if p.suffix.lower() == ".csv" else "wbk")
    try:
        if kind == "csv":
            return import_csv(data, p.stem or "Sheet1")
        return load_json(data)
    except SheetStructError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(2)


def _write(wb: Workbook, path: str):
    p = pathlib.Path(path)
    try:
        if p.suffix.lower() == ".csv":
            p.write_bytes(export_csv(wb, wb.default_sheet))
        else:
            p.write_bytes(save_json(wb))
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def _resolve_group(model, ref: str):
    try:
        return model.group(ref)
    except UnknownGroup:
        found = model.find_by_range(ref)
        if found is None:
            raise
        return found


@click.group()
def main():
    """Structure-aware spreadsheet analysis and repair."""


@main.command()
@click.argument("file")
@click.option("--json", "as_json", is_flag=True, help="emit the model as JSON")
@click.option("--format", "format_", type=click.Choice(["wbk", "csv"]), default=None)
def analyze(file, as_json, format_):
    """Print the inferred structure model."""
    wb = _load(file, format_)
    model = infer(wb)
    if as_json:
        click.echo(json.dumps(model_to_json(model), indent=2))
        return
    for g in model.groups:
        click.echo(f"{g.range.a1():<12}{g.formula_text:<32}({g.range.area} cells)")


def _glyph_grid(wb: Workbook, model) -> list:
    """Monochrome structure sketch: one letter per group, . for literals."""
    lines = []
    for sheet in wb.sheet_names:
        rng = wb.used_range(sheet)
        if rng is None:
            continue
        order = {g.id: i for i, g in enumerate(model.groups)}
        lines.append(f"[{sheet}]")
        cells = wb.sheets[sheet]
        for row in range(rng.start.row, rng.end.row + 1):
            chars = []
            for col in range(rng.start.col, rng.end.col + 1):
                gid = model.cell_group.get((sheet, col, row))
                if gid is not None:
                    chars.append(chr(ord("a") + order[gid] % 26))
                elif (col, row) in cells:
                    chars.append(".")
                else:
                    chars.append(" ")
            lines.append("".join(chars).rstrip())
    return lines


@main.command()
@click.argument("file")
@click.option("--json", "as_json", is_flag=True)
@click.option("--format", "format_", type=click.Choice(["wbk", "csv"]), default=None)
def check(file, as_json, format_):
    """Check structural soundness; exit 1 when violations are found."""
    wb = _load(file, format_)
    model = infer(wb)
    report = soundness.check(wb, model)
    if as_json:
        click.echo(json.dumps(report.to_json(), indent=2))
    elif report.clean:
        click.echo("clean")
    else:
        for v in report.violations:
            click.echo(f"{v.kind} at {v.focus.a1()}: {v.message}")
        for line in _glyph_grid(wb, model):
            click.echo(line)
    sys.exit(0 if report.clean else 1)


@main.command()
@click.argument("file")
@click.option("--out", required=True)
@click.option("--interactive/--auto", default=False)
@click.option("--format", "format_", type=click.Choice(["wbk", "csv"]), default=None)
def repair(file, out, interactive, format_):
    """Apply repair candidates until the workbook is sound."""
    wb = _load(file, format_)

    def ask(spec):
        if not interactive:
            return None
        click.echo(spec.get("prompt", "input"), err=True)
        line = sys.stdin.readline()
        return line.rstrip("\n") if line else None

    report, applied = soundness.guided_repair(wb, ask=ask)
    for description in applied:
        click.echo(f"applied: {description}")
    _write(wb, out)
    if not report.clean:
        for v in report.violations:
            click.echo(f"unresolved: {v.kind} at {v.focus.a1()}", err=True)
        sys.exit(1)


@main.command()
@click.argument("file")
@click.option("--op", required=True,
              type=click.Choice(["split", "extend", "shrink", "move"]))
@click.option("--group", "group_ref", required=True)
@click.option("--at", "at_", default=None, help="split subexpression")
@click.option("--count", default=1, type=int)
@click.option("--direction", default="end", type=click.Choice(["end", "start"]))
@click.option("--target", default=None, help="helper lane or move destination")
@click.option("--dry-run", is_flag=True)
@click.option("--out", default=None)
@click.option("--format", "format_", type=click.Choice(["wbk", "csv"]), default=None)
def refactor(file, op, group_ref, at_, count, direction, target, dry_run, out, format_):
    """Build (and optionally apply) a refactoring plan."""
    wb = _load(file, format_)
    model = infer(wb)
    try:
        group = _resolve_group(model, group_ref)
        if op == "split":
            plan = split_group(wb, model, group.id, at_ or "", target)
        elif op == "extend":
            plan = extend_group(wb, model, group.id, count, direction)
        elif op == "shrink":
            plan = shrink_group(wb, model, group.id, count, direction)
        else:
            dest = parse_a1(target or "", wb.default_sheet)
            plan = move_group(wb, model, group.id, dest)
        if dry_run:
            click.echo(json.dumps(plan.to_json(), indent=2))
            return
        apply_plan(wb, plan)
    except _OPERATION_ERRORS as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(3)
    if not out:
        click.echo("error: --out is required unless --dry-run", err=True)
        sys.exit(2)
    _write(wb, out)


@main.command(name="eval")
@click.argument("file")
@click.option("--cell", default=None)
@click.option("--json", "as_json", is_flag=True)
@click.option("--format", "format_", type=click.Choice(["wbk", "csv"]), default=None)
def eval_cmd(file, cell, as_json, format_):
    """Evaluate the workbook and print cell values."""
    wb = _load(file, format_)
    values = evaluate(wb)
    if cell is not None:
        addr = parse_a1(cell, wb.default_sheet)
        picked = {addr: values.get(addr)}
    else:
        picked = values
    items = sorted(((a, v) for a, v in picked.items() if v is not None),
                   key=lambda kv: (kv[0].sheet, kv[0].row, kv[0].col))
    if as_json:
        click.echo(json.dumps(
            {a.a1(with_sheet=True): v.to_json() for a, v in items}, indent=2))
        return
    for addr, value in items:
        rendered = value.to_json()
        shown = rendered.get("value", rendered.get("code", ""))
        click.echo(f"{addr.a1(with_sheet=True):<16}{shown}")


@main.command()
@click.option("--port", default=None, type=int)
def serve(port):
    """Run the HTTP session service."""
    from .service import DEFAULT_PORT, run
    run(port if port is not None else DEFAULT_PORT)


if __name__ == "__main__":
    main()
