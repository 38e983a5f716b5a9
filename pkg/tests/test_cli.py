"""CLI commands: output formats, exit codes and file round-trips."""

import json

import pytest
from click.testing import CliRunner

from sheetstruct.cli import main
from sheetstruct.model import load_json, save_json
from sheetstruct.soundness import check
from sheetstruct.structure import infer, model_to_json


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def wbk_path(tmp_path, carloan_bytes):
    path = tmp_path / "loan.wbk.json"
    path.write_bytes(carloan_bytes)
    return str(path)


@pytest.fixture
def broken_path(tmp_path, carloan):
    """Fixture with the C6 rate edited to 5%."""
    from sheetstruct.grid import parse_a1
    from sheetstruct.model import content_from_input
    carloan.set_cell(parse_a1("C6", "Loan"), content_from_input("=B6*0.05"))
    path = tmp_path / "edited.wbk.json"
    path.write_bytes(save_json(carloan))
    return str(path)


class TestAnalyze:
    def test_text_listing(self, runner, wbk_path):
        result = runner.invoke(main, ["analyze", wbk_path])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert any(line.startswith("D2:D8") and "=B2+C2-5000" in line
                   and "(7 cells)" in line for line in lines)
        assert len(lines) == 3

    def test_json_matches_library_serializer(self, runner, wbk_path, carloan):
        result = runner.invoke(main, ["analyze", wbk_path, "--json"])
        assert json.loads(result.output) == model_to_json(infer(carloan))

    def test_missing_file_exit_2(self, runner, tmp_path):
        result = runner.invoke(main, ["analyze", str(tmp_path / "no.wbk.json")])
        assert result.exit_code == 2

    def test_malformed_file_exit_2(self, runner, tmp_path):
        path = tmp_path / "bad.wbk.json"
        path.write_bytes(b"{")
        result = runner.invoke(main, ["analyze", str(path)])
        assert result.exit_code == 2

    def test_csv_autodetected(self, runner, tmp_path):
        path = tmp_path / "data.csv"
        path.write_bytes(b"1,=A1*2\n2,=A2*2\n")
        result = runner.invoke(main, ["analyze", str(path)])
        assert result.exit_code == 0
        assert "B1:B2" in result.output


class TestCheck:
    def test_clean_exit_0(self, runner, wbk_path):
        result = runner.invoke(main, ["check", wbk_path])
        assert result.exit_code == 0
        assert result.output.strip() == "clean"

    def test_violations_exit_1_with_sketch(self, runner, broken_path):
        result = runner.invoke(main, ["check", broken_path])
        assert result.exit_code == 1
        assert "DeviantCell at C6" in result.output
        assert "[Loan]" in result.output

    def test_json_report(self, runner, broken_path):
        result = runner.invoke(main, ["check", broken_path, "--json"])
        doc = json.loads(result.output)
        assert result.exit_code == 1
        assert doc["clean"] is False
        assert doc["candidates"]


class TestRepair:
    def test_auto_repair_produces_clean_output(self, runner, broken_path,
                                               tmp_path):
        out = tmp_path / "fixed.wbk.json"
        result = runner.invoke(
            main, ["repair", broken_path, "--out", str(out), "--auto"])
        assert result.exit_code == 0
        assert "applied:" in result.output
        assert check(load_json(out.read_bytes())).clean

    def test_interactive_reads_stdin(self, runner, tmp_path):
        src = tmp_path / "ref.wbk.json"
        src.write_bytes(
            b'{"version": "1", "sheets": [{"name": "S", "cells": ['
            b'{"addr": "B2", "kind": "formula", "formula": "=A9*2"}]}]}\n')
        out = tmp_path / "ref.fixed.wbk.json"
        result = runner.invoke(
            main, ["repair", str(src), "--out", str(out), "--interactive"],
            input="5\n")
        assert result.exit_code == 0
        wb = load_json(out.read_bytes())
        from sheetstruct.grid import parse_a1
        assert wb.get_cell(parse_a1("A9", "S")).number == 5.0

    def test_unresolved_exit_1(self, runner, tmp_path):
        src = tmp_path / "ref.wbk.json"
        src.write_bytes(
            b'{"version": "1", "sheets": [{"name": "S", "cells": ['
            b'{"addr": "B2", "kind": "formula", "formula": "=A9*2"}]}]}\n')
        out = tmp_path / "still.wbk.json"
        result = runner.invoke(
            main, ["repair", str(src), "--out", str(out), "--auto"])
        assert result.exit_code == 1
        assert "unresolved:" in result.output


class TestRefactor:
    def test_dry_run_leaves_file_untouched(self, runner, wbk_path,
                                           carloan_bytes):
        result = runner.invoke(main, [
            "refactor", wbk_path, "--op", "split", "--group", "D2:D8",
            "--at", "B+C", "--dry-run"])
        assert result.exit_code == 0
        plan = json.loads(result.output)
        assert plan["valueImpact"] == "preserving"
        with open(wbk_path, "rb") as handle:
            assert handle.read() == carloan_bytes

    def test_split_writes_output(self, runner, wbk_path, tmp_path):
        out = tmp_path / "split.wbk.json"
        result = runner.invoke(main, [
            "refactor", wbk_path, "--op", "split", "--group", "D2:D8",
            "--at", "B+C", "--out", str(out)])
        assert result.exit_code == 0
        groups = {g.range.a1() for g in infer(load_json(out.read_bytes())).groups}
        assert "E2:E8" in groups

    def test_extend_by_group_id(self, runner, wbk_path, carloan, tmp_path):
        gid = infer(carloan).find_by_range("D2:D8").id
        out = tmp_path / "ext.wbk.json"
        result = runner.invoke(main, [
            "refactor", wbk_path, "--op", "extend", "--group", gid,
            "--count", "1", "--out", str(out)])
        assert result.exit_code == 0
        groups = {g.range.a1() for g in infer(load_json(out.read_bytes())).groups}
        assert "D2:D9" in groups

    def test_operation_error_exit_3(self, runner, wbk_path):
        result = runner.invoke(main, [
            "refactor", wbk_path, "--op", "split", "--group", "D2:D8",
            "--at", "B+C", "--target", "C", "--dry-run"])
        assert result.exit_code == 3

    def test_unknown_group_exit_3(self, runner, wbk_path):
        result = runner.invoke(main, [
            "refactor", wbk_path, "--op", "extend", "--group", "Z1:Z9",
            "--dry-run"])
        assert result.exit_code == 3

    def test_missing_out_exit_2(self, runner, wbk_path):
        result = runner.invoke(main, [
            "refactor", wbk_path, "--op", "extend", "--group", "D2:D8"])
        assert result.exit_code == 2


class TestEval:
    def test_single_cell(self, runner, wbk_path):
        result = runner.invoke(main, ["eval", wbk_path, "--cell", "C2"])
        assert result.exit_code == 0
        assert "Loan!C2" in result.output
        assert "875" in result.output

    def test_json_values(self, runner, wbk_path):
        result = runner.invoke(main, ["eval", wbk_path, "--json"])
        doc = json.loads(result.output)
        assert doc["Loan!C2"]["kind"] == "number"
        assert doc["Loan!C2"]["value"] == pytest.approx(875.0)
        assert doc["Loan!A1"] == {"kind": "text", "value": "Year"}
