"""Parser, printer and relative-form tests."""

import pytest
from hypothesis import given, settings, strategies as st

from sheetstruct.errors import FormulaParseError, OutOfBounds
from sheetstruct.formula import (
    absolutize, parse_formula, print_formula, reference_slots, relative_text,
    relativize, shape_text,
)
from sheetstruct.formula.ast import (
    Binary, BoolLit, Call, CellRef, NumberLit, Paren, RangeRef, TextLit, Unary,
)
from sheetstruct.grid import CellAddress, CellRange


def canon(text: str) -> str:
    return print_formula(parse_formula(text))


HOST = CellAddress("S", 4, 5)  # D5


class TestParsing:
    def test_literals(self):
        assert parse_formula("=42") == NumberLit(42.0)
        assert parse_formula('="hi"') == TextLit("hi")
        assert parse_formula("=TRUE") == BoolLit(True)
        assert parse_formula('="a""b"') == TextLit('a"b')

    def test_refs(self):
        assert parse_formula("=B2") == CellRef(2, 2)
        assert parse_formula("=$B$2") == CellRef(2, 2, True, True)
        assert parse_formula("=B2:C4") == RangeRef(CellRef(2, 2), CellRef(3, 4))

    def test_range_corners_normalized(self):
        assert canon("=SUM(C4:B2)") == "=SUM(B2:C4)"

    def test_case_and_spacing_normalized(self):
        assert canon("= b2 + sum( a1 , 2 )") == "=B2+SUM(A1,2)"

    def test_true_as_function_name_rejected(self):
        with pytest.raises(FormulaParseError):
            parse_formula("=TRUE(")

    @pytest.mark.parametrize("bad", ["=", "=1+", "=(1", "=B2:", "=1 2", "=#"])
    def test_errors_carry_position(self, bad):
        with pytest.raises(FormulaParseError) as info:
            parse_formula(bad)
        assert info.value.position is not None

    def test_out_of_bounds_ref(self):
        with pytest.raises(FormulaParseError):
            parse_formula("=A1048577")


class TestPrecedence:
    """The grammar binds ^ looser than a leading unary minus."""

    @pytest.mark.parametrize("text,tree", [
        ("=1+2*3", Binary("+", NumberLit(1.0),
                          Binary("*", NumberLit(2.0), NumberLit(3.0)))),
        ("=-2^2", Binary("^", Unary("-", NumberLit(2.0)), NumberLit(2.0))),
        ("=2^3^2", Binary("^", NumberLit(2.0),
                          Binary("^", NumberLit(3.0), NumberLit(2.0)))),
        ("=1<2&3", Binary("<", NumberLit(1.0),
                          Binary("&", NumberLit(2.0), NumberLit(3.0)))),
    ])
    def test_shapes(self, text, tree):
        assert parse_formula(text) == tree

    def test_redundant_parens_preserved_in_ast(self):
        assert parse_formula("=(1)") == Paren(NumberLit(1.0))

    def test_written_parens_survive_canonicalization(self):
        assert canon("=(1+2)*3") == "=(1+2)*3"
        assert canon("=(1*2)+3") == "=(1*2)+3"
        assert canon("=-(2)^2") == "=-(2)^2"

    def test_structural_parens_added_when_needed(self):
        tree = Binary("*", Binary("+", NumberLit(1.0), NumberLit(2.0)),
                      NumberLit(3.0))
        assert print_formula(tree) == "=(1+2)*3"


class TestRelativeForm:
    def test_round_trip(self):
        for text in ["=B2+C2-5000", "=$A$1*B5", "=SUM(B2:B10)", "=D4"]:
            node = parse_formula(text)
            rel = relativize(node, HOST)
            assert absolutize(rel, HOST) == node

    def test_anchored_parts_stay_absolute(self):
        rel = relativize(parse_formula("=$B2+C$3"), HOST)
        moved = absolutize(rel, CellAddress("S", 6, 9))
        assert print_formula(moved) == "=$B6+E$3"

    def test_relative_text_is_r1c1(self):
        rel = relativize(parse_formula("=B4+$C$9"), HOST)
        assert relative_text(rel) == "=R[-1]C[-2]+R9C3"

    def test_shape_text_wildcards_literals(self):
        rel = relativize(parse_formula('=B5*0.05&"x"'), HOST)
        assert shape_text(rel) == "=R[0]C[-2]*#&~"

    def test_absolutize_out_of_grid(self):
        rel = relativize(parse_formula("=B4"), HOST)
        with pytest.raises(OutOfBounds):
            absolutize(rel, CellAddress("S", 1, 1))

    def test_reference_slots_in_source_order(self):
        node = parse_formula("=SUM(B2:B4)+C9")
        slots = reference_slots(node, HOST)
        assert [(s[0], s[1]) for s in slots] == [(1, "range"), (2, "cell")]
        assert slots[0][2] == CellRange(CellAddress("S", 2, 2),
                                        CellAddress("S", 2, 4))


# -- property tests --------------------------------------------------------

_numbers = st.one_of(
    st.integers(min_value=0, max_value=10_000).map(float),
    st.floats(min_value=0.001, max_value=1e6, allow_nan=False,
              allow_infinity=False))

_leaf = st.one_of(
    _numbers.map(NumberLit),
    st.text(alphabet="ab\" ", max_size=4).map(TextLit),
    st.booleans().map(BoolLit),
    st.builds(CellRef, st.integers(1, 50), st.integers(1, 50),
              st.booleans(), st.booleans()),
)


def _ranges():
    def mk(c1, r1, c2, r2):
        return RangeRef(CellRef(min(c1, c2), min(r1, r2)),
                        CellRef(max(c1, c2), max(r1, r2)))
    ints = st.integers(1, 50)
    return st.builds(mk, ints, ints, ints, ints)


_expr = st.recursive(
    st.one_of(_leaf, _ranges()),
    lambda inner: st.one_of(
        st.builds(Unary, st.just("-"), inner),
        st.builds(Binary, st.sampled_from(["+", "-", "*", "/", "^", "&",
                                           "=", "<>", "<", "<=", ">", ">="]),
                  inner, inner),
        st.builds(lambda args: Call("SUM", tuple(args)),
                  st.lists(inner, min_size=1, max_size=3)),
        inner.map(Paren),
    ),
    max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(_expr)
def test_print_parse_fixed_point(node):
    text = print_formula(node)
    reparsed = parse_formula(text)
    assert print_formula(reparsed) == text


@settings(max_examples=200, deadline=None)
@given(_expr)
def test_relativize_absolutize_inverse(node):
    host = CellAddress("S", 60, 60)
    assert absolutize(relativize(node, host), host) == node


@settings(max_examples=200, deadline=None)
@given(_expr)
def test_shape_text_independent_of_literals(node):
    host = CellAddress("S", 60, 60)
    rel = relativize(node, host)
    assert shape_text(rel) == shape_text(relativize(node, host))
    assert "=" == shape_text(rel)[0]
