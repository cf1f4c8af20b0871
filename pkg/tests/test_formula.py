import pytest
from hypothesis import given
from hypothesis import strategies as st

from inqkit.errors import FormulaSyntaxError
from inqkit.formula import (BOT, TOP, And, Atom, Box, BoxPlus, IDisj, Implies, Interner, Not,
                            Or, Question, atoms_of, conj, dag_size, idisj, is_flat_syntax,
                            modal_depth, parse, to_text)


def formulas(agents=("a", "b")):
    leaves = st.one_of(st.sampled_from([Atom("p"), Atom("q"), Atom("r")]), st.just(BOT))

    def extend(children):
        return st.one_of(
            st.builds(And, children, children),
            st.builds(Implies, children, children),
            st.builds(IDisj, children, children),
            st.builds(Box, st.sampled_from(agents), children),
            st.builds(BoxPlus, st.sampled_from(agents), children),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@given(formulas())
def test_print_parse_round_trip(phi):
    text = to_text(phi)
    assert parse(text, ["a", "b"]) == phi


@given(formulas())
def test_hash_consistent_with_equality(phi):
    again = parse(to_text(phi), ["a", "b"])
    assert hash(again) == hash(phi)
    assert Interner()(phi) == phi


@pytest.mark.parametrize("text, expected", [
    ("p & q -> r", Implies(And(Atom("p"), Atom("q")), Atom("r"))),
    ("p -> q -> r", Implies(Atom("p"), Implies(Atom("q"), Atom("r")))),
    ("p \\/ q & r", IDisj(Atom("p"), And(Atom("q"), Atom("r")))),
    ("!p", Implies(Atom("p"), BOT)),
    ("?p", IDisj(Atom("p"), Implies(Atom("p"), BOT))),
    ("p | q", Or(Atom("p"), Atom("q"))),
    ("[b] p", Box("b", Atom("p"))),
    ("[+a](p & q)", BoxPlus("a", And(Atom("p"), Atom("q")))),
    ("T", TOP),
    ("_|_", BOT),
])
def test_parse_examples(text, expected):
    assert parse(text, ["a", "b"]) == expected


def test_sugar_printing():
    assert to_text(Question(Atom("q"))) == "?q"
    assert to_text(Not(Atom("p"))) == "!p"
    assert to_text(Or(Atom("p"), Atom("q"))) == "p | q"
    assert to_text(TOP) == "T"


def test_default_agent():
    assert parse("[]p") == Box("a", Atom("p"))
    assert parse("[]p", ["x"]) == Box("x", Atom("p"))
    with pytest.raises(FormulaSyntaxError, match="unknown agent"):
        parse("[c] p", ["a", "b"])
    with pytest.raises(FormulaSyntaxError, match="exactly one"):
        parse("[]p", ["a", "b"])


@pytest.mark.parametrize("text", ["p &", "(p", "p q", "[+]p", "", "&p"])
def test_syntax_errors_report_position(text):
    with pytest.raises(FormulaSyntaxError) as info:
        parse(text, ["a", "b"])
    assert "position" in str(info.value)


def test_measures():
    phi = parse("[a]([+b]p & q) \\/ r", ["a", "b"])
    assert modal_depth(phi) == 2
    assert atoms_of(phi) == {"p", "q", "r"}
    shared = And(Atom("p"), Atom("p"))
    assert dag_size(shared) == 2
    assert shared.tree_size == 3


def test_flat_syntax():
    assert is_flat_syntax(parse("p & []q"))
    assert is_flat_syntax(parse("?p -> q"))
    assert not is_flat_syntax(parse("?p"))
    assert not is_flat_syntax(parse("p -> ?q"))


def test_empty_connective_helpers():
    assert conj([]) == TOP
    assert idisj([]) == BOT
