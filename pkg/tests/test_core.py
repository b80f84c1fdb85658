import pytest
from hypothesis import given, settings

from lambek.core import (
    DISJ_SEQUENT_TEXT,
    UNIT,
    AmbiguityError,
    CalculusId,
    Derivation,
    Join,
    LDiv,
    Meet,
    ParseError,
    Prod,
    RDiv,
    Sequent,
    Unit,
    Var,
    is_unit_meet,
    normalize_commutative,
    parse_formula,
    parse_sequent,
    render,
    sequent,
)

from strategies import formulas, sequents

p, q, r = Var("p"), Var("q"), Var("r")


def test_parse_nested_division():
    assert parse_formula("(p\\p)\\q") == LDiv(LDiv(p, p), q)


def test_parse_empty_antecedent_unit():
    s = parse_sequent("|- 1")
    assert s.antecedent == () and s.succedent == UNIT


def test_parse_unit_over_p():
    s = parse_sequent("1/p, 1/p |- 1/p")
    assert s.antecedent == (RDiv(UNIT, p), RDiv(UNIT, p))
    assert s.succedent == RDiv(UNIT, p)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("p*q*r", Prod(Prod(p, q), r)),
        ("p|q&r", Join(p, Meet(q, r))),
        ("p*q\\r", LDiv(Prod(p, q), r)),
        ("p/q*r", RDiv(p, Prod(q, r))),
        ("p ∧ q ∨ r", Join(Meet(p, q), r)),
        ("p ⊸ q", LDiv(p, q)),
    ],
)
def test_precedence_and_aliases(text, expected):
    assert parse_formula(text) == expected


def test_division_chain_is_ambiguous():
    with pytest.raises(AmbiguityError):
        parse_formula("p\\q\\r")
    with pytest.raises(AmbiguityError):
        parse_formula("p/q\\r")


@pytest.mark.parametrize("bad", ["", "p |", "(p", "p q", "P", "p, q |- ", "p |- q |- r", "p,,q |- r", "p # q"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        if "|-" in bad:
            parse_sequent(bad)
        else:
            parse_formula(bad)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_formula("p * ) q")
    assert info.value.position == 4


def test_disj_sequent_roundtrip():
    s = parse_sequent(DISJ_SEQUENT_TEXT)
    assert len(s.antecedent) == 3
    assert parse_sequent(render(s)) == s


@settings(max_examples=1000, deadline=None)
@given(formulas(unit=True, max_leaves=8))
def test_render_parse_roundtrip(f):
    assert parse_formula(render(f)) == f


@given(sequents(unit=True))
def test_sequent_roundtrip(s):
    assert parse_sequent(render(s)) == s


@given(formulas())
def test_equal_formulas_hash_equal(f):
    g = parse_formula(str(f))
    assert f == g and hash(f) == hash(g)


def test_size_counts_symbols():
    assert parse_formula("(p\\p)\\q").size == 5
    assert parse_sequent("p, p\\q |- q").size == 5
    assert UNIT.size == 1


def test_formulas_are_immutable():
    with pytest.raises(AttributeError):
        p.name = "q"


def test_bad_variable_names():
    for name in ("P", "1x", "", "p q"):
        with pytest.raises(ValueError):
            Var(name)


def test_unit_meet_and_normalization():
    assert is_unit_meet(Meet(UNIT, p))
    assert not is_unit_meet(Meet(p, UNIT))
    assert normalize_commutative(parse_formula("(q/p)*r")) == parse_formula("(p\\q)*r")
    f = parse_formula("p\\q")
    assert normalize_commutative(f) is f


def test_sequent_helper_and_variables():
    s = sequent(["p", "q\\r"], "r")
    assert s == parse_sequent("p, q\\r |- r")
    assert s.variables() == {"p", "q", "r"}
    assert Unit() == UNIT


@pytest.mark.parametrize(
    "text, member",
    [("L*", CalculusId.LSTAR), ("malc", CalculusId.MALC), ("MALC+D", CalculusId.MALC_D),
     ("l+eps", CalculusId.LPLUSEPS), ("AMALC*", CalculusId.AMALCSTAR), ("ial", CalculusId.IAL)],
)
def test_calculus_parse(text, member):
    assert CalculusId.parse(text) is member


def test_calculus_parse_unknown():
    with pytest.raises(ValueError):
        CalculusId.parse("lk")


def test_derivation_traversal_is_iterative():
    leaf = Derivation(parse_sequent("p |- p"), "Id")
    d = leaf
    for _ in range(5000):
        d = Derivation(Sequent(d.conclusion.antecedent + (q,), p), "W", (d,))
    assert d.node_count() == 5001
    assert d.height() == 5001
    assert d.leaves() == [leaf]


def test_render_derivation():
    leaf = Derivation(parse_sequent("p |- p"), "Id")
    d = Derivation(parse_sequent("|- p\\p"), "\\R", (leaf,))
    assert render(d).splitlines() == ["|- (p\\p)   [\\R]", "  p |- p   [Id]"]
