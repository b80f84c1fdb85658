import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambek import langmodel as lm
from lambek.core import ParseError, parse_formula, parse_sequent
from lambek.oracles import (
    commutative_by_states,
    division_mismatches,
    monotone_by_states,
    naive_division_members,
    words_upto,
)

AB = ("a", "b")
EPS, NOEPS = lm.EPS, lm.NOEPS


def L(*words):
    return lm.word_language(AB, words)


def members(lang, n=6):
    return set(lm.bounded_words(lang, n))


def dfa(seed, states=4):
    return lm.random_dfa(random.Random(seed), AB, states)


seeds = st.integers(0, 10**6)


def test_regex_epsilon():
    assert members(lm.compile_language("%", AB)) == {""}
    assert lm.compile_language("#", AB).is_empty()


def test_regex_prefix_a():
    lang = lm.compile_language("a(a|b)*", AB)
    assert members(lang, 4) == {w for w in words_upto(AB, 4) if w.startswith("a")}


def test_ab_star_has_three_states():
    lang = lm.compile_language("(ab)*", AB)
    assert lang.size == 3
    assert members(lang) == {"", "ab", "abab", "ababab"}


def test_regex_errors():
    with pytest.raises(lm.AlphabetError):
        lm.compile_language("c", AB)
    with pytest.raises(ParseError):
        lm.compile_language("(a", AB)


def test_automaton_record_roundtrip():
    lang = lm.compile_language("a*b", AB)
    assert lm.compile_language({"automaton": lang.to_record()}, AB) == lang


def test_combine_examples():
    assert lm.combine("concat", L("a"), L("b")) == L("ab")
    assert lm.combine("intersect", L("a", "ab"), L("ab", "b")) == L("ab")
    assert lm.combine("complement", lm.universal(AB)).is_empty()
    with pytest.raises(ValueError):
        lm.combine("complement", L("a"), L("b"))
    with pytest.raises(lm.AlphabetError):
        lm.concat(L("a"), lm.universal(("a",)))


def test_left_division_examples():
    assert members(lm.left_divide(L("a"), L("a", "ab"))) == {"", "b"}
    assert lm.left_divide(lm.empty_language(AB), L("a")) == lm.universal(AB)
    a = L("a")
    assert lm.left_divide(a, a, EPS).contains_epsilon()
    assert lm.left_divide(a, a, NOEPS).is_empty()


def test_right_division_examples():
    assert members(lm.right_divide(L("ab"), L("b"))) == {"a"}
    assert lm.right_divide(L("a"), lm.empty_language(AB)) == lm.universal(AB)


def test_minimal_form_is_canonical():
    x = lm.union(L("a"), L("b"))
    y = lm.compile_language("b|a", AB)
    assert x == y and hash(x) == hash(y)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_mirror_symmetry(seed):
    rng = random.Random(seed)
    a, b = lm.random_dfa(rng, AB, 4), lm.random_dfa(rng, AB, 4)
    rd = lm.right_divide(b, a)
    assert rd == lm.reverse(lm.left_divide(lm.reverse(a), lm.reverse(b)))


@settings(max_examples=100, deadline=None)
@given(seeds, st.sampled_from([EPS, NOEPS]))
def test_division_matches_oracle(seed, sem):
    rng = random.Random(seed)
    a, b = lm.random_dfa(rng, AB, 5), lm.random_dfa(rng, AB, 5)
    if sem is NOEPS:
        a, b = lm.intersect(a, lm.nonempty_words(AB)), lm.intersect(b, lm.nonempty_words(AB))
    left, right = lm.left_divide(a, b, sem), lm.right_divide(b, a, sem)
    assert division_mismatches(a, b, left, right, sem, 6) == []


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_division_matches_plain_enumeration_on_tiny_automata(seed):
    """No deduplication: every word of A up to the bound is tried."""
    rng = random.Random(seed)
    a, b = lm.random_dfa(rng, AB, 2), lm.random_dfa(rng, AB, 3)
    assert members(lm.left_divide(a, b), 5) == naive_division_members(a, b, 5, "left")
    assert members(lm.right_divide(b, a), 5) == naive_division_members(a, b, 5, "right")


@settings(max_examples=100, deadline=None)
@given(seeds, st.sampled_from([EPS, NOEPS]))
def test_residuation(seed, sem):
    rng = random.Random(seed)
    langs = [lm.random_dfa(rng, AB, 4) for _ in range(3)]
    if sem is NOEPS:
        langs = [lm.intersect(x, lm.nonempty_words(AB)) for x in langs]
    a, b, c = langs
    if rng.random() < 0.5:
        c = lm.union(c, lm.concat(a, b))
    one = lm.includes(lm.concat(a, b), c)
    assert one == lm.includes(b, lm.left_divide(a, c, sem))
    assert one == lm.includes(a, lm.right_divide(c, b, sem))


def test_includes_examples():
    assert lm.includes(L("a"), lm.universal(AB))
    assert not lm.includes(lm.universal(AB), L("a"))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_boolean_operations_match_enumeration(seed):
    rng = random.Random(seed)
    a, b = lm.random_dfa(rng, AB, 4), lm.random_dfa(rng, AB, 4)
    ma, mb = members(a, 5), members(b, 5)
    assert members(lm.union(a, b), 5) == ma | mb
    assert members(lm.intersect(a, b), 5) == ma & mb
    assert members(lm.difference(a, b), 5) == ma - mb
    assert members(lm.complement(a), 5) == set(words_upto(AB, 5)) - ma
    assert members(lm.kleene_star(a), 4) >= {""} | members(a, 4)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_concat_matches_pairwise_oracle(seed):
    rng = random.Random(seed)
    a, b = lm.random_dfa(rng, AB, 4), lm.random_dfa(rng, AB, 4)
    n = 5
    pairwise = {u + v for u in members(a, n) for v in members(b, n) if len(u + v) <= n}
    assert set(lm.bounded_words(lm.concat(a, b), n)) == pairwise


def test_bounded_words_examples():
    assert lm.bounded_words(lm.universal(("a",)), 2) == ["", "a", "aa"]
    assert lm.bounded_words(L("ab"), 1) == []
    with pytest.raises(ValueError):
        lm.bounded_words(L("ab"), -1)


def test_mub_examples():
    assert lm.mub_product_bounded(L("ab"), L(""), 2) == {"ab", "ba"}
    assert lm.mub_product_bounded(L(""), L(""), 3) == {""}


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_mub_contains_concatenation_and_is_permutation_closed(seed):
    rng = random.Random(seed)
    a, b = lm.random_dfa(rng, AB, 3), lm.random_dfa(rng, AB, 3)
    out = lm.mub_product_bounded(a, b, 5)
    assert set(lm.bounded_words(lm.concat(a, b), 5)) <= out
    for w in out:
        assert {"".join(p) for p in itertools.permutations(w)} <= out


# ------------------------------------------------------------------ classes


def test_class_examples():
    u = lm.universal(AB)
    assert lm.class_check(u, "monotone") and lm.class_check(u, "commutative")
    ab = L("ab")
    assert not lm.class_check(ab, "monotone")
    assert not lm.class_check(ab, "commutative")


def test_monotone_closure_examples():
    closure = lm.monotone_closure(L("ab"))
    expected = {w for w in words_upto(AB, 5) if "a" in w and "b" in w[w.index("a"):]}
    assert members(closure, 5) == expected
    assert lm.monotone_closure(lm.universal(AB)) == lm.universal(AB)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_class_check_agrees_with_state_oracles(seed):
    a = dfa(seed, 4)
    assert lm.class_check(a, "monotone") == monotone_by_states(a)
    assert lm.class_check(a, "commutative") == commutative_by_states(a)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_closure_is_least_monotone_superset(seed):
    a = dfa(seed, 4)
    c = lm.monotone_closure(a)
    assert lm.includes(a, c)
    assert lm.class_check(c, "monotone") and monotone_by_states(c)
    if lm.class_check(a, "monotone"):
        assert c == a


def test_class_check_on_enumerated_small_automata():
    """Exhaustive over all 2-state complete DFAs on {a,b}."""
    for table in itertools.product(range(2), repeat=4):
        delta = [[table[0], table[1]], [table[2], table[3]]]
        for acc in ({0}, {1}, {0, 1}, set()):
            lang = lm.RegLang._build(AB, delta, 0, acc)
            words = members(lang, 5)
            mono = all(
                (w[:i] + x + w[i:]) in lang
                for w in words if len(w) < 5
                for i in range(len(w) + 1)
                for x in AB
            )
            comm = all(
                (w[:i] + w[i + 1] + w[i] + w[i + 2:]) in lang
                for w in words
                for i in range(len(w) - 1)
            )
            assert lm.class_check(lang, "monotone") == mono
            assert lm.class_check(lang, "commutative") == comm


@pytest.mark.parametrize(
    "cls",
    [lm.ModelClass.MONOTONE, lm.ModelClass.COMMUTATIVE, lm.ModelClass.MONOTONE_COMMUTATIVE],
)
def test_random_models_respect_class(cls):
    for seed in range(100):
        model = lm.random_model(AB, ["p", "q"], seed, cls)
        for v in model.valuation.values():
            assert lm.class_check(v, cls)


def test_random_model_is_deterministic():
    a = lm.random_model(AB, ["p", "q"], 0, "monotone")
    b = lm.random_model(AB, ["p", "q"], 0, "monotone")
    assert a.valuation == b.valuation


def test_epsilon_free_models_have_no_empty_word():
    for seed in range(30):
        model = lm.random_model(AB, ["p"], seed, "plain", "noeps")
        assert not model.valuation["p"].contains_epsilon()


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_monotone_closed_under_divisions_and_meet(seed):
    rng = random.Random(seed)
    a = lm.monotone_closure(lm.random_dfa(rng, AB, 4))
    b = lm.monotone_closure(lm.random_dfa(rng, AB, 4))
    for r in (lm.left_divide(a, b), lm.right_divide(b, a), lm.intersect(a, b)):
        assert lm.class_check(r, "monotone")


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_commutative_divisions_coincide(seed):
    rng = random.Random(seed)
    a, b = lm.random_commutative(rng, AB), lm.random_commutative(rng, AB)
    assert lm.left_divide(a, b) == lm.right_divide(b, a)
    assert lm.class_check(lm.left_divide(a, b), "commutative")
    assert lm.class_check(lm.intersect(a, b), "commutative")


# ------------------------------------------------------------------ models


def model(**vals):
    return lm.ModelAssignment(AB, EPS, {k: lm.word_language(AB, v) for k, v in vals.items()})


def test_eval_examples():
    m = model(p=["a"], q=["b"])
    assert lm.eval_formula(m, parse_formula("p\\p")).contains_epsilon()
    assert members(lm.eval_formula(m, parse_formula("1"))) == {""}
    assert lm.eval_formula(m, parse_formula("p&q")).is_empty()


def test_eval_errors():
    m = model(p=["a"])
    with pytest.raises(lm.UnboundVariable):
        lm.eval_formula(m, parse_formula("p*q"))
    noeps = lm.ModelAssignment(AB, NOEPS, {"p": L("a")})
    with pytest.raises(lm.UnitInEpsilonFree):
        lm.eval_formula(noeps, parse_formula("1/p"))
    with pytest.raises(lm.EmptyAntecedentInEpsilonFree):
        lm.sequent_truth(noeps, parse_sequent("|- p"))
    with pytest.raises(ValueError):
        lm.ModelAssignment(AB, NOEPS, {"p": L("", "a")})


def test_sequent_truth_examples():
    m = model(p=["a"], q=["b", "ab"])
    assert lm.sequent_truth(m, parse_sequent("(p\\p)\\q |- q"))
    assert lm.sequent_truth(m, parse_sequent("|- 1"))
    assert not lm.sequent_truth(m, parse_sequent("q |- p"))


def test_distributivity_true_in_sampled_models():
    s = parse_sequent("(x|z)&(y|z) |- (x&y)|z")
    for seed in range(50):
        assert lm.sequent_truth(lm.random_model(AB, "xyz", seed), s)


def test_commutative_refutation():
    m = model(p=["ab"], q=["ab"])
    assert lm.commutative_refutation(m, parse_sequent("p |- q")) == "ba"
    m2 = lm.ModelAssignment(AB, EPS, {"p": lm.compile_language("(a|b)(a|b)", AB)})
    assert lm.commutative_refutation(m2, parse_sequent("p |- p")) is None


def test_model_file_roundtrip(tmp_path):
    m = lm.random_model(AB, ["p", "q"], 3, "commutative")
    path = tmp_path / "m.json"
    import json

    path.write_text(json.dumps(lm.model_to_dict(m)))
    again = lm.load_model(str(path))
    assert again.valuation == m.valuation and again.semantics is m.semantics


def test_model_from_regex_dict():
    m = lm.model_from_dict({"alphabet": ["a", "b"], "vars": {"p": "a", "q": "b|ab"}})
    assert lm.sequent_truth(m, parse_sequent("(p\\p)\\q |- q"))
