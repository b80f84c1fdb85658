import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambek.calculi import check_derivation
from lambek.core import UNIT, CalculusId, Meet, Var, parse_formula, parse_sequent, render
from lambek.minsky import (
    DEC,
    FINAL,
    INC,
    INC_MACHINE,
    JZ,
    JZDEC,
    LOOP_MACHINE,
    Configuration,
    EmptySequence,
    EncodingContext,
    Instruction,
    MinskyMachine,
    NotWithinCaps,
    Reached,
    TraceInvalid,
    apply_instruction,
    double_neg_b,
    encode_config,
    fold_backslash,
    instruction_formula,
    lemma_fragment,
    load_machine,
    machine_conjuncts,
    machine_formula,
    machine_to_dict,
    meet_all,
    parse_configuration,
    reach_final,
    replay,
    rotation_formula,
    simulate_step,
    synthesize_derivation,
    target_sequent,
    translate_jzdec,
)
from lambek.prover import Derivable, SearchBudget, decide

C = CalculusId
V = Var


def test_dec_on_zero_blocks():
    assert simulate_step(MinskyMachine(2, [DEC(1, 1, 0)]), Configuration(1, 0, 0)) == set()


def test_jz_applies_only_on_zero():
    m = MinskyMachine(2, [JZ(1, 1, 0)])
    assert simulate_step(m, Configuration(1, 0, 0)) == {FINAL}
    assert simulate_step(m, Configuration(1, 1, 0)) == set()


def test_inc_and_dec():
    assert apply_instruction(INC(1, 2, 0), Configuration(1, 0, 3)) == Configuration(0, 0, 4)
    assert apply_instruction(DEC(1, 1, 1), Configuration(1, 2, 0)) == Configuration(1, 1, 0)
    assert apply_instruction(DEC(1, 1, 1), Configuration(0, 2, 0)) is None


def test_nondeterminism():
    m = MinskyMachine(3, [INC(1, 1, 2), DEC(1, 2, 0)])
    assert simulate_step(m, Configuration(1, 0, 1)) == {Configuration(2, 1, 1), Configuration(0, 0, 0)}


def test_loop_reaches_final():
    res = reach_final(LOOP_MACHINE, Configuration(1, 3, 0))
    assert isinstance(res, Reached)
    assert len(res.trace) == 4
    assert replay(Configuration(1, 3, 0), res.trace)[-1] == FINAL


def test_final_reaches_itself():
    assert reach_final(LOOP_MACHINE, FINAL) == Reached(())


def test_inc_machine_never_reaches_final():
    res = reach_final(INC_MACHINE, Configuration(1, 0, 0), cap=10)
    assert isinstance(res, NotWithinCaps)


def test_bad_machines_and_configs():
    with pytest.raises(ValueError):
        MinskyMachine(2, [INC(1, 1, 5)])
    with pytest.raises(ValueError):
        Instruction("mul", 1, 1, 0)
    with pytest.raises(ValueError):
        Configuration(1, -1, 0)
    with pytest.raises(ValueError):
        reach_final(LOOP_MACHINE, FINAL, cap=0)
    with pytest.raises(TraceInvalid):
        replay(Configuration(1, 0, 0), [DEC(1, 1, 1)])


def test_translate_jzdec():
    assert translate_jzdec([JZDEC(1, 1, 2, 0)]) == [DEC(1, 1, 2), JZ(1, 1, 0)]


def test_fold_and_double_negation():
    assert fold_backslash([V("a1"), V("a2")], V("c")) == parse_formula("a2\\(a1\\c)")
    ctx = EncodingContext(1)
    assert double_neg_b([V("p1"), V("lj")], ctx) == parse_formula("(lj\\(p1\\b))\\b")
    assert double_neg_b([V("q")], ctx) == parse_formula("(q\\b)\\b")
    with pytest.raises(EmptySequence):
        fold_backslash([], V("c"))


@pytest.mark.parametrize(
    "ins, text",
    [
        (INC(2, 1, 3), "l2\\((l3\\(p1\\b))\\b)"),
        (DEC(2, 1, 3), "l2\\(p1\\((l3\\b)\\b))"),
        (JZ(2, 2, 3), "e2\\(l2\\((e2\\(l3\\b))\\b))"),
        (JZ(2, 1, 3), "l2\\(e1\\((l3\\(e1\\b))\\b))"),
        (INC(2, 2, 3), "l2\\((p2\\(l3\\b))\\b)"),
        (DEC(2, 2, 3), "p2\\(l2\\((l3\\b)\\b))"),
    ],
)
def test_instruction_formulas(ins, text):
    assert instruction_formula(ins, EncodingContext(3)) == parse_formula(text)


def test_encode_config():
    ctx = EncodingContext(3)
    assert encode_config(FINAL, ctx) == [V("e1"), V("l0"), V("e2")]
    assert encode_config(Configuration(3, 2, 1), ctx) == [V(x) for x in ("e1", "p1", "p1", "l3", "p2", "e2")]


def test_rotation_formula():
    assert rotation_formula(V("p1"), EncodingContext(0)) == parse_formula("p1\\((p1\\b)\\b)")


def test_empty_machine_formula():
    m = MinskyMachine(1, [])
    ctx = EncodingContext.for_machine(m)
    parts = machine_conjuncts(m, ctx)
    assert parts[0] == parse_formula("e2\\(l0\\(e1\\b))")
    assert parts[1:] == [rotation_formula(V(q), ctx) for q in ("e1", "e2", "p1", "p2", "l0")]
    g = machine_formula(m, ctx)
    assert g == meet_all(parts)
    assert isinstance(g, Meet) and g.left == parts[0]


def test_star_zero_target():
    s = target_sequent(LOOP_MACHINE, FINAL)
    g = machine_formula(LOOP_MACHINE, EncodingContext.for_machine(LOOP_MACHINE))
    assert s.antecedent[0] == Meet(UNIT, g)
    assert render(s).endswith("e1, l0, e2 |- b")
    assert parse_sequent(render(s)) == s


def test_star_zero_tree():
    d = synthesize_derivation(LOOP_MACHINE, FINAL, [])
    assert [n.rule for n in d.nodes()] == [
        "Leps", "Leps", "Leps", "&Lr", "&Ll", "\\L", "Id", "\\L", "Id", "\\L", "Id", "Id",
    ]
    assert check_derivation(d, C.LPLUSEPS).valid


def test_loop_one_step():
    start = Configuration(1, 1, 0)
    d = synthesize_derivation(LOOP_MACHINE, start, [DEC(1, 1, 1), JZ(1, 1, 0)])
    assert d.conclusion == target_sequent(LOOP_MACHINE, start)
    assert check_derivation(d, C.LPLUSEPS).valid


def test_node_count_grows_with_k():
    counts = []
    for k in range(1, 6):
        start = Configuration(1, k, 0)
        d = synthesize_derivation(LOOP_MACHINE, start, reach_final(LOOP_MACHINE, start).trace)
        assert check_derivation(d, C.LPLUSEPS).valid
        counts.append(d.node_count())
    assert counts == [94, 163, 255, 372, 516]


def test_bad_traces():
    with pytest.raises(TraceInvalid):
        synthesize_derivation(LOOP_MACHINE, Configuration(1, 1, 0), [DEC(1, 1, 1)])
    with pytest.raises(TraceInvalid):
        synthesize_derivation(LOOP_MACHINE, Configuration(1, 0, 0), [INC(1, 1, 1)])


def random_machine(rng, states=3, size=4):
    ops = ["inc", "dec", "jz"]
    ins = [Instruction(rng.choice(ops), rng.randrange(states), rng.choice((1, 2)), rng.randrange(states))
           for _ in range(size)]
    return MinskyMachine(states, tuple(dict.fromkeys(ins)))


def test_synthesis_agrees_with_simulation_on_corpus():
    rng = random.Random(8)
    reached = 0
    for _ in range(200):
        m = random_machine(rng)
        start = Configuration(rng.randrange(m.state_count), rng.randrange(3), rng.randrange(3))
        res = reach_final(m, start, cap=6, max_steps=30)
        if isinstance(res, Reached):
            reached += 1
            d = synthesize_derivation(m, start, res.trace)
            assert check_derivation(d, C.LPLUSEPS).valid
    assert reached >= 15


def test_bounded_converse_evidence():
    rng = random.Random(3)
    tried = 0
    budget = SearchBudget(max_nodes=4_000, max_deps=2)
    for _ in range(40):
        m = random_machine(rng, states=2, size=2)
        start = Configuration(1, rng.randrange(2), rng.randrange(2))
        if isinstance(reach_final(m, start, cap=20, max_steps=200), NotWithinCaps):
            tried += 1
            res = decide(target_sequent(m, start), C.LPLUSEPS, budget)
            assert not isinstance(res, Derivable)
    assert tried >= 5


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.lists(st.sampled_from(["e1", "e2", "p1", "p2", "l0", "l1", "l2"]), max_size=3))
def test_lemma_fragment_checks_with_hypothesis_leaf(seed, delta):
    rng = random.Random(seed)
    m = random_machine(rng)
    ctx = EncodingContext.for_machine(m)
    index = rng.randrange(1, len(machine_conjuncts(m, ctx)))
    d, premise = lemma_fragment(m, index, [V(x) for x in delta], ctx)
    assert check_derivation(d, C.LPLUSEPS, hypotheses=[premise]).valid
    assert not check_derivation(d, C.LPLUSEPS).valid  # the leaf needs the hypothesis


def test_lemma_fragment_rejects_termination_index():
    with pytest.raises(IndexError):
        lemma_fragment(LOOP_MACHINE, 0, [])


def test_machine_files(tmp_path):
    path = tmp_path / "m.json"
    data = {"states": 3, "instructions": [{"op": "jzdec", "from": 1, "reg": 1, "to": 2, "to2": 0},
                                          {"op": "inc", "from": 2, "reg": 2, "to": 1}]}
    path.write_text(json.dumps(data))
    m = load_machine(str(path))
    assert m.instructions == (DEC(1, 1, 2), JZ(1, 1, 0), INC(2, 2, 1))
    assert machine_to_dict(m)["states"] == 3


@pytest.mark.parametrize("text, expected", [("1,3,0", Configuration(1, 3, 0)), ("(L2, 0, 1)", Configuration(2, 0, 1))])
def test_parse_configuration(text, expected):
    assert parse_configuration(text) == expected


def test_parse_configuration_errors():
    with pytest.raises(ValueError):
        parse_configuration("1,2")
