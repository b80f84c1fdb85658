"""The reproduction suite: one function per headline claim.

Each check returns ``(ok, detail)``; :func:`run` adds timing and enforces the
wall-clock limit attached to the case.  Both ``pytest`` and ``lambek repro``
go through :func:`run_all`.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable

from . import langmodel as lm
from .calculi import check_derivation
from .core import DISJ_SEQUENT_TEXT, DISTRIBUTIVITY_TEXT, CalculusId, parse_sequent
from .lattice import lattice_sequent_true, paper_lattice_r5, validate_lattice
from .minsky import (
    INC_MACHINE,
    LOOP_MACHINE,
    Configuration,
    FINAL,
    Reached,
    reach_final,
    synthesize_derivation,
    target_sequent,
)
from .oracles import commutative_by_states, division_mismatches, monotone_by_states
from .prover import Derivable, NotDerivable, Unknown, decide, derive_disj_in_malc_d
from .randgen import random_derivable

C = CalculusId
ALPHABET = ("a", "b")


@dataclass(frozen=True)
class Case:
    key: str
    title: str
    limit: float  # seconds
    check: Callable[[], tuple[bool, str]]


@dataclass(frozen=True)
class Outcome:
    key: str
    title: str
    passed: bool
    seconds: float
    limit: float
    detail: str

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.key:<22} {self.seconds:7.2f}s (limit {self.limit:g}s)  {self.detail}"


# ------------------------------------------------------------------ checks


def disj_not_derivable() -> tuple[bool, str]:
    s = parse_sequent(DISJ_SEQUENT_TEXT)
    parts = []
    ok = True
    for calc in (C.MALC, C.MALCSTAR, C.AMALCSTAR, C.ILL, C.IAL):
        t = time.perf_counter()
        res = decide(s, calc)
        dt = time.perf_counter() - t
        good = isinstance(res, NotDerivable) and dt <= 60
        ok &= good
        parts.append(f"{calc.value}:{res.verdict}")
    return ok, " ".join(parts)


def disj_in_malc_d() -> tuple[bool, str]:
    d = derive_disj_in_malc_d()
    report = check_derivation(d, C.MALC_D)
    ok = d.conclusion == parse_sequent(DISJ_SEQUENT_TEXT) and report.valid
    return ok, f"{d.node_count()} nodes, checker {'accepts' if report.valid else report.error}"


def r5_countermodel() -> tuple[bool, str]:
    L = paper_lattice_r5()
    report = validate_lattice(L)
    asg = {"y": "b", "z": "c", "x": "a", "w": "a"}
    false = not lattice_sequent_true(L, asg, parse_sequent(DISJ_SEQUENT_TEXT))
    facts = L.p("a", "b") == "b" and not L.le("b", "a")
    return report.valid and false and facts, (
        f"lattice valid={report.valid}, sequent false={false}, a*b=b and b not<=a: {facts}"
    )


def distributivity_split() -> tuple[bool, str]:
    s = parse_sequent(DISTRIBUTIVITY_TEXT)
    verdicts = {calc: decide(s, calc) for calc in (C.MALC, C.ILL, C.IAL)}
    underivable = all(isinstance(r, NotDerivable) for r in verdicts.values())
    variables = sorted(s.variables())
    true_in = sum(
        lm.sequent_truth(lm.random_model(ALPHABET, variables, seed, lm.ModelClass.PLAIN, lm.EPS), s)
        for seed in range(200)
    )
    return underivable and true_in == 200, (
        " ".join(f"{c.value}:{r.verdict}" for c, r in verdicts.items()) + f", true in {true_in}/200 models"
    )


def lambek_restriction() -> tuple[bool, str]:
    a = parse_sequent("(p\\p)\\q |- q")
    b = parse_sequent(" |- p\\p")
    res = {
        "a@L*": decide(a, C.LSTAR),
        "a@L": decide(a, C.L),
        "b@L": decide(b, C.L),
        "b@L*": decide(b, C.LSTAR),
    }
    ok = (
        isinstance(res["a@L*"], Derivable)
        and isinstance(res["a@L"], NotDerivable)
        and isinstance(res["b@L"], NotDerivable)
        and isinstance(res["b@L*"], Derivable)
    )
    return ok, " ".join(f"{k}:{v.verdict}" for k, v in res.items())


def unit_witness() -> tuple[bool, str]:
    s = parse_sequent("1/p, 1/p |- 1/p")
    res = decide(s, C.L1)
    true_in = sum(
        lm.sequent_truth(lm.random_model(ALPHABET, ["p"], seed, lm.ModelClass.PLAIN, lm.EPS), s)
        for seed in range(200)
    )
    return isinstance(res, NotDerivable) and true_in == 200, f"L1:{res.verdict}, true in {true_in}/200 models"


def division_oracle(pairs: int = 100, length: int = 6) -> tuple[bool, str]:
    rng = random.Random(2024)
    bad = []
    for i in range(pairs):
        a = lm.random_dfa(rng, ALPHABET, 5)
        b = lm.random_dfa(rng, ALPHABET, 5)
        for sem in (lm.EPS, lm.NOEPS):
            x, y = a, b
            if sem is lm.NOEPS:
                plus = lm.nonempty_words(ALPHABET)
                x, y = lm.intersect(a, plus), lm.intersect(b, plus)
            left = lm.left_divide(x, y, sem)
            right = lm.right_divide(y, x, sem)
            if division_mismatches(x, y, left, right, sem, length):
                bad.append((i, sem.value))
    return not bad, f"{pairs} pairs x 2 semantics, mismatches: {bad[:5] or 'none'}"


def _residuation_triple(rng: random.Random, sem: lm.Semantics):
    def pick():
        lang = lm.random_dfa(rng, ALPHABET, 4)
        if sem is lm.NOEPS:
            lang = lm.intersect(lang, lm.nonempty_words(ALPHABET))
        return lang

    a, b, c = pick(), pick(), pick()
    if rng.random() < 0.5:  # make the inclusion hold now and then
        c = lm.union(lm.concat(a, b), c)
    return a, b, c


def residuation(triples: int = 100) -> tuple[bool, str]:
    rng = random.Random(7)
    held = 0
    bad = 0
    for _ in range(triples):
        for sem in (lm.EPS, lm.NOEPS):
            a, b, c = _residuation_triple(rng, sem)
            one = lm.includes(lm.concat(a, b), c)
            two = lm.includes(b, lm.left_divide(a, c, sem))
            three = lm.includes(a, lm.right_divide(c, b, sem))
            bad += not (one == two == three)
            held += one
    return bad == 0, f"{2 * triples} triples, {held} with A.B <= C, {bad} disagreements"


def class_machinery(n: int = 100) -> tuple[bool, str]:
    rng = random.Random(11)
    failures = []
    mono = [lm.monotone_closure(lm.random_dfa(rng, ALPHABET, 4)) for _ in range(n)]
    if not all(lm.class_check(x, "monotone") and monotone_by_states(x) for x in mono):
        failures.append("closure")
    for seed in range(n):
        model = lm.random_model(ALPHABET, ["p", "q"], seed, lm.ModelClass.COMMUTATIVE, lm.EPS)
        if not all(lm.class_check(v, "commutative") and commutative_by_states(v) for v in model.valuation.values()):
            failures.append(f"commutative model {seed}")
            break
    for _ in range(n):
        a = lm.monotone_closure(lm.random_dfa(rng, ALPHABET, 4))
        b = lm.monotone_closure(lm.random_dfa(rng, ALPHABET, 4))
        for r in (lm.left_divide(a, b), lm.right_divide(b, a), lm.intersect(a, b)):
            if not (lm.class_check(r, "monotone") and monotone_by_states(r)):
                failures.append("monotone pair")
                break
    for _ in range(n):
        a = lm.random_commutative(rng, ALPHABET)
        b = lm.random_commutative(rng, ALPHABET)
        ld, rd, mt = lm.left_divide(a, b), lm.right_divide(b, a), lm.intersect(a, b)
        if ld != rd or not all(lm.class_check(r, "commutative") and commutative_by_states(r) for r in (ld, mt)):
            failures.append("commutative pair")
            break
    return not failures, f"{n} closures, {n} models, {n}+{n} pairs; failures: {failures or 'none'}"


def minsky_pipeline() -> tuple[bool, str]:
    counts = []
    ok = True
    for k in range(6):
        start = Configuration(1, k, 0)
        run = reach_final(LOOP_MACHINE, start)
        if not isinstance(run, Reached):
            return False, f"simulator does not reach {FINAL} from {start}"
        d = synthesize_derivation(LOOP_MACHINE, start, run.trace)
        ok &= check_derivation(d, C.LPLUSEPS).valid
        counts.append(d.node_count())
    ok &= all(x < y for x, y in zip(counts, counts[1:]))
    inc = decide(target_sequent(INC_MACHINE, Configuration(1, 0, 0)), C.LPLUSEPS)
    ok &= isinstance(inc, Unknown)
    return ok, f"node counts {counts}, INC machine: {inc.verdict}"


SWEEP_FAMILIES = (
    (C.L, lm.ModelClass.PLAIN, lm.NOEPS, True),
    (C.MALC, lm.ModelClass.PLAIN, lm.NOEPS, True),
    (C.LSTAR, lm.ModelClass.PLAIN, lm.EPS, True),
    (C.MALCSTAR, lm.ModelClass.PLAIN, lm.EPS, True),
    (C.AMALCSTAR, lm.ModelClass.MONOTONE, lm.EPS, True),
    (C.ILL, lm.ModelClass.COMMUTATIVE, lm.EPS, False),
    (C.IAL, lm.ModelClass.MONOTONE_COMMUTATIVE, lm.EPS, False),
)


def soundness_sweep(sequents: int = 500, models: int = 20) -> tuple[bool, str]:
    """Derivable sequents hold in every sampled model of the matching class.

    The commutative families use product-free sequents and the bounded
    refutation search only.
    """
    parts = []
    ok = True
    for calc, cls, sem, product in SWEEP_FAMILIES:
        rng = random.Random(101)
        seqs = [random_derivable(rng, calc, product=product).conclusion for _ in range(sequents)]
        failed = 0
        for seed in range(models):
            model = lm.random_model(ALPHABET, ["p", "q", "r"], seed, cls, sem, max_states=3)
            cache: dict = {}
            for s in seqs:
                if cls in (lm.ModelClass.COMMUTATIVE, lm.ModelClass.MONOTONE_COMMUTATIVE):
                    failed += lm.commutative_refutation(model, s, 8, cache) is not None
                else:
                    failed += not lm.sequent_truth(model, s, cache)
        ok &= failed == 0
        parts.append(f"{calc.value}:{failed}")
    return ok, f"{sequents} sequents x {models} models per family, failures " + " ".join(parts)


CASES = (
    Case("disj-underivable", "disjunction sequent not derivable in the five calculi", 300, disj_not_derivable),
    Case("disj-malc-d", "disjunction sequent derivable in MALC+D", 5, disj_in_malc_d),
    Case("r5-countermodel", "five-element lattice falsifies the disjunction sequent", 1, r5_countermodel),
    Case("distributivity", "distributivity underivable yet true in L-models", 30, distributivity_split),
    Case("lambek-restriction", "empty antecedents separate L from L*", 1, lambek_restriction),
    Case("unit-witness", "1/p,1/p |- 1/p underivable in L1 yet true", 30, unit_witness),
    Case("division-oracle", "automaton divisions match brute force", 60, division_oracle),
    Case("residuation", "divisions are residuals of the product", 60, residuation),
    Case("class-machinery", "monotone and commutative classes are closed", 120, class_machinery),
    Case("minsky-pipeline", "loop machine derivations and INC budget exhaustion", 120, minsky_pipeline),
    Case("soundness-sweep", "derivable sequents true in matching models", 600, soundness_sweep),
)

CASE_KEYS = tuple(c.key for c in CASES)


def run(case: Case) -> Outcome:
    t = time.perf_counter()
    try:
        ok, detail = case.check()
    except Exception as exc:  # a crash is a failed criterion, reported as such
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t
    if dt > case.limit:
        ok = False
        detail += f" (over the {case.limit:g}s limit)"
    return Outcome(case.key, case.title, ok, dt, case.limit, detail)


def run_all(only: str | None = None) -> list[Outcome]:
    cases = [c for c in CASES if only is None or c.key == only]
    if not cases:
        raise KeyError(f"no acceptance case named {only!r}")
    return [run(c) for c in cases]
