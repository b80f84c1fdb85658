"""Backward proof search.

For every calculus whose searchable rules shrink the sequent, :func:`decide`
is a memoized exhaustive search and therefore a decision procedure.  L+eps
has the size-increasing rule Deps and the mutually inverse commuting rules
Leps/Reps; it gets a semi-decision procedure that works on commuting classes
(see :class:`_EpsSearch`).
"""

from __future__ import annotations

import sys
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Union

from . import calculi
from .calculi import Expansion, backward_expand, check_derivation, intake
from .core import (
    DISJ_SEQUENT_TEXT,
    UNIT,
    CalculusId,
    Derivation,
    Formula,
    Join,
    LDiv,
    Meet,
    Sequent,
    Unit,
    Var,
    is_unit_meet,
    parse_formula,
    parse_sequent,
)

C = CalculusId


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 5_000_000
    max_depth: int = 200
    max_deps: int = 6

    def __post_init__(self):
        if min(self.max_nodes, self.max_depth, self.max_deps) <= 0:
            raise ValueError("budget entries must be positive")


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class Derivable:
    derivation: Derivation
    nodes: int = 0
    verdict = "derivable"


@dataclass(frozen=True)
class NotDerivable:
    nodes: int = 0
    verdict = "not-derivable"


@dataclass(frozen=True)
class Unknown:
    nodes: int
    reason: str
    verdict = "unknown"


ProofResult = Union[Derivable, NotDerivable, Unknown]


class _OutOfBudget(Exception):
    pass


class InternalAssembly(RuntimeError):
    """A subgoal of a fixed construction failed; the calculus definition is off."""


_INVERTIBLE = frozenset({"|L", "&R", "\\R", "/R", "*L", "1L"})


def decide(
    s: Sequent,
    calculus: CalculusId,
    budget: SearchBudget = DEFAULT_BUDGET,
    invertible_first: bool = False,
) -> ProofResult:
    """Search for a cut-free derivation of ``s`` in ``calculus``."""
    if calculus is C.MALC_D:
        raise ValueError("MALC_D has Cut and is not searched; use derive_disj_in_malc_d")
    calculi.check_language(s, calculus)
    if calculus is C.LPLUSEPS:
        return _EpsSearch(budget).run(s)
    if calculus in calculi.RESTRICTED and not s.antecedent:
        return NotDerivable(0)
    search = _Exhaustive(calculus, budget, invertible_first)
    goal = intake(s, calculus)
    try:
        d = search.prove(goal)
    except _OutOfBudget:
        return Unknown(search.nodes, f"node budget {budget.max_nodes} exhausted")
    if d is None:
        return NotDerivable(search.nodes)
    if goal != s:
        d = Derivation(s, d.rule, d.premises, d.instantiation)
    return Derivable(d, search.nodes)


class _Exhaustive:
    def __init__(self, calculus: CalculusId, budget: SearchBudget, invertible_first: bool):
        self.calculus = calculus
        self.budget = budget
        self.invertible_first = invertible_first
        self.memo: dict[Sequent, Derivation | None] = {}
        self.nodes = 0

    def prove(self, s: Sequent) -> Derivation | None:
        # every expansion shrinks the sequent, so depth is at most its size
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 4 * s.size + 1000))
        try:
            return self._prove(s)
        finally:
            sys.setrecursionlimit(limit)

    def _prove(self, s: Sequent) -> Derivation | None:
        memo = self.memo
        if s in memo:
            return memo[s]
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise _OutOfBudget
        result = None
        for exp in self._expansions(s):
            subs = []
            for prem in exp.premises:
                d = self._prove(prem)
                if d is None:
                    break
                subs.append(d)
            else:
                result = Derivation(s, exp.rule, tuple(subs), exp.instantiation or None)
                break
        memo[s] = result
        return result

    def _expansions(self, s: Sequent) -> list[Expansion]:
        exps = backward_expand(s, self.calculus)
        if self.invertible_first:
            inv = [e for e in exps if e.rule in _INVERTIBLE]
            if inv:
                return inv[:1]
        return exps


# --------------------------------------------------------------- L + eps
#
# Leps and Reps let a formula 1&G pass any neighbour, in both directions, so
# the sequents reachable by them form a class: the order of the other
# formulas (the skeleton) is fixed while the 1&G formulas (the pool) may sit
# anywhere.  The search runs on classes and only realizes the commuting steps
# when the final derivation is written out.


_Class = tuple  # (skeleton tuple, pool as sorted tuple, succedent)


def _key(f: Formula) -> str:
    return str(f)


def _pool(items) -> tuple:
    return tuple(sorted(items, key=_key))


def _class_of(ant, suc) -> _Class:
    skel = tuple(f for f in ant if not is_unit_meet(f))
    return (skel, _pool(f for f in ant if is_unit_meet(f)), suc)


@dataclass
class _Plan:
    rule: str
    antecedent: tuple
    succedent: Formula
    premises: list = field(default_factory=list)  # (concrete Sequent, _Plan)
    instantiation: dict | None = None
    deps: int = 0


def _sub_pools(pool: tuple):
    return calculi._sub_multisets(pool)


def _remove_one(pool: tuple, f: Formula) -> tuple:
    i = pool.index(f)
    return pool[:i] + pool[i + 1:]


class _EpsSearch:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.nodes = 0
        self.success: dict[_Class, _Plan] = {}
        self.failure: dict[_Class, int] = {}
        self.cut_off = False
        self.counts: _Counts | None = None

    def run(self, s: Sequent) -> ProofResult:
        goal = _class_of(s.antecedent, s.succedent)
        self.counts = _Counts(sorted(s.variables()))
        try:
            # deepen the Deps bound; failures memoized at lower bounds carry over
            plan = None
            for deps in range(self.budget.max_deps + 1):
                plan = self.prove(goal, deps, 0)
                if plan is not None:
                    break
        except _OutOfBudget:
            return Unknown(self.nodes, f"node budget {self.budget.max_nodes} exhausted")
        if plan is None:
            if self.nodes == 0:
                why = "counting invariant fails"
            else:
                why = "depth bound reached" if self.cut_off else "Deps bound reached"
            return Unknown(self.nodes, f"no derivation within budget ({why})")
        return Derivable(realize(plan, s), self.nodes)

    def prove(self, cls: _Class, deps: int, depth: int) -> _Plan | None:
        if not self.counts.feasible(cls):
            return None
        hit = self.success.get(cls)
        if hit is not None and hit.deps <= deps:
            return hit
        if self.failure.get(cls, -1) >= deps:
            return None
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise _OutOfBudget
        if depth >= self.budget.max_depth:
            self.cut_off = True
            return None
        was_cut = self.cut_off
        self.cut_off = False
        plan = self._search(cls, deps, depth)
        if plan is not None:
            old = self.success.get(cls)
            if old is None or plan.deps < old.deps:
                self.success[cls] = plan
        elif not self.cut_off:
            self.failure[cls] = max(deps, self.failure.get(cls, -1))
        self.cut_off = self.cut_off or was_cut
        return plan

    def _search(self, cls: _Class, deps: int, depth: int) -> _Plan | None:
        skel, pool, suc = cls
        flat = skel + pool

        # axioms
        if cls == _class_of((suc,), suc):
            return _Plan("Id", (suc,), suc)
        if cls == _class_of((suc, UNIT), suc):
            return _Plan("1ax", (suc, UNIT), suc)

        def sub(ant, s, d=deps):
            return self.prove(_class_of(ant, s), d, depth + 1)

        # right rules
        if isinstance(suc, LDiv):
            prem = (suc.left,) + flat
            p = sub(prem, suc.right)
            if p is not None:
                return _Plan("\\R", flat, suc, [(Sequent(prem, suc.right), p)], deps=p.deps)
        if isinstance(suc, Meet):
            p1 = sub(flat, suc.left)
            if p1 is not None:
                p2 = sub(flat, suc.right)
                if p2 is not None:
                    return _Plan(
                        "&R", flat, suc,
                        [(Sequent(flat, suc.left), p1), (Sequent(flat, suc.right), p2)],
                        deps=max(p1.deps, p2.deps),
                    )

        # \L with principal skel[i], Pi = skel[k:i] plus a sub-pool
        for i, f in enumerate(skel):
            if not isinstance(f, LDiv):
                continue
            delta = skel[i + 1:]
            for k in range(i, -1, -1):
                for pool_pi, pool_rest in _sub_pools(pool):
                    pi = skel[k:i] + pool_pi
                    p1 = sub(pi, f.left)
                    if p1 is None:
                        continue
                    gamma = skel[:k] + pool_rest
                    main = gamma + (f.right,) + delta
                    p2 = sub(main, suc)
                    if p2 is None:
                        continue
                    ant = gamma + pi + (f,) + delta
                    return _Plan(
                        "\\L", ant, suc,
                        [(Sequent(pi, f.left), p1), (Sequent(main, suc), p2)],
                        {"pos": len(gamma) + len(pi), "split": len(gamma)},
                        max(p1.deps, p2.deps),
                    )

        # &L on a skeleton formula, in place
        for j, f in enumerate(skel):
            if isinstance(f, Meet):
                for rule, part in (("&Ll", f.left), ("&Lr", f.right)):
                    prem = skel[:j] + (part,) + skel[j + 1:] + pool
                    p = sub(prem, suc)
                    if p is not None:
                        return _Plan(rule, flat, suc, [(Sequent(prem, suc), p)], {"pos": j}, p.deps)

        # &L on a pool formula 1&G: the result may land in any gap
        for m in dict.fromkeys(pool):
            rest = _remove_one(pool, m)
            for rule, part in (("&Ll", m.left), ("&Lr", m.right)):
                gaps = [0] if is_unit_meet(part) else range(len(skel) + 1)
                for g in gaps:
                    ant = skel[:g] + (m,) + skel[g:] + rest
                    prem = skel[:g] + (part,) + skel[g:] + rest
                    p = sub(prem, suc)
                    if p is not None:
                        return _Plan(rule, ant, suc, [(Sequent(prem, suc), p)], {"pos": g}, p.deps)

        # Deps: duplicate a pool formula
        if deps > 0:
            for m in dict.fromkeys(pool):
                p = self.prove((skel, _pool(pool + (m,)), suc), deps - 1, depth + 1)
                if p is not None:
                    ant = skel + (m,) + _remove_one(pool, m)
                    return _Plan("Deps", ant, suc, [(Sequent(ant[: len(skel)] + (m, m) + ant[len(skel) + 1:], suc), p)],
                                 {"pos": len(skel)}, p.deps + 1)
        return None


class _Counts:
    """Abelian counting invariant used to prune hopeless classes.

    Every variable is a coordinate of an integer vector.  An antecedent
    occurrence of a formula gets a set of vectors, and so does a succedent
    occurrence; a derivable sequent admits one vector per antecedent formula
    whose sum lies in the succedent's set.  Meets become unions (on both
    sides, so ``&R`` may choose differently in its two branches).  Deps lets
    a left ``1&X`` contribute any sum of values of ``X``; that is
    over-approximated by the rational span, so every value is a finite union
    of affine subspaces ``base + span(periods)`` and the final test is exact
    linear algebra.  All approximations enlarge the sets, so a failed test
    means no derivation exists.
    """

    CAP = 2048

    def __init__(self, names: list[str]):
        self.index = {n: i for i, n in enumerate(names)}
        self.zero = (0,) * len(names)
        self.memo: dict[tuple[Formula, bool], frozenset | None] = {}
        self.span_memo: dict[tuple, tuple] = {}
        self.verdict: dict[_Class, bool] = {}

    # periods are kept as reduced row echelon forms, so equal spans compare equal
    def span(self, *groups) -> tuple:
        key = groups
        hit = self.span_memo.get(key)
        if hit is not None:
            return hit
        rows = [list(map(Fraction, v)) for g in groups for v in g]
        out = tuple(tuple(r) for r in _rref(rows))
        self.span_memo[key] = out
        return out

    def _entry(self, base, periods):
        return (tuple(base), periods)

    def _sum(self, xs, ys):
        if xs is None or ys is None or len(xs) * len(ys) > self.CAP * 4:
            return None
        out = frozenset(
            (tuple(a + b for a, b in zip(bx, by)), px if not py else py if not px else self.span(px, py))
            for bx, px in xs
            for by, py in ys
        )
        return out if len(out) <= self.CAP else None

    def value(self, f: Formula, left: bool):
        key = (f, left)
        if key in self.memo:
            return self.memo[key]
        if isinstance(f, Var):
            v = list(self.zero)
            v[self.index[f.name]] = 1
            out = frozenset([(tuple(v), ())])
        elif isinstance(f, Unit):
            out = frozenset([(self.zero, ())])
        elif left and is_unit_meet(f):
            inner = self.value(f.right, True)
            if inner is None:
                gens = [tuple(int(x) for x in row) for row in _all_directions(len(self.zero))]
            else:
                gens = [b for b, _ in inner] + [p for _, ps in inner for p in ps]
            out = frozenset([(self.zero, self.span(tuple(gens)))])
        elif isinstance(f, Meet):
            a, b = self.value(f.left, left), self.value(f.right, left)
            out = None if a is None or b is None else a | b
            if out is not None and len(out) > self.CAP:
                out = None
        else:  # LDiv: value of B minus the opposite-side value of A
            a = self.value(f.left, not left)
            neg = None if a is None else frozenset((tuple(-x for x in b), p) for b, p in a)
            out = self._sum(self.value(f.right, left), neg)
        self.memo[key] = out
        return out

    def feasible(self, cls: _Class) -> bool:
        hit = self.verdict.get(cls)
        if hit is not None:
            return hit
        skel, pool, suc = cls
        total = frozenset([(self.zero, ())])
        for f in skel + pool:
            total = self._sum(total, self.value(f, True))
            if total is None:
                break
        target = self.value(suc, False)
        ok = total is None or target is None or any(
            _in_span(tuple(x - y for x, y in zip(bt, bs)), self.span(pt, ps) if pt and ps else pt or ps)
            for bt, pt in total
            for bs, ps in target
        )
        self.verdict[cls] = ok
        return ok


def _all_directions(n: int):
    return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]


def _rref(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    out: list[list[Fraction]] = []
    pivots: list[int] = []
    for r in rows:
        r = r[:]
        for p, row in zip(pivots, out):
            if r[p]:
                c = r[p]
                r = [x - c * y for x, y in zip(r, row)]
        lead = next((i for i, x in enumerate(r) if x), None)
        if lead is None:
            continue
        r = [x / r[lead] for x in r]
        for k, row in enumerate(out):
            if row[lead]:
                c = row[lead]
                out[k] = [x - c * y for x, y in zip(row, r)]
        out.append(r)
        pivots.append(lead)
    order = sorted(range(len(out)), key=lambda k: pivots[k])
    return [out[k] for k in order]


def _in_span(v: tuple, basis: tuple) -> bool:
    r = list(map(Fraction, v))
    for row in basis:
        lead = next(i for i, x in enumerate(row) if x)
        if r[lead]:
            c = r[lead]
            r = [x - c * y for x, y in zip(r, row)]
    return not any(r)


def commute(d: Derivation, target: tuple) -> Derivation:
    """Extend ``d`` downward with Leps/Reps steps until its antecedent is ``target``.

    ``target`` must differ from the current antecedent only by moving 1&G
    formulas; the relative order of all other formulas is preserved.
    """
    cur = list(d.conclusion.antecedent)
    suc = d.conclusion.succedent
    target = tuple(target)
    if len(cur) != len(target):
        raise ValueError("commute: antecedents differ in length")
    for i, want in enumerate(target):
        j = next((j for j in range(i, len(cur)) if cur[j] == want), None)
        if j is None:
            raise ValueError(f"commute: {want} missing")
        while j > i:
            # swap cur[j-1], cur[j]; the formula at j moves left
            a, b = cur[j - 1], cur[j]
            if is_unit_meet(b):
                rule = "Leps"
            elif is_unit_meet(a):
                rule = "Reps"
            else:
                raise ValueError("commute: would swap two ordinary formulas")
            cur[j - 1], cur[j] = b, a
            d = Derivation(Sequent(tuple(cur), suc), rule, (d,), {"pos": j - 1})
            j -= 1
    return d


def realize(plan: _Plan, target: Sequent) -> Derivation:
    """Turn a class-level plan into a concrete derivation ending in ``target``."""
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        return _realize(plan, target.antecedent)
    finally:
        sys.setrecursionlimit(limit)


def _realize(plan: _Plan, target_ant: tuple) -> Derivation:
    prems = tuple(_realize(p, s.antecedent) for s, p in plan.premises)
    d = Derivation(Sequent(plan.antecedent, plan.succedent), plan.rule, prems, plan.instantiation)
    return commute(d, target_ant)


# ------------------------------------------------- MALC + D construction


def _must(s: Sequent, calculus: CalculusId = C.MALC) -> Derivation:
    res = decide(s, calculus)
    if not isinstance(res, Derivable):
        raise InternalAssembly(f"subgoal {s} not derivable in {calculus.name}")
    return res.derivation


def derive_disj_in_malc_d() -> Derivation:
    """Derivation of the disjunction sequent in MALC with the distributivity axiom."""
    goal = parse_sequent(DISJ_SEQUENT_TEXT)
    x_y, x_z, w = parse_formula("x/y"), parse_formula("x/z"), parse_formula("w")
    a = Join(x_y, w)
    b = Join(x_z, w)
    pi = goal.antecedent
    conj = Meet(x_y, x_z)
    mid = Join(conj, w)
    target = goal.succedent

    # Pi |- A and Pi |- B, joined by &R
    d_a = _must(Sequent(pi, a))
    d_b = _must(Sequent(pi, b))
    d_ab = Derivation(Sequent(pi, Meet(a, b)), "&R", (d_a, d_b))

    # Cut with the D instance (A|w)&(B|w) |- (A&B)|w
    d_ax = Derivation(Sequent((Meet(a, b),), mid), "D")
    d_mid = Derivation(Sequent(pi, mid), "Cut", (d_ab, d_ax), {"formula": str(Meet(a, b))})

    # ((x/y)&(x/z))|w |- (x/(y|z))|w by |L over two MALC derivations
    d_conj = _must(Sequent((conj,), target.left))
    left_case = Derivation(Sequent((conj,), target), "|Rl", (d_conj,))
    right_case = _must(Sequent((w,), target))
    d_join = Derivation(Sequent((mid,), target), "|L", (left_case, right_case), {"pos": 0})

    d = Derivation(goal, "Cut", (d_mid, d_join), {"formula": str(mid)})
    report = check_derivation(d, C.MALC_D)
    if not report.valid:
        raise InternalAssembly(str(report.error))
    return d
