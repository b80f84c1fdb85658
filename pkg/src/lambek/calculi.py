"""Rule schemas, backward rule application and derivation checking.

Backward expansion (:func:`backward_expand`) inverts rule figures: given a
conclusion it lists every premise tuple.  The checker
(:func:`check_derivation`) works the other way round, computing conclusions
forward from the premises, so the two share no matching code.

Noncommutative calculi see the antecedent as a list.  ILL and IAL see it as a
multiset: ``B/A`` is rewritten to ``A\\B`` on intake and antecedents are kept
sorted.
"""

from __future__ import annotations

import contextlib
import itertools
import json
import sys
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .core import (
    UNIT,
    CalculusId,
    Derivation,
    Formula,
    Join,
    LDiv,
    Meet,
    Prod,
    RDiv,
    Sequent,
    Unit,
    Var,
    is_unit_meet,
    normalize_commutative,
    parse_sequent,
    render,
)

C = CalculusId


@dataclass(frozen=True)
class RuleSchema:
    id: str
    arity: int
    side_conditions: tuple[str, ...] = ()
    size_decreasing: bool = True
    # False for rules only the checker accepts (Cut, IAL weakening)
    searchable: bool = True


NONEMPTY = "antecedent of the conclusion is non-empty"
UNIT_MEET = "principal formula has shape 1&G"

_AX = RuleSchema("Id", 0)


def _lambek_core(restricted: bool) -> list[RuleSchema]:
    cond = (NONEMPTY,) if restricted else ()
    return [
        _AX,
        RuleSchema("\\L", 2),
        RuleSchema("\\R", 1, cond),
        RuleSchema("/L", 2),
        RuleSchema("/R", 1, cond),
        RuleSchema("*L", 1),
        RuleSchema("*R", 2),
    ]


_ADDITIVES = [
    RuleSchema("|L", 2),
    RuleSchema("|Rl", 1),
    RuleSchema("|Rr", 1),
    RuleSchema("&Ll", 1),
    RuleSchema("&Lr", 1),
    RuleSchema("&R", 2),
]

_RULES: dict[CalculusId, list[RuleSchema]] = {
    C.L: _lambek_core(True),
    C.LSTAR: _lambek_core(False),
    C.MALC: _lambek_core(True) + _ADDITIVES,
    C.MALCSTAR: _lambek_core(False) + _ADDITIVES,
    C.AMALCSTAR: _lambek_core(False) + _ADDITIVES + [RuleSchema("W", 1)],
    C.ILL: [RuleSchema("Id", 0, ("p |- p for a variable p",))]
    + [r for r in _lambek_core(False)[1:] if r.id[0] in "\\*"]
    + _ADDITIVES,
    C.IAL: [RuleSchema("Id", 0, ("G, p |- p for a variable p",))]
    + [r for r in _lambek_core(False)[1:] if r.id[0] in "\\*"]
    + _ADDITIVES
    + [RuleSchema("W", 1, ("admissible",), searchable=False)],
    C.L1: _lambek_core(False) + [RuleSchema("1R", 0), RuleSchema("1L", 1)],
    C.LPLUSEPS: [
        _AX,
        RuleSchema("1ax", 0, ("A, 1 |- A",)),
        RuleSchema("\\L", 2),
        RuleSchema("\\R", 1),
        RuleSchema("&Ll", 1),
        RuleSchema("&Lr", 1),
        RuleSchema("&R", 2),
        RuleSchema("Leps", 1, (UNIT_MEET,), size_decreasing=False),
        RuleSchema("Reps", 1, (UNIT_MEET,), size_decreasing=False),
        RuleSchema("Deps", 1, (UNIT_MEET,), size_decreasing=False),
    ],
    C.MALC_D: _lambek_core(True)
    + _ADDITIVES
    + [
        RuleSchema("D", 0, ("(A|C)&(B|C) |- (A&B)|C",)),
        RuleSchema("Cut", 2, size_decreasing=False, searchable=False),
    ],
}

_BASE = {Var, Prod, LDiv, RDiv}
LANGUAGE: dict[CalculusId, frozenset[type]] = {
    C.L: frozenset(_BASE),
    C.LSTAR: frozenset(_BASE),
    C.MALC: frozenset(_BASE | {Meet, Join}),
    C.MALCSTAR: frozenset(_BASE | {Meet, Join}),
    C.AMALCSTAR: frozenset(_BASE | {Meet, Join}),
    C.ILL: frozenset(_BASE | {Meet, Join}),
    C.IAL: frozenset(_BASE | {Meet, Join}),
    C.L1: frozenset(_BASE | {Unit}),
    C.LPLUSEPS: frozenset({Var, LDiv, Meet, Unit}),
    C.MALC_D: frozenset(_BASE | {Meet, Join}),
}

RESTRICTED = frozenset({C.L, C.MALC, C.MALC_D})
COMMUTATIVE = frozenset({C.ILL, C.IAL})


def rule_set(calculus: CalculusId) -> list[RuleSchema]:
    return list(_RULES[calculus])


def rule_ids(calculus: CalculusId) -> set[str]:
    return {r.id for r in _RULES[calculus]}


def fully_size_decreasing(calculus: CalculusId) -> bool:
    return all(r.size_decreasing for r in _RULES[calculus] if r.searchable)


class LanguageError(ValueError):
    """A formula uses a connective the calculus does not have."""


def check_language(s: Sequent, calculus: CalculusId) -> None:
    allowed = LANGUAGE[calculus]
    for f in s.formulas():
        bad = f.connectives() - allowed
        if bad:
            names = ", ".join(sorted(t.__name__ for t in bad))
            raise LanguageError(f"{calculus.name} has no {names} (in {f})")


def _sort_key(f: Formula) -> str:
    return str(f)


def intake(s: Sequent, calculus: CalculusId) -> Sequent:
    """Canonical form of a goal for the calculus (identity unless commutative)."""
    if calculus in COMMUTATIVE:
        ant = sorted((normalize_commutative(f) for f in s.antecedent), key=_sort_key)
        return Sequent(tuple(ant), normalize_commutative(s.succedent))
    return s


# ------------------------------------------------------- backward expansion


class Expansion(NamedTuple):
    rule: str
    premises: tuple[Sequent, ...]
    instantiation: dict


def backward_expand(s: Sequent, calculus: CalculusId) -> list[Expansion]:
    """All rule instances with conclusion ``s`` (Cut excluded)."""
    if calculus in COMMUTATIVE:
        return _expand_multiset(intake(s, calculus), calculus)
    return _expand_list(s, calculus)


def _expand_list(s: Sequent, calc: CalculusId) -> list[Expansion]:
    ant, suc = s.antecedent, s.succedent
    n = len(ant)
    restricted = calc in RESTRICTED
    ids = rule_ids(calc)
    out: list[Expansion] = []

    def add(rule, prems, **inst):
        if restricted and any(not p.antecedent for p in prems):
            return
        out.append(Expansion(rule, tuple(prems), inst))

    if restricted and n == 0:
        return out

    if ant == (suc,):
        add("Id", ())
    if "1ax" in ids and n == 2 and ant[0] == suc and isinstance(ant[1], Unit):
        add("1ax", ())
    if "1R" in ids and n == 0 and isinstance(suc, Unit):
        add("1R", ())
    if "D" in ids and n == 1 and _match_distributivity(ant[0], suc):
        add("D", ())

    for i, f in enumerate(ant):
        gamma, delta = ant[:i], ant[i + 1:]
        if isinstance(f, LDiv) and "\\L" in ids:
            for k in range(i, -1, -1):
                add(
                    "\\L",
                    (Sequent(ant[k:i], f.left), Sequent(ant[:k] + (f.right,) + delta, suc)),
                    pos=i,
                    split=k,
                )
        elif isinstance(f, RDiv) and "/L" in ids:
            for k in range(i + 1, n + 1):
                add(
                    "/L",
                    (Sequent(ant[i + 1:k], f.right), Sequent(gamma + (f.left,) + ant[k:], suc)),
                    pos=i,
                    split=k,
                )
        elif isinstance(f, Prod) and "*L" in ids:
            add("*L", (Sequent(gamma + (f.left, f.right) + delta, suc),), pos=i)
        elif isinstance(f, Join) and "|L" in ids:
            add(
                "|L",
                (Sequent(gamma + (f.left,) + delta, suc), Sequent(gamma + (f.right,) + delta, suc)),
                pos=i,
            )
        elif isinstance(f, Meet) and "&Ll" in ids:
            add("&Ll", (Sequent(gamma + (f.left,) + delta, suc),), pos=i)
            add("&Lr", (Sequent(gamma + (f.right,) + delta, suc),), pos=i)
        elif isinstance(f, Unit) and "1L" in ids:
            add("1L", (Sequent(gamma + delta, suc),), pos=i)
        if "W" in ids:
            add("W", (Sequent(gamma + delta, suc),), pos=i)
        if "Leps" in ids and is_unit_meet(f):
            if i + 1 < n:
                add("Leps", (Sequent(gamma + (ant[i + 1], f) + ant[i + 2:], suc),), pos=i)
            if i > 0:
                add("Reps", (Sequent(ant[: i - 1] + (f, ant[i - 1]) + delta, suc),), pos=i)
            add("Deps", (Sequent(gamma + (f, f) + delta, suc),), pos=i)

    if isinstance(suc, LDiv) and "\\R" in ids:
        if not (restricted and n == 0):
            add("\\R", (Sequent((suc.left,) + ant, suc.right),))
    elif isinstance(suc, RDiv) and "/R" in ids:
        if not (restricted and n == 0):
            add("/R", (Sequent(ant + (suc.right,), suc.left),))
    elif isinstance(suc, Prod) and "*R" in ids:
        for k in range(n + 1):
            add("*R", (Sequent(ant[:k], suc.left), Sequent(ant[k:], suc.right)), split=k)
    elif isinstance(suc, Join) and "|Rl" in ids:
        add("|Rl", (Sequent(ant, suc.left),))
        add("|Rr", (Sequent(ant, suc.right),))
    elif isinstance(suc, Meet) and "&R" in ids:
        add("&R", (Sequent(ant, suc.left), Sequent(ant, suc.right)))
    return out


def _match_distributivity(left: Formula, right: Formula) -> bool:
    if not (isinstance(left, Meet) and isinstance(left.left, Join) and isinstance(left.right, Join)):
        return False
    a, c1 = left.left.left, left.left.right
    b, c2 = left.right.left, left.right.right
    return c1 == c2 and right == Join(Meet(a, b), c1)


def _msort(items: Iterable[Formula]) -> tuple[Formula, ...]:
    return tuple(sorted(items, key=_sort_key))


def _sub_multisets(items: tuple[Formula, ...]):
    """Yield (chosen, rest) pairs, one per distinct sub-multiset."""
    groups: list[tuple[Formula, int]] = []
    for f in items:
        if groups and groups[-1][0] == f:
            groups[-1] = (f, groups[-1][1] + 1)
        else:
            groups.append((f, 1))
    for counts in itertools.product(*(range(c + 1) for _, c in groups)):
        chosen, rest = [], []
        for (f, c), k in zip(groups, counts):
            chosen.extend([f] * k)
            rest.extend([f] * (c - k))
        yield tuple(chosen), tuple(rest)


def _expand_multiset(s: Sequent, calc: CalculusId) -> list[Expansion]:
    ant, suc = s.antecedent, s.succedent
    out: list[Expansion] = []

    def add(rule, prems, **inst):
        out.append(Expansion(rule, tuple(prems), inst))

    if isinstance(suc, Var):
        if calc is C.ILL and ant == (suc,):
            add("Id", ())
        elif calc is C.IAL and suc in ant:
            add("Id", ())

    seen: set[Formula] = set()
    for i, f in enumerate(ant):
        if f in seen:
            continue
        seen.add(f)
        rest = ant[:i] + ant[i + 1:]
        if isinstance(f, LDiv):
            for pi, gamma in _sub_multisets(rest):
                add(
                    "\\L",
                    (Sequent(pi, f.left), Sequent(_msort(gamma + (f.right,)), suc)),
                    principal=str(f),
                    pi=[str(g) for g in pi],
                )
        elif isinstance(f, Prod):
            add("*L", (Sequent(_msort(rest + (f.left, f.right)), suc),), principal=str(f))
        elif isinstance(f, Join):
            add(
                "|L",
                (Sequent(_msort(rest + (f.left,)), suc), Sequent(_msort(rest + (f.right,)), suc)),
                principal=str(f),
            )
        elif isinstance(f, Meet):
            add("&Ll", (Sequent(_msort(rest + (f.left,)), suc),), principal=str(f))
            add("&Lr", (Sequent(_msort(rest + (f.right,)), suc),), principal=str(f))

    if isinstance(suc, LDiv):
        add("\\R", (Sequent(_msort(ant + (suc.left,)), suc.right),))
    elif isinstance(suc, Prod):
        for gamma, delta in _sub_multisets(ant):
            add("*R", (Sequent(gamma, suc.left), Sequent(delta, suc.right)), left=[str(g) for g in gamma])
    elif isinstance(suc, Join):
        add("|Rl", (Sequent(ant, suc.left),))
        add("|Rr", (Sequent(ant, suc.right),))
    elif isinstance(suc, Meet):
        add("&R", (Sequent(ant, suc.left), Sequent(ant, suc.right)))
    return out


# ----------------------------------------------------------------- checking


class InvalidNode(Exception):
    def __init__(self, path: tuple[int, ...], reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"node {'/'.join(map(str, path)) or 'root'}: {reason}")


@dataclass(frozen=True)
class CheckReport:
    valid: bool
    nodes_checked: int
    error: InvalidNode | None = None

    def __bool__(self) -> bool:
        return self.valid

    def raise_for_invalid(self) -> None:
        if self.error is not None:
            raise self.error


def check_derivation(
    d: Derivation,
    calculus: CalculusId,
    hypotheses: Iterable[Sequent] = (),
) -> CheckReport:
    """Validate every node of ``d``; ``hypotheses`` may close leaves via rule ``Hyp``.

    Nodes are visited in pre-order, so the reported node is the first bad one
    in that order.  Its path lists premise indices from the root.
    """
    commutative = calculus in COMMUTATIVE
    hyps = {_canon(h, commutative) for h in hypotheses}
    schemas = {r.id: r for r in _RULES[calculus]}
    lang_ok: dict[Formula, bool] = {}
    count = 0
    stack: list[tuple[Derivation, tuple[int, ...]]] = [(d, ())]
    while stack:
        node, path = stack.pop()
        count += 1
        reason = _check_node(node, calculus, schemas, hyps, lang_ok)
        if reason is not None:
            return CheckReport(False, count, InvalidNode(path, reason))
        for i in range(len(node.premises) - 1, -1, -1):
            stack.append((node.premises[i], path + (i,)))
    return CheckReport(True, count)


def _canon(s: Sequent, commutative: bool) -> Sequent:
    if commutative:
        return Sequent(
            _msort(normalize_commutative(f) for f in s.antecedent), normalize_commutative(s.succedent)
        )
    return s


def _check_node(node, calc, schemas, hyps, lang_ok) -> str | None:
    allowed = LANGUAGE[calc]
    for s in (node.conclusion,) + tuple(p.conclusion for p in node.premises):
        for f in s.formulas():
            ok = lang_ok.get(f)
            if ok is None:
                ok = lang_ok[f] = f.connectives() <= allowed
            if not ok:
                return f"formula {f} outside the language of {calc.name}"
    if calc in RESTRICTED and not node.conclusion.antecedent:
        return "empty antecedent violates the non-emptiness restriction"
    commutative = calc in COMMUTATIVE
    concl = _canon(node.conclusion, commutative)
    prems = tuple(_canon(p.conclusion, commutative) for p in node.premises)
    if node.rule == "Hyp":
        if prems:
            return "hypothesis leaf has premises"
        return None if concl in hyps else "leaf is not an allowed hypothesis"
    schema = schemas.get(node.rule)
    if schema is None:
        return f"rule {node.rule} is not part of {calc.name}"
    if len(prems) != schema.arity:
        return f"rule {node.rule} expects {schema.arity} premises, got {len(prems)}"
    check = (_MULTISET_CHECKS if commutative else _LIST_CHECKS)[node.rule]
    if check(concl, prems, calc):
        return None
    return f"conclusion does not follow by {node.rule}"


def _swap(t: tuple, j: int) -> tuple:
    return t[:j] + (t[j + 1], t[j]) + t[j + 2:]


def _same_except_one(c: tuple, p: tuple, test) -> bool:
    if len(c) != len(p):
        return False
    diff = [j for j in range(len(c)) if c[j] != p[j]]
    return len(diff) == 1 and test(c[diff[0]], p[diff[0]])


# Each list check returns True iff the conclusion is a forward image of the premises.
def _c_id(c, ps, calc):
    return c.antecedent == (c.succedent,)


def _c_1ax(c, ps, calc):
    return c.antecedent == (c.succedent, UNIT)


def _c_1r(c, ps, calc):
    return c.antecedent == () and isinstance(c.succedent, Unit)


def _c_d(c, ps, calc):
    return len(c.antecedent) == 1 and _match_distributivity(c.antecedent[0], c.succedent)


def _c_ldiv_l(c, ps, calc):
    pi, main = ps
    if main.succedent != c.succedent:
        return False
    for j, b in enumerate(main.antecedent):
        cand = main.antecedent[:j] + pi.antecedent + (LDiv(pi.succedent, b),) + main.antecedent[j + 1:]
        if cand == c.antecedent:
            return True
    return False


def _c_rdiv_l(c, ps, calc):
    pi, main = ps
    if main.succedent != c.succedent:
        return False
    for j, b in enumerate(main.antecedent):
        cand = main.antecedent[:j] + (RDiv(b, pi.succedent),) + pi.antecedent + main.antecedent[j + 1:]
        if cand == c.antecedent:
            return True
    return False


def _c_ldiv_r(c, ps, calc):
    (p,) = ps
    if not p.antecedent:
        return False
    if calc in RESTRICTED and len(p.antecedent) < 2:
        return False
    return c.antecedent == p.antecedent[1:] and c.succedent == LDiv(p.antecedent[0], p.succedent)


def _c_rdiv_r(c, ps, calc):
    (p,) = ps
    if not p.antecedent:
        return False
    if calc in RESTRICTED and len(p.antecedent) < 2:
        return False
    return c.antecedent == p.antecedent[:-1] and c.succedent == RDiv(p.succedent, p.antecedent[-1])


def _c_prod_l(c, ps, calc):
    (p,) = ps
    a = p.antecedent
    if p.succedent != c.succedent:
        return False
    return any(a[:j] + (Prod(a[j], a[j + 1]),) + a[j + 2:] == c.antecedent for j in range(len(a) - 1))


def _c_prod_r(c, ps, calc):
    p1, p2 = ps
    return c.antecedent == p1.antecedent + p2.antecedent and c.succedent == Prod(p1.succedent, p2.succedent)


def _c_join_l(c, ps, calc):
    p1, p2 = ps
    if not (p1.succedent == p2.succedent == c.succedent):
        return False
    a1, a2 = p1.antecedent, p2.antecedent
    if len(a1) != len(a2) or len(a1) != len(c.antecedent):
        return False
    for j in range(len(a1)):
        if a1[:j] == a2[:j] and a1[j + 1:] == a2[j + 1:]:
            if a1[:j] + (Join(a1[j], a2[j]),) + a1[j + 1:] == c.antecedent:
                return True
    return False


def _c_join_rl(c, ps, calc):
    (p,) = ps
    return c.antecedent == p.antecedent and isinstance(c.succedent, Join) and c.succedent.left == p.succedent


def _c_join_rr(c, ps, calc):
    (p,) = ps
    return c.antecedent == p.antecedent and isinstance(c.succedent, Join) and c.succedent.right == p.succedent


def _c_meet_ll(c, ps, calc):
    (p,) = ps
    return p.succedent == c.succedent and _same_except_one(
        c.antecedent, p.antecedent, lambda cf, pf: isinstance(cf, Meet) and cf.left == pf
    )


def _c_meet_lr(c, ps, calc):
    (p,) = ps
    return p.succedent == c.succedent and _same_except_one(
        c.antecedent, p.antecedent, lambda cf, pf: isinstance(cf, Meet) and cf.right == pf
    )


def _c_meet_r(c, ps, calc):
    p1, p2 = ps
    return p1.antecedent == p2.antecedent == c.antecedent and c.succedent == Meet(p1.succedent, p2.succedent)


def _drop_one(c, p, test) -> bool:
    a = c.antecedent
    return any(test(a[j]) and a[:j] + a[j + 1:] == p.antecedent for j in range(len(a)))


def _c_weak(c, ps, calc):
    (p,) = ps
    return p.succedent == c.succedent and _drop_one(c, p, lambda f: True)


def _c_unit_l(c, ps, calc):
    (p,) = ps
    return p.succedent == c.succedent and _drop_one(c, p, lambda f: isinstance(f, Unit))


def _c_cut(c, ps, calc):
    pi, main = ps
    if main.succedent != c.succedent:
        return False
    a = main.antecedent
    return any(
        a[j] == pi.succedent and a[:j] + pi.antecedent + a[j + 1:] == c.antecedent for j in range(len(a))
    )


def _c_leps(c, ps, calc):
    # premise G, A, 1&F, D  /  conclusion G, 1&F, A, D
    (p,) = ps
    a = p.antecedent
    return p.succedent == c.succedent and any(
        is_unit_meet(a[j + 1]) and _swap(a, j) == c.antecedent for j in range(len(a) - 1)
    )


def _c_reps(c, ps, calc):
    # premise G, 1&F, A, D  /  conclusion G, A, 1&F, D
    (p,) = ps
    a = p.antecedent
    return p.succedent == c.succedent and any(
        is_unit_meet(a[j]) and _swap(a, j) == c.antecedent for j in range(len(a) - 1)
    )


def _c_deps(c, ps, calc):
    (p,) = ps
    a = p.antecedent
    return p.succedent == c.succedent and any(
        is_unit_meet(a[j]) and a[j] == a[j + 1] and a[:j] + a[j + 1:] == c.antecedent
        for j in range(len(a) - 1)
    )


_LIST_CHECKS = {
    "Id": _c_id,
    "1ax": _c_1ax,
    "1R": _c_1r,
    "D": _c_d,
    "\\L": _c_ldiv_l,
    "/L": _c_rdiv_l,
    "\\R": _c_ldiv_r,
    "/R": _c_rdiv_r,
    "*L": _c_prod_l,
    "*R": _c_prod_r,
    "|L": _c_join_l,
    "|Rl": _c_join_rl,
    "|Rr": _c_join_rr,
    "&Ll": _c_meet_ll,
    "&Lr": _c_meet_lr,
    "&R": _c_meet_r,
    "W": _c_weak,
    "1L": _c_unit_l,
    "Cut": _c_cut,
    "Leps": _c_leps,
    "Reps": _c_reps,
    "Deps": _c_deps,
}


# Multiset checks: antecedents compared as Counters.
def _m(seq) -> Counter:
    return Counter(seq)


def _m_id(c, ps, calc):
    if not isinstance(c.succedent, Var):
        return False
    if calc is C.ILL:
        return c.antecedent == (c.succedent,)
    return c.succedent in c.antecedent


def _m_ldiv_l(c, ps, calc):
    pi, main = ps
    if main.succedent != c.succedent:
        return False
    target = _m(c.antecedent)
    for b in set(main.antecedent):
        cand = _m(main.antecedent) - _m([b]) + _m(pi.antecedent) + _m([LDiv(pi.succedent, b)])
        if cand == target:
            return True
    return False


def _m_ldiv_r(c, ps, calc):
    (p,) = ps
    s = c.succedent
    return isinstance(s, LDiv) and p.succedent == s.right and _m(c.antecedent) + _m([s.left]) == _m(p.antecedent)


def _m_prod_l(c, ps, calc):
    (p,) = ps
    if p.succedent != c.succedent:
        return False
    target = _m(p.antecedent)
    for f in set(c.antecedent):
        if isinstance(f, Prod) and _m(c.antecedent) - _m([f]) + _m([f.left, f.right]) == target:
            return True
    return False


def _m_prod_r(c, ps, calc):
    p1, p2 = ps
    return (
        _m(c.antecedent) == _m(p1.antecedent) + _m(p2.antecedent)
        and c.succedent == Prod(p1.succedent, p2.succedent)
    )


def _m_join_l(c, ps, calc):
    p1, p2 = ps
    if not (p1.succedent == p2.succedent == c.succedent):
        return False
    for f in set(c.antecedent):
        if isinstance(f, Join):
            rest = _m(c.antecedent) - _m([f])
            if rest + _m([f.left]) == _m(p1.antecedent) and rest + _m([f.right]) == _m(p2.antecedent):
                return True
    return False


def _m_join_r(side):
    def check(c, ps, calc):
        (p,) = ps
        s = c.succedent
        return isinstance(s, Join) and getattr(s, side) == p.succedent and _m(c.antecedent) == _m(p.antecedent)

    return check


def _m_meet_l(side):
    def check(c, ps, calc):
        (p,) = ps
        if p.succedent != c.succedent:
            return False
        for f in set(c.antecedent):
            if isinstance(f, Meet):
                if _m(c.antecedent) - _m([f]) + _m([getattr(f, side)]) == _m(p.antecedent):
                    return True
        return False

    return check


def _m_meet_r(c, ps, calc):
    p1, p2 = ps
    return (
        _m(p1.antecedent) == _m(p2.antecedent) == _m(c.antecedent)
        and c.succedent == Meet(p1.succedent, p2.succedent)
    )


def _m_weak(c, ps, calc):
    (p,) = ps
    diff = _m(c.antecedent) - _m(p.antecedent)
    return (
        p.succedent == c.succedent
        and sum(diff.values()) == 1
        and len(c.antecedent) == len(p.antecedent) + 1
        and not (_m(p.antecedent) - _m(c.antecedent))
    )


_MULTISET_CHECKS = {
    "Id": _m_id,
    "\\L": _m_ldiv_l,
    "\\R": _m_ldiv_r,
    "*L": _m_prod_l,
    "*R": _m_prod_r,
    "|L": _m_join_l,
    "|Rl": _m_join_r("left"),
    "|Rr": _m_join_r("right"),
    "&Ll": _m_meet_l("left"),
    "&Lr": _m_meet_l("right"),
    "&R": _m_meet_r,
    "W": _m_weak,
}


def hypothesis_leaf(s: Sequent) -> Derivation:
    return Derivation(s, "Hyp")


def assemble(expansion: Expansion, conclusion: Sequent, premises: Sequence[Derivation]) -> Derivation:
    return Derivation(conclusion, expansion.rule, tuple(premises), expansion.instantiation or None)


# ------------------------------------------------------------ serialization


def derivation_to_dict(d: Derivation) -> dict:
    out = {"conclusion": render(d.conclusion), "rule": d.rule}
    if d.instantiation:
        out["instantiation"] = dict(d.instantiation)
    out["premises"] = [derivation_to_dict(p) for p in d.premises]
    return out


def derivation_from_dict(data: Mapping) -> Derivation:
    return Derivation(
        parse_sequent(data["conclusion"]),
        data["rule"],
        tuple(derivation_from_dict(p) for p in data.get("premises", ())),
        data.get("instantiation"),
    )


@contextlib.contextmanager
def _depth_allowance(levels: int):
    """Raise the recursion limit so nested structures ``levels`` deep fit."""
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * levels + 1000))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def dumps_derivation(d: Derivation, indent: int | None = 1) -> str:
    with _depth_allowance(d.height()):
        return json.dumps(derivation_to_dict(d), indent=indent, ensure_ascii=False)


def loads_derivation(text: str) -> Derivation:
    # nesting depth is bounded by the number of brackets
    with _depth_allowance(text.count("[")):
        return derivation_from_dict(json.loads(text))


def subformula_closed(d: Derivation, root: Sequent | None = None) -> bool:
    """True iff every formula in ``d`` is a subformula of the root sequent."""
    root = root or d.conclusion
    allowed: set[Formula] = set()
    for f in root.formulas():
        allowed.update(f.subformulas())
    return all(f in allowed for node in d.nodes() for f in node.conclusion.formulas())
