"""Seeded random formulas, sequents and forward-built derivations."""

from __future__ import annotations

import random
from typing import Sequence

from .calculi import LANGUAGE, RESTRICTED, check_derivation
from .core import (
    CalculusId,
    Derivation,
    Formula,
    Join,
    LDiv,
    Meet,
    Prod,
    RDiv,
    Sequent,
    UNIT,
    Unit,
    Var,
    normalize_commutative,
)

C = CalculusId
_BINARY = (Prod, LDiv, RDiv, Meet, Join)


def random_formula(
    rng: random.Random,
    depth: int,
    variables: Sequence[str] = ("p", "q", "r"),
    connectives: Sequence[type] = _BINARY,
    unit: bool = False,
) -> Formula:
    """A random formula of height at most ``depth``."""
    if depth <= 0 or rng.random() < 0.3:
        if unit and rng.random() < 0.15:
            return UNIT
        return Var(rng.choice(list(variables)))
    op = rng.choice(list(connectives))
    return op(
        random_formula(rng, depth - 1, variables, connectives, unit),
        random_formula(rng, depth - 1, variables, connectives, unit),
    )


def connectives_of(calculus: CalculusId, product: bool = True) -> list[type]:
    allowed = LANGUAGE[calculus]
    out = [t for t in _BINARY if t in allowed]
    if calculus in (C.ILL, C.IAL):
        out = [t for t in out if t is not RDiv]
    if not product:
        out = [t for t in out if t is not Prod]
    return out


def random_sequent(
    rng: random.Random,
    calculus: CalculusId,
    depth: int = 3,
    variables: Sequence[str] = ("p", "q", "r"),
    max_antecedent: int = 3,
    product: bool = True,
) -> Sequent:
    conns = connectives_of(calculus, product)
    unit = Unit in LANGUAGE[calculus]
    lo = 1 if calculus in RESTRICTED else 0
    n = rng.randint(lo, max_antecedent)
    ant = tuple(random_formula(rng, depth - 1, variables, conns, unit) for _ in range(n))
    return Sequent(ant, random_formula(rng, depth, variables, conns, unit))


# ---------------------------------------------------- forward generation


def random_derivation(
    rng: random.Random,
    calculus: CalculusId,
    steps: int = 6,
    variables: Sequence[str] = ("p", "q", "r"),
    max_size: int = 24,
    product: bool = True,
) -> Derivation:
    """Apply random rules forward from axioms; the result always checks.

    Only rules of ``calculus`` are used, so the conclusion is derivable there.
    """
    conns = connectives_of(calculus, product)
    commutative = calculus in (C.ILL, C.IAL)

    def small() -> Formula:
        return random_formula(rng, 1, variables, conns)

    def axiom() -> Derivation:
        v = Var(rng.choice(list(variables)))
        if calculus is C.IAL and rng.random() < 0.3:
            ant = [v, small()]
            rng.shuffle(ant)
            return Derivation(Sequent(tuple(ant), v), "Id")
        return Derivation(Sequent((v,), v), "Id")

    pool = [axiom() for _ in range(3)]
    best = pool[0]
    for _ in range(steps * 4):
        d = _forward_step(rng, calculus, pool, small, conns, commutative)
        if d is None or d.conclusion.size > max_size:
            continue
        pool.append(d)
        if rng.random() < 0.3:
            pool.append(axiom())
        if d.node_count() >= best.node_count():
            best = d
        if best.node_count() > steps:
            break
    return best


def _forward_step(rng, calculus, pool, small, conns, commutative) -> Derivation | None:
    d1 = rng.choice(pool)
    s1 = d1.conclusion
    ant, suc = s1.antecedent, s1.succedent
    restricted = calculus in RESTRICTED
    rules = []
    if LDiv in conns:
        rules += ["\\R", "\\L"]
    if RDiv in conns:
        rules += ["/R", "/L"]
    if Prod in conns:
        rules += ["*L", "*R"]
    if Meet in conns:
        rules += ["&L", "&R"]
    if Join in conns:
        rules += ["|R", "|L"]
    if calculus is C.AMALCSTAR:
        rules.append("W")
    rule = rng.choice(rules)

    def node(a, s, r, prems, **inst):
        a = tuple(a)
        if commutative:
            a = tuple(rng.sample(a, len(a)))
        return Derivation(Sequent(a, s), r, tuple(prems), inst or None)

    if rule == "\\R" and ant:
        if restricted and len(ant) < 2:
            return None
        if commutative:
            i = rng.randrange(len(ant))
            return node(ant[:i] + ant[i + 1:], LDiv(ant[i], suc), "\\R", [d1])
        return node(ant[1:], LDiv(ant[0], suc), "\\R", [d1])
    if rule == "/R" and ant:
        if restricted and len(ant) < 2:
            return None
        return node(ant[:-1], RDiv(suc, ant[-1]), "/R", [d1])
    if rule in ("\\L", "/L"):
        d2 = rng.choice(pool)
        pi = d1.conclusion
        main = d2.conclusion
        if restricted and not pi.antecedent:
            return None
        if not main.antecedent:
            return None
        j = rng.randrange(len(main.antecedent))
        b = main.antecedent[j]
        if rule == "\\L":
            new = main.antecedent[:j] + pi.antecedent + (LDiv(pi.succedent, b),) + main.antecedent[j + 1:]
        else:
            new = main.antecedent[:j] + (RDiv(b, pi.succedent),) + pi.antecedent + main.antecedent[j + 1:]
        return node(new, main.succedent, rule, [d1, d2])
    if rule == "*L" and len(ant) >= 2:
        j = rng.randrange(len(ant) - 1)
        return node(ant[:j] + (Prod(ant[j], ant[j + 1]),) + ant[j + 2:], suc, "*L", [d1])
    if rule == "*R":
        d2 = rng.choice(pool)
        s2 = d2.conclusion
        return node(ant + s2.antecedent, Prod(suc, s2.succedent), "*R", [d1, d2])
    if rule == "&L" and ant:
        j = rng.randrange(len(ant))
        other = small()
        if rng.random() < 0.5:
            return node(ant[:j] + (Meet(ant[j], other),) + ant[j + 1:], suc, "&Ll", [d1])
        return node(ant[:j] + (Meet(other, ant[j]),) + ant[j + 1:], suc, "&Lr", [d1])
    if rule == "&R":
        # pair with another derivation of the same antecedent, or with itself
        mates = [d for d in pool if _same_ant(d.conclusion, s1, commutative)]
        d2 = rng.choice(mates)
        return node(ant, Meet(suc, d2.conclusion.succedent), "&R", [d1, d2])
    if rule == "|R":
        other = small()
        if rng.random() < 0.5:
            return node(ant, Join(suc, other), "|Rl", [d1])
        return node(ant, Join(other, suc), "|Rr", [d1])
    if rule == "|L" and ant:
        mates = [
            (d, j)
            for d in pool
            for j in range(len(ant))
            if d.conclusion.succedent == suc
            and len(d.conclusion.antecedent) == len(ant)
            and d.conclusion.antecedent[:j] == ant[:j]
            and d.conclusion.antecedent[j + 1:] == ant[j + 1:]
        ]
        d2, j = rng.choice(mates)
        joined = Join(ant[j], d2.conclusion.antecedent[j])
        return Derivation(Sequent(ant[:j] + (joined,) + ant[j + 1:], suc), "|L", (d1, d2), {"pos": j})
    if rule == "W":
        j = rng.randint(0, len(ant))
        return node(ant[:j] + (small(),) + ant[j:], suc, "W", [d1])
    return None


def _same_ant(a: Sequent, b: Sequent, commutative: bool) -> bool:
    if commutative:
        return sorted(map(str, a.antecedent)) == sorted(map(str, b.antecedent))
    return a.antecedent == b.antecedent


def random_derivable(
    rng: random.Random,
    calculus: CalculusId,
    steps: int = 6,
    variables: Sequence[str] = ("p", "q", "r"),
    max_size: int = 24,
    product: bool = True,
) -> Derivation:
    """Like :func:`random_derivation`, but at least one rule above the axioms when possible."""
    for _ in range(20):
        d = random_derivation(rng, calculus, steps, variables, max_size, product)
        if d.premises:
            break
    if calculus in (C.ILL, C.IAL):
        d = Derivation(
            Sequent(tuple(normalize_commutative(f) for f in d.conclusion.antecedent), d.conclusion.succedent),
            d.rule,
            d.premises,
            d.instantiation,
        )
    report = check_derivation(d, calculus)
    if not report.valid:  # pragma: no cover - generator bug
        raise AssertionError(f"generated derivation fails: {report.error}")
    return d
