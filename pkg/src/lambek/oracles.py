"""Brute-force reference computations used to cross-check the automata code.

These only read transition tables and membership; none of them reuse the
constructions of :mod:`lambek.langmodel` that they are meant to test.
"""

from __future__ import annotations

import itertools
from collections import deque

from .langmodel import EPS, RegLang, Semantics


def words_upto(alphabet, n: int):
    """All words of length at most ``n``, shortest first."""
    for k in range(n + 1):
        for t in itertools.product(alphabet, repeat=k):
            yield "".join(t)


def _action(lang: RegLang, word: str) -> tuple[int, ...]:
    return tuple(lang.step(q, word) for q in range(lang.size))


def word_classes(a: RegLang, b: RegLang, bound: int) -> list[str]:
    """Shortest representatives of the words of ``a`` of length at most ``bound``.

    Two words are identified when they end in the same state of ``a`` and act
    identically on every state of ``b``; membership of ``vu`` or ``uv`` in
    ``b`` only depends on that action, so one representative per class is
    enough.
    """
    start = (0, tuple(range(b.size)))
    seen = {start: ""}
    queue = deque([start])
    while queue:
        key = queue.popleft()
        w = seen[key]
        if len(w) == bound:
            continue
        for ch in a.alphabet:
            v = w + ch
            nk = (a.step(0, v), _action(b, v))
            if nk not in seen:
                seen[nk] = v
                queue.append(nk)
    return sorted((w for (qa, _), w in seen.items() if qa in a.accepting), key=lambda w: (len(w), w))


def division_bound(a: RegLang, b: RegLang) -> int:
    return a.size * b.size


def oracle_left_member(a: RegLang, b: RegLang, u: str, reps, semantics: Semantics = EPS) -> bool:
    if semantics is not EPS and not u:
        return False
    return all(v + u in b for v in reps)


def oracle_right_member(b: RegLang, a: RegLang, u: str, reps, semantics: Semantics = EPS) -> bool:
    if semantics is not EPS and not u:
        return False
    return all(u + v in b for v in reps)


def division_mismatches(
    a: RegLang,
    b: RegLang,
    left: RegLang,
    right: RegLang,
    semantics: Semantics = EPS,
    length: int = 6,
) -> list[tuple[str, str]]:
    """Words up to ``length`` where the computed A\\B or B/A disagrees with the oracle."""
    bound = division_bound(a, b)
    reps = word_classes(a, b, bound)
    out = []
    for u in words_upto(a.alphabet, length):
        if (u in left) != oracle_left_member(a, b, u, reps, semantics):
            out.append(("left", u))
        if (u in right) != oracle_right_member(b, a, u, reps, semantics):
            out.append(("right", u))
    return out


def naive_division_members(a: RegLang, b: RegLang, length: int, side: str) -> set[str]:
    """A\\B (side "left") or B/A (side "right") up to ``length``, testing every v of A up to the bound."""
    bound = division_bound(a, b)
    vs = [v for v in words_upto(a.alphabet, bound) if v in a]
    out = set()
    for u in words_upto(a.alphabet, length):
        if side == "left" and all(v + u in b for v in vs):
            out.add(u)
        if side == "right" and all(u + v in b for v in vs):
            out.add(u)
    return out


def reachable_states(lang: RegLang) -> list[int]:
    seen = {0}
    stack = [0]
    while stack:
        p = stack.pop()
        for q in lang.delta[p]:
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return sorted(seen)


def _subset_from(lang: RegLang, p: int, q: int) -> bool:
    """L_p is contained in L_q, both read in ``lang``."""
    seen = {(p, q)}
    stack = [(p, q)]
    while stack:
        x, y = stack.pop()
        if x in lang.accepting and y not in lang.accepting:
            return False
        for i in range(len(lang.alphabet)):
            nxt = (lang.delta[x][i], lang.delta[y][i])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def monotone_by_states(lang: RegLang) -> bool:
    """Inserting a letter never leaves the language: L_q is inside L_{q.a} for every reachable q."""
    return all(
        _subset_from(lang, q, lang.delta[q][i])
        for q in reachable_states(lang)
        for i in range(len(lang.alphabet))
    )


def commutative_by_states(lang: RegLang) -> bool:
    """Adjacent letters commute: q.ab and q.ba agree for every reachable q of the minimal DFA."""
    for q in reachable_states(lang):
        for x, y in itertools.combinations(lang.alphabet, 2):
            if lang.step(q, x + y) != lang.step(q, y + x):
                return False
    return True
