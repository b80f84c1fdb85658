"""Regular languages as minimal DFAs, and language models of formulas.

Every :class:`RegLang` is a complete, minimized DFA whose states are numbered
in breadth-first order from the start state (letters in sorted order).  Two
languages over the same alphabet are equal exactly when these canonical
tables coincide.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import (
    Formula,
    Join,
    LDiv,
    Meet,
    ParseError,
    Prod,
    RDiv,
    Sequent,
    Unit,
    Var,
)


class AlphabetError(ValueError):
    pass


class UnboundVariable(KeyError):
    pass


class UnitInEpsilonFree(ValueError):
    pass


class EmptyAntecedentInEpsilonFree(ValueError):
    pass


class Semantics(enum.Enum):
    EPSILON_FREE = "noeps"
    WITH_EPSILON = "eps"

    @classmethod
    def parse(cls, text: str) -> "Semantics":
        t = text.strip().lower()
        if t in ("eps", "with_epsilon", "withepsilon", "star"):
            return cls.WITH_EPSILON
        if t in ("noeps", "epsilon_free", "epsilonfree", "plus"):
            return cls.EPSILON_FREE
        raise ValueError(f"unknown semantics {text!r}")


EPS = Semantics.WITH_EPSILON
NOEPS = Semantics.EPSILON_FREE


class ModelClass(enum.Enum):
    PLAIN = "plain"
    MONOTONE = "monotone"
    COMMUTATIVE = "commutative"
    MONOTONE_COMMUTATIVE = "monotone-commutative"

    @classmethod
    def parse(cls, text: str) -> "ModelClass":
        t = text.strip().lower().replace("_", "-")
        for c in cls:
            if c.value == t:
                return c
        raise ValueError(f"unknown model class {text!r}")


# ---------------------------------------------------------------- automata


class _NFA:
    """Scratch NFA with epsilon moves; only used on the way to a RegLang."""

    def __init__(self, alphabet: tuple[str, ...]):
        self.alphabet = alphabet
        self.moves: list[dict[str, set[int]]] = []
        self.eps: list[set[int]] = []
        self.initial: set[int] = set()
        self.accepting: set[int] = set()

    def state(self) -> int:
        self.moves.append({})
        self.eps.append(set())
        return len(self.moves) - 1

    def edge(self, p: int, a: str | None, q: int) -> None:
        if a is None:
            self.eps[p].add(q)
        else:
            self.moves[p].setdefault(a, set()).add(q)

    def embed(self, lang: "RegLang") -> tuple[int, list[int]]:
        """Copy a DFA in; returns its start and its accepting states."""
        base = len(self.moves)
        for _ in range(lang.size):
            self.state()
        for q in range(lang.size):
            for i, a in enumerate(lang.alphabet):
                self.edge(base + q, a, base + lang.delta[q][i])
        return base, [base + q for q in lang.accepting]

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(seen)
        while stack:
            p = stack.pop()
            for q in self.eps[p]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return frozenset(seen)

    def determinize(self) -> "RegLang":
        start = self.closure(self.initial)
        index = {start: 0}
        order = [start]
        delta: list[list[int]] = []
        k = 0
        while k < len(order):
            cur = order[k]
            row = []
            for a in self.alphabet:
                nxt = self.closure(q for p in cur for q in self.moves[p].get(a, ()))
                if nxt not in index:
                    index[nxt] = len(order)
                    order.append(nxt)
                row.append(index[nxt])
            delta.append(row)
            k += 1
        acc = {i for i, s in enumerate(order) if s & self.accepting}
        return RegLang._build(self.alphabet, delta, 0, acc)


@dataclass(frozen=True, eq=False)
class RegLang:
    alphabet: tuple[str, ...]
    delta: tuple[tuple[int, ...], ...]
    accepting: frozenset[int]
    _key: tuple = field(repr=False, default=())

    # the start state is always 0

    @property
    def size(self) -> int:
        return len(self.delta)

    def __eq__(self, other) -> bool:
        return isinstance(other, RegLang) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    @staticmethod
    def _build(alphabet, delta, start, accepting) -> "RegLang":
        """Minimize (Moore refinement) and renumber canonically."""
        n = len(delta)
        k = len(alphabet)
        # reachable part
        reach = {start}
        stack = [start]
        while stack:
            p = stack.pop()
            for q in delta[p]:
                if q not in reach:
                    reach.add(q)
                    stack.append(q)
        states = sorted(reach)
        block = {q: int(q in accepting) for q in states}
        while True:
            sig = {q: (block[q],) + tuple(block[delta[q][i]] for i in range(k)) for q in states}
            ids: dict[tuple, int] = {}
            new = {q: ids.setdefault(sig[q], len(ids)) for q in states}
            if len(ids) == len(set(block.values())):
                block = new
                break
            block = new
        # canonical BFS numbering over blocks
        rep: dict[int, int] = {}
        for q in states:
            rep.setdefault(block[q], q)
        number = {block[start]: 0}
        order = [block[start]]
        j = 0
        while j < len(order):
            b = order[j]
            for i in range(k):
                nb = block[delta[rep[b]][i]]
                if nb not in number:
                    number[nb] = len(order)
                    order.append(nb)
            j += 1
        table = tuple(tuple(number[block[delta[rep[b]][i]]] for i in range(k)) for b in order)
        acc = frozenset(number[block[q]] for q in states if q in accepting)
        key = (tuple(alphabet), table, tuple(sorted(acc)))
        del n
        return RegLang(tuple(alphabet), table, acc, key)

    # -- queries
    def step(self, q: int, word: str) -> int:
        for ch in word:
            try:
                q = self.delta[q][self.alphabet.index(ch)]
            except ValueError:
                raise AlphabetError(f"letter {ch!r} not in alphabet") from None
        return q

    def __contains__(self, word: str) -> bool:
        return self.step(0, word) in self.accepting

    def contains_epsilon(self) -> bool:
        return 0 in self.accepting

    def is_empty(self) -> bool:
        return not self.accepting

    def rooted(self, q: int) -> "RegLang":
        """The language accepted from state ``q``."""
        return RegLang._build(self.alphabet, self.delta, q, self.accepting)

    def with_accepting(self, acc: Iterable[int]) -> "RegLang":
        return RegLang._build(self.alphabet, self.delta, 0, set(acc))

    def to_record(self) -> dict:
        return {
            "states": self.size,
            "initial": [0],
            "accepting": sorted(self.accepting),
            "transitions": [
                [q, a, self.delta[q][i]] for q in range(self.size) for i, a in enumerate(self.alphabet)
            ],
        }

    def __repr__(self) -> str:
        return f"RegLang(states={self.size}, accepting={sorted(self.accepting)}, alphabet={''.join(self.alphabet)})"


def _alphabet(letters: Iterable[str]) -> tuple[str, ...]:
    out = tuple(sorted(set(letters)))
    for a in out:
        if len(a) != 1 or a in "|*()%# \t,":
            raise AlphabetError(f"invalid letter {a!r}")
    if not out:
        raise AlphabetError("alphabet is empty")
    return out


def _same(a: RegLang, b: RegLang) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetError(f"alphabets differ: {a.alphabet} vs {b.alphabet}")


def empty_language(alphabet) -> RegLang:
    al = _alphabet(alphabet)
    return RegLang._build(al, [[0] * len(al)], 0, set())


def universal(alphabet) -> RegLang:
    al = _alphabet(alphabet)
    return RegLang._build(al, [[0] * len(al)], 0, {0})


def epsilon_language(alphabet) -> RegLang:
    al = _alphabet(alphabet)
    return RegLang._build(al, [[1] * len(al), [1] * len(al)], 0, {0})


def nonempty_words(alphabet) -> RegLang:
    """Sigma+."""
    al = _alphabet(alphabet)
    return RegLang._build(al, [[1] * len(al), [1] * len(al)], 0, {1})


def word_language(alphabet, words: Iterable[str]) -> RegLang:
    al = _alphabet(alphabet)
    nfa = _NFA(al)
    s = nfa.state()
    nfa.initial.add(s)
    for w in words:
        cur = s
        for ch in w:
            if ch not in al:
                raise AlphabetError(f"letter {ch!r} not in alphabet")
            nxt = nfa.state()
            nfa.edge(cur, ch, nxt)
            cur = nxt
        nfa.accepting.add(cur)
    return nfa.determinize()


# ------------------------------------------------------------------- regex


class _RegexParser:
    def __init__(self, text: str, alphabet: tuple[str, ...]):
        self.text = text
        self.pos = 0
        self.alphabet = alphabet

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def parse(self) -> RegLang:
        out = self.union()
        if self.peek() is not None:
            raise ParseError(f"unexpected {self.peek()!r}", self.pos, self.text)
        return out

    def union(self) -> RegLang:
        out = self.concat()
        while self.peek() == "|":
            self.pos += 1
            out = union(out, self.concat())
        return out

    def concat(self) -> RegLang:
        parts = []
        while self.peek() is not None and self.peek() not in "|)":
            parts.append(self.star())
        if not parts:
            raise ParseError("empty expression (use % for the empty word)", self.pos, self.text)
        out = parts[0]
        for p in parts[1:]:
            out = concat(out, p)
        return out

    def star(self) -> RegLang:
        out = self.atom()
        while self.peek() == "*":
            self.pos += 1
            out = kleene_star(out)
        return out

    def atom(self) -> RegLang:
        ch = self.peek()
        at = self.pos
        if ch == "(":
            self.pos += 1
            out = self.union()
            if self.peek() != ")":
                raise ParseError("missing ')'", self.pos, self.text)
            self.pos += 1
            return out
        self.pos += 1
        if ch == "%":
            return epsilon_language(self.alphabet)
        if ch == "#":
            return empty_language(self.alphabet)
        if ch is None or ch in "*)|":
            raise ParseError(f"unexpected {ch!r}", at, self.text)
        if ch not in self.alphabet:
            raise AlphabetError(f"letter {ch!r} not in alphabet {''.join(self.alphabet)}")
        return word_language(self.alphabet, [ch])


def compile_language(source: str | Mapping, alphabet: Iterable[str]) -> RegLang:
    """Language of a regex string or of an automaton record."""
    al = _alphabet(alphabet)
    if isinstance(source, str):
        return _RegexParser(source, al).parse()
    if "regex" in source:
        return compile_language(source["regex"], al)
    rec = source.get("automaton", source)
    nfa = _NFA(al)
    for _ in range(int(rec["states"])):
        nfa.state()
    for p, a, q in rec["transitions"]:
        if a not in al:
            raise AlphabetError(f"letter {a!r} not in alphabet")
        nfa.edge(int(p), a, int(q))
    nfa.initial.update(int(q) for q in rec["initial"])
    nfa.accepting.update(int(q) for q in rec["accepting"])
    return nfa.determinize()


# -------------------------------------------------------------- operations


def _product(a: RegLang, b: RegLang, accept) -> RegLang:
    _same(a, b)
    k = len(a.alphabet)
    index = {(0, 0): 0}
    order = [(0, 0)]
    delta = []
    j = 0
    while j < len(order):
        p, q = order[j]
        row = []
        for i in range(k):
            nxt = (a.delta[p][i], b.delta[q][i])
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        delta.append(row)
        j += 1
    acc = {i for i, (p, q) in enumerate(order) if accept(p in a.accepting, q in b.accepting)}
    return RegLang._build(a.alphabet, delta, 0, acc)


def intersect(a: RegLang, b: RegLang) -> RegLang:
    return _product(a, b, lambda x, y: x and y)


def union(a: RegLang, b: RegLang) -> RegLang:
    return _product(a, b, lambda x, y: x or y)


def difference(a: RegLang, b: RegLang) -> RegLang:
    return _product(a, b, lambda x, y: x and not y)


def complement(a: RegLang) -> RegLang:
    return RegLang._build(a.alphabet, a.delta, 0, set(range(a.size)) - a.accepting)


def concat(a: RegLang, b: RegLang) -> RegLang:
    _same(a, b)
    nfa = _NFA(a.alphabet)
    sa, fa = nfa.embed(a)
    sb, fb = nfa.embed(b)
    for f in fa:
        nfa.edge(f, None, sb)
    nfa.initial.add(sa)
    nfa.accepting.update(fb)
    return nfa.determinize()


def kleene_star(a: RegLang) -> RegLang:
    nfa = _NFA(a.alphabet)
    s = nfa.state()
    sa, fa = nfa.embed(a)
    nfa.edge(s, None, sa)
    for f in fa:
        nfa.edge(f, None, s)
    nfa.initial.add(s)
    nfa.accepting.add(s)
    return nfa.determinize()


def reverse(a: RegLang) -> RegLang:
    nfa = _NFA(a.alphabet)
    for _ in range(a.size):
        nfa.state()
    for q in range(a.size):
        for i, ch in enumerate(a.alphabet):
            nfa.edge(a.delta[q][i], ch, q)
    nfa.initial.update(a.accepting)
    nfa.accepting.add(0)
    return nfa.determinize()


class Op(enum.Enum):
    CONCAT = "concat"
    UNION = "union"
    INTERSECT = "intersect"
    COMPLEMENT = "complement"


def combine(op: Op | str, a: RegLang, b: RegLang | None = None) -> RegLang:
    op = Op(op) if isinstance(op, str) else op
    if op is Op.COMPLEMENT:
        if b is not None:
            raise ValueError("complement is unary")
        return complement(a)
    if b is None:
        raise ValueError(f"{op.value} needs two operands")
    return {Op.CONCAT: concat, Op.UNION: union, Op.INTERSECT: intersect}[op](a, b)


def includes(a: RegLang, b: RegLang) -> bool:
    """True iff the language ``a`` is a subset of ``b``."""
    _same(a, b)
    k = len(a.alphabet)
    seen = {(0, 0)}
    stack = [(0, 0)]
    while stack:
        p, q = stack.pop()
        if p in a.accepting and q not in b.accepting:
            return False
        for i in range(k):
            nxt = (a.delta[p][i], b.delta[q][i])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def _reached_by(a: RegLang, b: RegLang) -> set[int]:
    """States of ``b`` reached from its start by some word of ``a``."""
    k = len(a.alphabet)
    seen = {(0, 0)}
    stack = [(0, 0)]
    out = set()
    while stack:
        p, q = stack.pop()
        if p in a.accepting:
            out.add(q)
        for i in range(k):
            nxt = (a.delta[p][i], b.delta[q][i])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return out


def _restrict(result: RegLang, semantics: Semantics) -> RegLang:
    if semantics is NOEPS:
        return intersect(result, nonempty_words(result.alphabet))
    return result


def left_divide(a: RegLang, b: RegLang, semantics: Semantics = EPS) -> RegLang:
    """A\\B = {u : vu in B for every v in A} (minus the empty word if epsilon-free)."""
    _same(a, b)
    start = frozenset(_reached_by(a, b))
    k = len(b.alphabet)
    index = {start: 0}
    order = [start]
    delta = []
    j = 0
    while j < len(order):
        cur = order[j]
        row = []
        for i in range(k):
            nxt = frozenset(b.delta[q][i] for q in cur)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        delta.append(row)
        j += 1
    acc = {i for i, s in enumerate(order) if s <= b.accepting}
    return _restrict(RegLang._build(b.alphabet, delta, 0, acc), semantics)


def right_divide(b: RegLang, a: RegLang, semantics: Semantics = EPS) -> RegLang:
    """B/A = {u : uv in B for every v in A} (minus the empty word if epsilon-free)."""
    _same(a, b)
    good = [q for q in range(b.size) if _includes_from(a, b, q)]
    return _restrict(b.with_accepting(good), semantics)


def _includes_from(a: RegLang, b: RegLang, q0: int) -> bool:
    k = len(a.alphabet)
    seen = {(0, q0)}
    stack = [(0, q0)]
    while stack:
        p, q = stack.pop()
        if p in a.accepting and q not in b.accepting:
            return False
        for i in range(k):
            nxt = (a.delta[p][i], b.delta[q][i])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


# ---------------------------------------------------------- language classes


def monotone_closure(a: RegLang) -> RegLang:
    """Least language containing ``a`` and closed under inserting words anywhere."""
    nfa = _NFA(a.alphabet)
    s, fa = nfa.embed(a)
    for q in range(s, s + a.size):
        for ch in a.alphabet:
            nfa.edge(q, ch, q)
    nfa.initial.add(s)
    nfa.accepting.update(fa)
    return nfa.determinize()


def insertion_closure(a: RegLang) -> RegLang:
    """{u1 w u2 : u1 u2 in a}: one guessed detour in which any word is read."""
    nfa = _NFA(a.alphabet)
    pre, fa = nfa.embed(a)
    post, fb = nfa.embed(a)
    for q in range(a.size):
        hold = nfa.state()
        nfa.edge(pre + q, None, hold)
        for ch in a.alphabet:
            nfa.edge(hold, ch, hold)
        nfa.edge(hold, None, post + q)
    nfa.initial.add(pre)
    nfa.accepting.update(fa + fb)
    return nfa.determinize()


def swap_closure(a: RegLang) -> RegLang:
    """{u x y v : u y x v in a}: the automaton buffers the first letter of the pair."""
    nfa = _NFA(a.alphabet)
    pre, fa = nfa.embed(a)
    post, fb = nfa.embed(a)
    for q in range(a.size):
        for i, x in enumerate(a.alphabet):
            buf = nfa.state()
            nfa.edge(pre + q, x, buf)
            for j, y in enumerate(a.alphabet):
                nfa.edge(buf, y, post + a.delta[a.delta[q][j]][i])
    nfa.initial.add(pre)
    nfa.accepting.update(fa + fb)
    return nfa.determinize()


def class_check(a: RegLang, which: str | ModelClass) -> bool:
    which = ModelClass.parse(which) if isinstance(which, str) else which
    if which is ModelClass.MONOTONE:
        return includes(insertion_closure(a), a)
    if which is ModelClass.COMMUTATIVE:
        return includes(swap_closure(a), a)
    if which is ModelClass.MONOTONE_COMMUTATIVE:
        return class_check(a, ModelClass.MONOTONE) and class_check(a, ModelClass.COMMUTATIVE)
    return True


# ------------------------------------------------------------- enumeration


def bounded_words(a: RegLang, n: int) -> list[str]:
    """Members of ``a`` of length at most ``n``, in lexicographic order."""
    if n < 0:
        raise ValueError("length bound must be non-negative")
    out = []
    frontier = [("", 0)]
    for length in range(n + 1):
        nxt = []
        for w, q in frontier:
            if q in a.accepting:
                out.append(w)
            if length < n:
                for i, ch in enumerate(a.alphabet):
                    nxt.append((w + ch, a.delta[q][i]))
        frontier = nxt
    return sorted(out)


def _permutations(word: str) -> set[str]:
    """Distinct rearrangements of ``word``."""
    counts: dict[str, int] = {}
    for ch in word:
        counts[ch] = counts.get(ch, 0) + 1
    letters = sorted(counts)
    out: set[str] = set()

    def grow(prefix: list[str], left: int) -> None:
        if not left:
            out.add("".join(prefix))
            return
        for ch in letters:
            if counts[ch]:
                counts[ch] -= 1
                prefix.append(ch)
                grow(prefix, left - 1)
                prefix.pop()
                counts[ch] += 1

    grow([], len(word))
    return out


def mub_bounded(langs: Sequence[RegLang], n: int) -> set[str]:
    """Permutations of words of the concatenation of ``langs``, lengths at most ``n``.

    Only letter counts matter, so each language contributes its sorted words.
    """
    keys = {""}
    for lang in langs:
        parts = {"".join(sorted(w)) for w in bounded_words(lang, n)}
        keys = {"".join(sorted(u + v)) for u in keys for v in parts if len(u) + len(v) <= n}
    out: set[str] = set()
    for k in keys:
        out |= _permutations(k)
    return out


def mub_product_bounded(a: RegLang, b: RegLang, n: int) -> set[str]:
    return mub_bounded([a, b], n)


# ------------------------------------------------------------------ models


@dataclass(frozen=True)
class ModelAssignment:
    alphabet: tuple[str, ...]
    semantics: Semantics
    valuation: Mapping[str, RegLang]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _alphabet(self.alphabet))
        for name, lang in self.valuation.items():
            if lang.alphabet != self.alphabet:
                raise AlphabetError(f"value of {name} uses another alphabet")
            if self.semantics is NOEPS and lang.contains_epsilon():
                raise ValueError(f"epsilon-free model gives {name} the empty word")


def eval_formula(model: ModelAssignment, f: Formula, _cache: dict | None = None) -> RegLang:
    cache = {} if _cache is None else _cache
    hit = cache.get(f)
    if hit is not None:
        return hit
    sem = model.semantics
    if isinstance(f, Var):
        try:
            out = model.valuation[f.name]
        except KeyError:
            raise UnboundVariable(f.name) from None
    elif isinstance(f, Unit):
        if sem is NOEPS:
            raise UnitInEpsilonFree("1 has no value in an epsilon-free model")
        out = epsilon_language(model.alphabet)
    else:
        left = eval_formula(model, f.left, cache)
        right = eval_formula(model, f.right, cache)
        if isinstance(f, Prod):
            out = concat(left, right)
        elif isinstance(f, LDiv):
            out = left_divide(left, right, sem)
        elif isinstance(f, RDiv):
            out = right_divide(left, right, sem)
        elif isinstance(f, Meet):
            out = intersect(left, right)
        elif isinstance(f, Join):
            out = union(left, right)
        else:  # pragma: no cover
            raise TypeError(f)
    cache[f] = out
    return out


def sequent_truth(model: ModelAssignment, s: Sequent, cache: dict | None = None) -> bool:
    """w(A1)...w(An) is a subset of w(B); an empty antecedent asks for the empty word.

    ``cache`` may be shared between calls on the same model.
    """
    cache = {} if cache is None else cache
    succ = eval_formula(model, s.succedent, cache)
    if not s.antecedent:
        if model.semantics is NOEPS:
            raise EmptyAntecedentInEpsilonFree("empty antecedent in an epsilon-free model")
        return succ.contains_epsilon()
    prod = eval_formula(model, s.antecedent[0], cache)
    for f in s.antecedent[1:]:
        prod = concat(prod, eval_formula(model, f, cache))
    return includes(prod, succ)


def commutative_refutation(
    model: ModelAssignment, s: Sequent, n: int = 8, cache: dict | None = None
) -> str | None:
    """A word of bounded length in the commutative product of the antecedent but not in the succedent.

    Only product-free antecedent formulas are evaluated (their values stay
    regular); a found word refutes the sequent, None proves nothing.
    """
    cache = {} if cache is None else cache
    succ = eval_formula(model, s.succedent, cache)
    langs = [eval_formula(model, f, cache) for f in s.antecedent]
    if not langs:
        return None if succ.contains_epsilon() else ""
    for w in sorted(mub_bounded(langs, n)):
        if w not in succ:
            return w
    return None


# -------------------------------------------------------- random languages


def random_dfa(rng: random.Random, alphabet, max_states: int = 4) -> RegLang:
    al = _alphabet(alphabet)
    n = rng.randint(1, max_states)
    delta = [[rng.randrange(n) for _ in al] for _ in range(n)]
    acc = {q for q in range(n) if rng.random() < 0.5}
    return RegLang._build(al, delta, 0, acc)


def _count_atom(al, letter: str, kind: str, k: int, r: int = 0) -> RegLang:
    """Words whose number of ``letter`` is >= k (kind "ge") or == r mod k (kind "mod")."""
    i = al.index(letter)
    if kind == "ge":
        delta = [[min(q + 1, k) if j == i else q for j in range(len(al))] for q in range(k + 1)]
        return RegLang._build(al, delta, 0, {k})
    delta = [[(q + 1) % k if j == i else q for j in range(len(al))] for q in range(k)]
    return RegLang._build(al, delta, 0, {r % k})


def random_commutative(rng: random.Random, alphabet, upward_only: bool = False, depth: int = 2) -> RegLang:
    """A random Boolean combination of per-letter counting constraints."""
    al = _alphabet(alphabet)
    if depth == 0 or rng.random() < 0.35:
        letter = rng.choice(al)
        if upward_only or rng.random() < 0.5:
            return _count_atom(al, letter, "ge", rng.randint(0, 2))
        m = rng.randint(2, 3)
        return _count_atom(al, letter, "mod", m, rng.randrange(m))
    a = random_commutative(rng, al, upward_only, depth - 1)
    b = random_commutative(rng, al, upward_only, depth - 1)
    choice = rng.randrange(2 if upward_only else 3)
    if choice == 0:
        return intersect(a, b)
    if choice == 1:
        return union(a, b)
    return complement(a)


def random_language(rng: random.Random, alphabet, cls: ModelClass, max_states: int = 4) -> RegLang:
    if cls is ModelClass.PLAIN:
        return random_dfa(rng, alphabet, max_states)
    if cls is ModelClass.MONOTONE:
        return monotone_closure(random_dfa(rng, alphabet, max_states))
    if cls is ModelClass.COMMUTATIVE:
        return random_commutative(rng, alphabet)
    return random_commutative(rng, alphabet, upward_only=True)


def random_model(
    alphabet,
    variables: Iterable[str],
    seed: int,
    cls: ModelClass | str = ModelClass.PLAIN,
    semantics: Semantics | str = EPS,
    max_states: int = 4,
) -> ModelAssignment:
    """A seeded model of the requested class (epsilon removed when epsilon-free)."""
    cls = ModelClass.parse(cls) if isinstance(cls, str) else cls
    semantics = Semantics.parse(semantics) if isinstance(semantics, str) else semantics
    al = _alphabet(alphabet)
    rng = random.Random(seed)
    val = {}
    for v in sorted(set(variables)):
        lang = random_language(rng, al, cls, max_states)
        if semantics is NOEPS:
            lang = intersect(lang, nonempty_words(al))
        val[v] = lang
    return ModelAssignment(al, semantics, val)


# ------------------------------------------------------------------- files


def model_from_dict(data: Mapping) -> ModelAssignment:
    al = _alphabet(data["alphabet"])
    sem = Semantics.parse(data.get("semantics", "eps"))
    val = {name: compile_language(source, al) for name, source in data["vars"].items()}
    return ModelAssignment(al, sem, val)


def model_to_dict(model: ModelAssignment) -> dict:
    return {
        "alphabet": list(model.alphabet),
        "semantics": model.semantics.value,
        "vars": {k: {"automaton": v.to_record()} for k, v in sorted(model.valuation.items())},
    }


def load_model(path: str) -> ModelAssignment:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
