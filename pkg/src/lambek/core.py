"""Formulas, sequents and derivation trees, with a parser and printer.

Formulas are immutable trees.  Every node caches its hash, size and printed
form, so they are cheap to use as dictionary keys during proof search.

Grammar (ASCII, with unicode aliases)::

    formula := join
    join    := meet ("|" meet)*
    meet    := div ("&" div)*
    div     := prod [("\\" | "/") prod]
    prod    := atom ("*" atom)*
    atom    := var | "1" | "(" formula ")"

``\\`` and ``/`` do not chain: ``p\\q\\r`` is rejected as ambiguous.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence, Union


class ParseError(ValueError):
    """Malformed formula or sequent text."""

    def __init__(self, message: str, position: int = -1, text: str = ""):
        self.position = position
        self.text = text
        if position >= 0:
            message = f"{message} at position {position}"
        super().__init__(message)


class AmbiguityError(ParseError):
    """Unparenthesized chain of divisions."""


class Formula:
    """Base class of the formula tree.  Use the concrete subclasses."""

    __slots__ = ("_hash", "_size", "_text")

    def _freeze(self, key) -> None:
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + key))
        object.__setattr__(self, "_text", None)

    def __setattr__(self, name, value):
        raise AttributeError("formulas are immutable")

    def __hash__(self) -> int:
        return self._hash

    @property
    def size(self) -> int:
        """Number of symbol occurrences (variables, constants, connectives)."""
        return self._size

    def children(self) -> tuple["Formula", ...]:
        return ()

    def subformulas(self) -> Iterator["Formula"]:
        stack = [self]
        while stack:
            f = stack.pop()
            yield f
            stack.extend(f.children())

    def variables(self) -> set[str]:
        return {f.name for f in self.subformulas() if isinstance(f, Var)}

    def connectives(self) -> set[type]:
        return {type(f) for f in self.subformulas()}

    def __str__(self) -> str:
        if self._text is None:
            object.__setattr__(self, "_text", _render_formula(self))
        return self._text

    def __lt__(self, other: "Formula") -> bool:
        return str(self) < str(other)


_VAR_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


class Var(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if not isinstance(name, str) or not _VAR_RE.match(name):
            raise ValueError(f"bad variable name {name!r}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_size", 1)
        self._freeze((name,))

    def __eq__(self, other) -> bool:
        return self is other or (isinstance(other, Var) and other.name == self.name)

    __hash__ = Formula.__hash__

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


class Unit(Formula):
    __slots__ = ()

    def __init__(self):
        object.__setattr__(self, "_size", 1)
        self._freeze(())

    def __eq__(self, other) -> bool:
        return isinstance(other, Unit)

    __hash__ = Formula.__hash__

    def __repr__(self) -> str:
        return "Unit()"


class Binary(Formula):
    __slots__ = ("left", "right")
    symbol = "?"

    def __init__(self, left: Formula, right: Formula):
        if not isinstance(left, Formula) or not isinstance(right, Formula):
            raise TypeError("operands must be formulas")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "_size", left._size + right._size + 1)
        self._freeze((left._hash, right._hash))

    def children(self) -> tuple[Formula, Formula]:
        return (self.left, self.right)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            type(other) is type(self)
            and other._hash == self._hash
            and other.left == self.left
            and other.right == self.right
        )

    __hash__ = Formula.__hash__

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class Prod(Binary):
    __slots__ = ()
    symbol = "*"


class LDiv(Binary):
    """``left \\ right``: the left operand is the one consumed from the left."""

    __slots__ = ()
    symbol = "\\"


class RDiv(Binary):
    """``left / right``: the numerator is ``left``."""

    __slots__ = ()
    symbol = "/"


class Meet(Binary):
    __slots__ = ()
    symbol = "&"


class Join(Binary):
    __slots__ = ()
    symbol = "|"


UNIT = Unit()


def is_unit_meet(f: Formula) -> bool:
    """True for formulas of shape ``1 & G``."""
    return isinstance(f, Meet) and isinstance(f.left, Unit)


def normalize_commutative(f: Formula) -> Formula:
    """Rewrite every ``B/A`` as ``A\\B`` (one implication in commutative logics)."""
    if isinstance(f, RDiv):
        return LDiv(normalize_commutative(f.right), normalize_commutative(f.left))
    if isinstance(f, Binary):
        left, right = normalize_commutative(f.left), normalize_commutative(f.right)
        if left is f.left and right is f.right:
            return f
        return type(f)(left, right)
    return f


@dataclass(frozen=True)
class Sequent:
    antecedent: tuple[Formula, ...]
    succedent: Formula

    def __post_init__(self):
        if not isinstance(self.antecedent, tuple):
            object.__setattr__(self, "antecedent", tuple(self.antecedent))

    @property
    def size(self) -> int:
        return self.succedent.size + sum(f.size for f in self.antecedent)

    def formulas(self) -> tuple[Formula, ...]:
        return self.antecedent + (self.succedent,)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for f in self.formulas():
            out |= f.variables()
        return out

    def __str__(self) -> str:
        return render(self)


class CalculusId(enum.Enum):
    L = "l"
    LSTAR = "lstar"
    MALC = "malc"
    MALCSTAR = "malcstar"
    AMALCSTAR = "amalcstar"
    ILL = "ill"
    IAL = "ial"
    L1 = "l1"
    LPLUSEPS = "lpluseps"
    MALC_D = "malc_d"

    @classmethod
    def parse(cls, text: str) -> "CalculusId":
        key = text.strip().lower().replace("-", "_").replace("*", "star").replace("+", "_")
        aliases = {"malcd": "malc_d", "malc_d": "malc_d", "l_eps": "lpluseps", "l_plus_eps": "lpluseps"}
        key = aliases.get(key, key)
        for member in cls:
            if member.value == key or member.name.lower() == key:
                return member
        raise ValueError(f"unknown calculus {text!r}")


@dataclass(frozen=True, eq=False)
class Derivation:
    """A proof tree node.  ``instantiation`` records positions and split points."""

    conclusion: Sequent
    rule: str
    premises: tuple["Derivation", ...] = ()
    instantiation: Mapping[str, object] | None = None

    def __post_init__(self):
        if not isinstance(self.premises, tuple):
            object.__setattr__(self, "premises", tuple(self.premises))

    def nodes(self) -> Iterator["Derivation"]:
        stack = [self]
        while stack:
            d = stack.pop()
            yield d
            stack.extend(reversed(d.premises))

    def node_count(self) -> int:
        return sum(1 for _ in self.nodes())

    def height(self) -> int:
        best = 0
        stack = [(self, 1)]
        while stack:
            d, h = stack.pop()
            best = max(best, h)
            stack.extend((p, h + 1) for p in d.premises)
        return best

    def leaves(self) -> list["Derivation"]:
        return [d for d in self.nodes() if not d.premises]

    def __str__(self) -> str:
        return render(self)


# ---------------------------------------------------------------- printing


_PREC = {Join: 1, Meet: 2, Prod: 4}


def _render_formula(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Unit):
        return "1"
    if isinstance(f, (LDiv, RDiv)):
        # operands sit at product level
        def operand(child: Formula) -> str:
            text = _render_formula(child)
            return f"({text})" if isinstance(child, (Join, Meet)) else text

        return f"({operand(f.left)}{f.symbol}{operand(f.right)})"
    # left-associative chains; a right child of the same kind needs parentheses
    prec = _PREC[type(f)]

    def wrap(child: Formula, is_right: bool) -> str:
        text = _render_formula(child)
        cp = _PREC.get(type(child))
        if cp is not None and (cp < prec or (is_right and cp == prec)):
            return f"({text})"
        return text

    return f"{wrap(f.left, False)}{f.symbol}{wrap(f.right, True)}"


def _render_derivation(d: Derivation) -> str:
    lines: list[str] = []
    stack = [(d, 0)]
    while stack:
        node, depth = stack.pop()
        inst = ""
        if node.instantiation:
            inst = " {" + ", ".join(f"{k}={v}" for k, v in sorted(node.instantiation.items())) + "}"
        lines.append(f"{'  ' * depth}{render(node.conclusion)}   [{node.rule}]{inst}")
        stack.extend((p, depth + 1) for p in reversed(node.premises))
    return "\n".join(lines)


def render(item: Union[Formula, Sequent, Derivation]) -> str:
    """Deterministic text form; divisions are always fully parenthesized."""
    if isinstance(item, Formula):
        return str(item)
    if isinstance(item, Sequent):
        ant = ", ".join(str(f) for f in item.antecedent)
        return f"{ant} |- {item.succedent}" if ant else f"|- {item.succedent}"
    if isinstance(item, Derivation):
        return _render_derivation(item)
    raise TypeError(f"cannot render {type(item).__name__}")


# ----------------------------------------------------------------- parsing


_ALIASES = {
    "∧": "&",
    "∨": "|",
    "⊸": "\\",
    "·": "*",
    "⊗": "*",
    "𝟏": "1",
}

_TOKEN_RE = re.compile(r"\s*(?:(?P<var>[a-z][A-Za-z0-9_]*)|(?P<op>\\\\|[\\/*&|()1]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    for src, dst in _ALIASES.items():
        text = text.replace(src, dst)
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        if m.group("var"):
            tokens.append(("var", m.group("var"), m.start("var")))
        else:
            op = m.group("op")
            tokens.append(("op", "\\" if op == "\\\\" else op, m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, offset: int = 0, full_text: str | None = None):
        self.text = full_text if full_text is not None else text
        self.tokens = [(k, v, p + offset) for k, v, p in _tokenize(text)]
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, cls=ParseError):
        return cls(message, self.peek()[2], self.text)

    def formula(self) -> Formula:
        return self.join()

    def join(self) -> Formula:
        f = self.meet()
        while self.peek()[1] == "|":
            self.take()
            f = Join(f, self.meet())
        return f

    def meet(self) -> Formula:
        f = self.div()
        while self.peek()[1] == "&":
            self.take()
            f = Meet(f, self.div())
        return f

    def div(self) -> Formula:
        f = self.prod()
        op = self.peek()[1]
        if op in ("\\", "/"):
            self.take()
            g = self.prod()
            f = LDiv(f, g) if op == "\\" else RDiv(f, g)
            if self.peek()[1] in ("\\", "/"):
                raise self.error("unparenthesized division chain", AmbiguityError)
        return f

    def prod(self) -> Formula:
        f = self.atom()
        while self.peek()[1] == "*":
            self.take()
            f = Prod(f, self.atom())
        return f

    def atom(self) -> Formula:
        kind, value, pos = self.take()
        if kind == "var":
            return Var(value)
        if value == "1":
            return UNIT
        if value == "(":
            f = self.formula()
            if self.peek()[1] != ")":
                raise self.error("expected ')'")
            self.take()
            return f
        self.i -= 1
        raise self.error("expected a formula" if kind != "end" else "unexpected end of input")


def parse_formula(text: str, _offset: int = 0, _full: str | None = None) -> Formula:
    p = _Parser(text, _offset, _full)
    f = p.formula()
    if p.peek()[0] != "end":
        raise p.error("trailing input")
    return f


def _split_top_level(text: str, sep: str) -> list[tuple[str, int]]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append((text[start:i], start))
            start = i + 1
    parts.append((text[start:], start))
    return parts


def parse_sequent(text: str) -> Sequent:
    text = text.replace("⊢", "|-")
    if text.count("|-") != 1:
        raise ParseError("a sequent needs exactly one '|-'", text.find("|-"), text)
    cut = text.index("|-")
    ant_text, suc_text = text[:cut], text[cut + 2:]
    antecedent: list[Formula] = []
    if ant_text.strip():
        for part, offset in _split_top_level(ant_text, ","):
            if not part.strip():
                raise ParseError("empty antecedent entry", offset, text)
            antecedent.append(parse_formula(part, offset, text))
    succedent = parse_formula(suc_text, cut + 2, text)
    return Sequent(tuple(antecedent), succedent)


def sequent(ant: Sequence[Formula | str], suc: Formula | str) -> Sequent:
    """Convenience constructor accepting formula text."""
    conv = lambda f: parse_formula(f) if isinstance(f, str) else f  # noqa: E731
    return Sequent(tuple(conv(f) for f in ant), conv(suc))


# the displayed sequent separating MALC from MALC+D
DISJ_SEQUENT_TEXT = (
    "((x/y)|w)/((x/y)|(x/z)|w), (x/y)|w, ((x/y)|w)\\((x/z)|w) |- (x/(y|z))|w"
)
DISTRIBUTIVITY_TEXT = "(x|z)&(y|z) |- (x&y)|z"
