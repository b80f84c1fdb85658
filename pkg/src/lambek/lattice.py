"""Finite commutative residuated lattices given by tables."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .core import Formula, Join, LDiv, Meet, Prod, RDiv, Sequent, Unit, Var


class UnboundVariable(KeyError):
    pass


class NoUnit(ValueError):
    pass


class EmptyAntecedentNoUnit(NoUnit):
    pass


@dataclass(frozen=True)
class FiniteResiduatedLattice:
    carrier: tuple[str, ...]
    leq: tuple[tuple[bool, ...], ...]
    meet: tuple[tuple[int, ...], ...]
    join: tuple[tuple[int, ...], ...]
    prod: tuple[tuple[int, ...], ...]
    limp: tuple[tuple[int, ...], ...]
    unit: str | None = None
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {e: i for i, e in enumerate(self.carrier)})

    # element-level views
    def le(self, x: str, y: str) -> bool:
        return self.leq[self.index[x]][self.index[y]]

    def _op(self, table, x: str, y: str) -> str:
        return self.carrier[table[self.index[x]][self.index[y]]]

    def m(self, x: str, y: str) -> str:
        return self._op(self.meet, x, y)

    def j(self, x: str, y: str) -> str:
        return self._op(self.join, x, y)

    def p(self, x: str, y: str) -> str:
        return self._op(self.prod, x, y)

    def r(self, x: str, y: str) -> str:
        return self._op(self.limp, x, y)

    @classmethod
    def from_tables(
        cls,
        carrier: Sequence[str],
        leq,
        prod,
        limp,
        meet=None,
        join=None,
        unit: str | None = None,
    ) -> "FiniteResiduatedLattice":
        """Build from element-name tables; meet/join default to glb/lub of ``leq``."""
        carrier = tuple(carrier)
        idx = {e: i for i, e in enumerate(carrier)}
        n = len(carrier)
        le = tuple(tuple(bool(leq[i][k]) for k in range(n)) for i in range(n))

        def names(table):
            return tuple(tuple(idx[str(v)] for v in row) for row in table)

        def bound(i, k, upper):
            cands = [t for t in range(n) if (le[i][t] and le[k][t] if upper else le[t][i] and le[t][k])]
            best = [t for t in cands if all((le[t][s] if upper else le[s][t]) for s in cands)]
            return best[0] if best else 0

        mt = names(meet) if meet is not None else tuple(tuple(bound(i, k, False) for k in range(n)) for i in range(n))
        jn = names(join) if join is not None else tuple(tuple(bound(i, k, True) for k in range(n)) for i in range(n))
        return cls(carrier, le, mt, jn, names(prod), names(limp), unit)

    def with_prod(self, x: str, y: str, value: str) -> "FiniteResiduatedLattice":
        rows = [list(r) for r in self.prod]
        rows[self.index[x]][self.index[y]] = self.index[value]
        return FiniteResiduatedLattice(
            self.carrier, self.leq, self.meet, self.join, tuple(map(tuple, rows)), self.limp, self.unit
        )

    def to_dict(self) -> dict:
        c = self.carrier

        def named(t):
            return [[c[v] for v in row] for row in t]

        out = {
            "carrier": list(c),
            "leq": [[int(v) for v in row] for row in self.leq],
            "meet": named(self.meet),
            "join": named(self.join),
            "prod": named(self.prod),
            "limp": named(self.limp),
        }
        if self.unit is not None:
            out["unit"] = self.unit
        return out


@dataclass(frozen=True)
class LawFailure:
    law: str
    witness: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.law} fails at ({', '.join(self.witness)})"


@dataclass(frozen=True)
class ValidityReport:
    failures: tuple[LawFailure, ...]

    @property
    def valid(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.valid


def validate_lattice(L: FiniteResiduatedLattice, commutative: bool = True) -> ValidityReport:
    """Check every law exhaustively; at most one witness per law is reported."""
    n = len(L.carrier)
    c = L.carrier
    le, mt, jn, pr, lim = L.leq, L.meet, L.join, L.prod, L.limp
    R = range(n)
    fails: list[LawFailure] = []

    def first(law, cond, arity):
        for t in itertools.product(R, repeat=arity):
            if not cond(*t):
                fails.append(LawFailure(law, tuple(c[i] for i in t)))
                return

    first("reflexivity", lambda x: le[x][x], 1)
    first("antisymmetry", lambda x, y: not (le[x][y] and le[y][x]) or x == y, 2)
    first("transitivity", lambda x, y, z: not (le[x][y] and le[y][z]) or le[x][z], 3)
    first("meet is glb", lambda x, y, z: le[mt[x][y]][x] and le[mt[x][y]][y] and (not (le[z][x] and le[z][y]) or le[z][mt[x][y]]), 3)
    first("join is lub", lambda x, y, z: le[x][jn[x][y]] and le[y][jn[x][y]] and (not (le[x][z] and le[y][z]) or le[jn[x][y]][z]), 3)
    first("associativity", lambda x, y, z: pr[pr[x][y]][z] == pr[x][pr[y][z]], 3)
    if commutative:
        first("commutativity", lambda x, y: pr[x][y] == pr[y][x], 2)
    first("residuation", lambda x, y, z: le[pr[x][y]][z] == le[y][lim[x][z]], 3)
    if L.unit is not None:
        u = L.index.get(L.unit)
        if u is None:
            fails.append(LawFailure("unit in carrier", (L.unit,)))
        else:
            first("unit", lambda x: pr[u][x] == x and pr[x][u] == x, 1)
    return ValidityReport(tuple(fails))


def paper_lattice_r5() -> FiniteResiduatedLattice:
    """The five-element counter-model: 0 below a, b, c below 1; no designated unit."""
    carrier = ("0", "a", "b", "c", "1")
    leq = [[x == y or x == "0" or y == "1" for y in carrier] for x in carrier]
    prod = [
        ["0", "0", "0", "0", "0"],
        ["0", "a", "b", "c", "1"],
        ["0", "b", "a", "c", "1"],
        ["0", "c", "c", "0", "c"],
        ["0", "1", "1", "c", "1"],
    ]
    limp = [
        ["1", "1", "1", "1", "1"],
        ["0", "a", "b", "c", "1"],
        ["0", "b", "a", "c", "1"],
        ["c", "c", "c", "1", "1"],
        ["0", "0", "0", "c", "1"],
    ]
    return FiniteResiduatedLattice.from_tables(carrier, leq, prod, limp)


def boolean_lattice() -> FiniteResiduatedLattice:
    """Two-element Boolean algebra, product = meet, residual = implication."""
    carrier = ("0", "1")
    leq = [[True, True], [False, True]]
    prod = [["0", "0"], ["0", "1"]]
    limp = [["1", "1"], ["0", "1"]]
    return FiniteResiduatedLattice.from_tables(carrier, leq, prod, limp, unit="1")


def chain_lattice(n: int) -> FiniteResiduatedLattice:
    """The n-element Goedel chain 0 < 1 < ... < n-1 (product = min); distributive."""
    carrier = tuple(str(i) for i in range(n))
    leq = [[i <= k for k in range(n)] for i in range(n)]
    prod = [[str(min(i, k)) for k in range(n)] for i in range(n)]
    limp = [[str(n - 1) if i <= k else str(k) for k in range(n)] for i in range(n)]
    return FiniteResiduatedLattice.from_tables(carrier, leq, prod, limp, unit=str(n - 1))


BUILTIN = {"r5": paper_lattice_r5, "bool": boolean_lattice}


def lattice_eval(L: FiniteResiduatedLattice, assignment: Mapping[str, str], f: Formula) -> str:
    """Value of ``f``; both divisions read as the single residual."""
    return L.carrier[_eval(L, assignment, f)]


def _eval(L, assignment, f) -> int:
    if isinstance(f, Var):
        try:
            return L.index[assignment[f.name]]
        except KeyError:
            raise UnboundVariable(f.name) from None
    if isinstance(f, Unit):
        if L.unit is None:
            raise NoUnit("this lattice has no designated unit")
        return L.index[L.unit]
    if isinstance(f, RDiv):  # B/A = A -o B
        return L.limp[_eval(L, assignment, f.right)][_eval(L, assignment, f.left)]
    a, b = _eval(L, assignment, f.left), _eval(L, assignment, f.right)
    if isinstance(f, LDiv):
        return L.limp[a][b]
    if isinstance(f, Prod):
        return L.prod[a][b]
    if isinstance(f, Meet):
        return L.meet[a][b]
    if isinstance(f, Join):
        return L.join[a][b]
    raise TypeError(f)  # pragma: no cover


def lattice_sequent_true(L: FiniteResiduatedLattice, assignment: Mapping[str, str], s: Sequent) -> bool:
    succ = _eval(L, assignment, s.succedent)
    if not s.antecedent:
        if L.unit is None:
            raise EmptyAntecedentNoUnit("empty antecedent needs a unit")
        return L.leq[L.index[L.unit]][succ]
    acc = _eval(L, assignment, s.antecedent[0])
    for f in s.antecedent[1:]:
        acc = L.prod[acc][_eval(L, assignment, f)]
    return L.leq[acc][succ]


def all_falsifiers(L: FiniteResiduatedLattice, s: Sequent) -> Iterator[dict[str, str]]:
    """Falsifying assignments in lexicographic order (variables sorted, carrier order)."""
    names = sorted(s.variables())
    for values in itertools.product(L.carrier, repeat=len(names)):
        asg = dict(zip(names, values))
        if not lattice_sequent_true(L, asg, s):
            yield asg


def find_falsifier(L: FiniteResiduatedLattice, s: Sequent) -> dict[str, str] | None:
    return next(all_falsifiers(L, s), None)


def lattice_from_dict(data: Mapping) -> FiniteResiduatedLattice:
    return FiniteResiduatedLattice.from_tables(
        data["carrier"],
        data["leq"],
        data["prod"],
        data["limp"],
        data.get("meet"),
        data.get("join"),
        data.get("unit"),
    )


def load_lattice(source: str) -> FiniteResiduatedLattice:
    """A builtin name (``r5``, ``bool``) or a path to a lattice JSON file."""
    if source in BUILTIN:
        return BUILTIN[source]()
    with open(source, encoding="utf-8") as fh:
        return lattice_from_dict(json.load(fh))
