"""Two-counter Minsky machines and their encoding into L+eps.

A configuration (L_i, k1, k2) becomes the word ``e1 p1^k1 l_i p2^k2 e2`` and
the machine becomes one big conjunction G.  :func:`synthesize_derivation`
turns a terminating run into a checked derivation of ``1&G, word |- b``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .core import UNIT, Derivation, Formula, LDiv, Meet, Sequent, Var
from .prover import commute


class TraceInvalid(ValueError):
    pass


class EmptySequence(ValueError):
    pass


@dataclass(frozen=True)
class Instruction:
    op: str  # "inc" | "dec" | "jz"
    src: int
    reg: int
    dst: int

    def __post_init__(self):
        if self.op not in ("inc", "dec", "jz"):
            raise ValueError(f"unknown instruction {self.op!r}")
        if self.reg not in (1, 2):
            raise ValueError("register must be 1 or 2")

    def __str__(self) -> str:
        return f"{self.op.upper()}({self.src},{self.reg},{self.dst})"


def INC(i: int, r: int, j: int) -> Instruction:
    return Instruction("inc", i, r, j)


def DEC(i: int, r: int, j: int) -> Instruction:
    return Instruction("dec", i, r, j)


def JZ(i: int, r: int, j: int) -> Instruction:
    return Instruction("jz", i, r, j)


@dataclass(frozen=True)
class JZDEC:
    """Compound instruction: decrement to ``dst`` or, on zero, jump to ``dst_zero``."""

    src: int
    reg: int
    dst: int
    dst_zero: int


@dataclass(frozen=True)
class Configuration:
    state: int
    k1: int = 0
    k2: int = 0

    def __post_init__(self):
        if self.k1 < 0 or self.k2 < 0 or self.state < 0:
            raise ValueError("configuration entries must be non-negative")

    def counter(self, r: int) -> int:
        return self.k1 if r == 1 else self.k2

    def with_counter(self, r: int, value: int, state: int) -> "Configuration":
        if r == 1:
            return Configuration(state, value, self.k2)
        return Configuration(state, self.k1, value)

    def __str__(self) -> str:
        return f"(L{self.state},{self.k1},{self.k2})"


FINAL = Configuration(0, 0, 0)


@dataclass(frozen=True)
class MinskyMachine:
    state_count: int
    instructions: tuple[Instruction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self.state_count < 1:
            raise ValueError("a machine has at least the final state L0")
        for ins in self.instructions:
            if not (0 <= ins.src < self.state_count and 0 <= ins.dst < self.state_count):
                raise ValueError(f"{ins} refers to a state outside L0..L{self.state_count - 1}")


def apply_instruction(ins: Instruction, c: Configuration) -> Configuration | None:
    """Successor of ``c`` under ``ins``, or None if it does not apply."""
    if c.state != ins.src:
        return None
    k = c.counter(ins.reg)
    if ins.op == "inc":
        return c.with_counter(ins.reg, k + 1, ins.dst)
    if ins.op == "dec":
        return c.with_counter(ins.reg, k - 1, ins.dst) if k > 0 else None
    return c.with_counter(ins.reg, 0, ins.dst) if k == 0 else None


def simulate_step(m: MinskyMachine, c: Configuration) -> set[Configuration]:
    out = set()
    for ins in m.instructions:
        nxt = apply_instruction(ins, c)
        if nxt is not None:
            out.add(nxt)
    return out


@dataclass(frozen=True)
class Reached:
    trace: tuple[Instruction, ...]


@dataclass(frozen=True)
class NotWithinCaps:
    explored: int


def reach_final(
    m: MinskyMachine, start: Configuration, cap: int = 64, max_steps: int = 10_000
) -> Union[Reached, NotWithinCaps]:
    """Breadth-first search for a run from ``start`` to (L0,0,0).

    Counters are kept at most ``cap`` and runs at most ``max_steps`` long.
    Failing to find a run says nothing about unreachability beyond the caps.
    """
    if cap <= 0 or max_steps <= 0:
        raise ValueError("caps must be positive")
    parent: dict[Configuration, tuple[Configuration, Instruction] | None] = {start: None}
    depth = {start: 0}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        if c == FINAL:
            trace = []
            while parent[c] is not None:
                c, ins = parent[c]
                trace.append(ins)
            return Reached(tuple(reversed(trace)))
        if depth[c] >= max_steps:
            continue
        for ins in m.instructions:
            nxt = apply_instruction(ins, c)
            if nxt is None or nxt in parent or max(nxt.k1, nxt.k2) > cap:
                continue
            parent[nxt] = (c, ins)
            depth[nxt] = depth[c] + 1
            queue.append(nxt)
    return NotWithinCaps(len(parent))


def replay(start: Configuration, trace: Sequence[Instruction]) -> list[Configuration]:
    """All configurations visited along ``trace``; raises TraceInvalid."""
    configs = [start]
    for step, ins in enumerate(trace):
        nxt = apply_instruction(ins, configs[-1])
        if nxt is None:
            raise TraceInvalid(f"step {step}: {ins} does not apply at {configs[-1]}")
        configs.append(nxt)
    return configs


def translate_jzdec(instructions: Iterable[Instruction | JZDEC], state_count: int | None = None):
    """Split every JZDEC into a DEC and a JZ.

    Returns the instruction list, or a machine when ``state_count`` is given.
    """
    out: list[Instruction] = []
    for ins in instructions:
        if isinstance(ins, JZDEC):
            out.append(DEC(ins.src, ins.reg, ins.dst))
            out.append(JZ(ins.src, ins.reg, ins.dst_zero))
        else:
            out.append(ins)
    if state_count is None:
        return out
    return MinskyMachine(state_count, tuple(out))


# -------------------------------------------------------------- encoding


@dataclass(frozen=True)
class EncodingContext:
    n: int  # highest state index
    e1: str = "e1"
    e2: str = "e2"
    p1: str = "p1"
    p2: str = "p2"
    b: str = "b"
    l_prefix: str = "l"
    names: tuple[str, ...] = field(init=False, default=())

    def __post_init__(self):
        names = (self.e1, self.e2, self.p1, self.p2) + tuple(
            f"{self.l_prefix}{i}" for i in range(self.n + 1)
        )
        if len(set(names + (self.b,))) != len(names) + 1:
            raise ValueError("encoding variable names collide")
        object.__setattr__(self, "names", names)

    @classmethod
    def for_machine(cls, m: MinskyMachine) -> "EncodingContext":
        return cls(m.state_count - 1)

    def var(self, name: str) -> Var:
        return Var(name)

    def l(self, i: int) -> Var:
        return Var(f"{self.l_prefix}{i}")

    @property
    def bottom(self) -> Var:
        return Var(self.b)

    @property
    def script_v(self) -> tuple[Var, ...]:
        """All encoding variables except b, in conjunct order."""
        return tuple(Var(x) for x in self.names)


def fold_backslash(phi: Sequence[Formula], c: Formula) -> Formula:
    """A_m\\(...(A_1\\C)) for phi = [A_1, ..., A_m]."""
    if not phi:
        raise EmptySequence("fold_backslash needs a non-empty list")
    out = c
    for a in phi:
        out = LDiv(a, out)
    return out


def double_neg_b(phi: Sequence[Formula], ctx: EncodingContext) -> Formula:
    b = ctx.bottom
    return LDiv(fold_backslash(phi, b), b)


def instruction_parts(ins: Instruction, ctx: EncodingContext) -> tuple[list[Var], list[Var]]:
    """The (Psi, Phi) pair: Psi is rewritten into Phi by one step."""
    e1, e2, p1, p2 = (Var(x) for x in (ctx.e1, ctx.e2, ctx.p1, ctx.p2))
    li, lj = ctx.l(ins.src), ctx.l(ins.dst)
    table = {
        ("inc", 1): ([li], [p1, lj]),
        ("inc", 2): ([li], [lj, p2]),
        ("dec", 1): ([p1, li], [lj]),
        ("dec", 2): ([li, p2], [lj]),
        ("jz", 1): ([e1, li], [e1, lj]),
        ("jz", 2): ([li, e2], [lj, e2]),
    }
    return table[(ins.op, ins.reg)]


def instruction_formula(ins: Instruction, ctx: EncodingContext) -> Formula:
    psi, phi = instruction_parts(ins, ctx)
    return fold_backslash(psi, double_neg_b(phi, ctx))


def encode_config(c: Configuration, ctx: EncodingContext) -> list[Var]:
    return (
        [Var(ctx.e1)]
        + [Var(ctx.p1)] * c.k1
        + [ctx.l(c.state)]
        + [Var(ctx.p2)] * c.k2
        + [Var(ctx.e2)]
    )


def rotation_formula(q: Var, ctx: EncodingContext) -> Formula:
    return LDiv(q, double_neg_b([q], ctx))


def machine_conjuncts(m: MinskyMachine, ctx: EncodingContext) -> list[Formula]:
    """Termination conjunct, instructions in program order, then q\\q^bb per variable."""
    final = encode_config(Configuration(0, 0, 0), ctx)
    return (
        [fold_backslash(final, ctx.bottom)]
        + [instruction_formula(i, ctx) for i in m.instructions]
        + [rotation_formula(q, ctx) for q in ctx.script_v]
    )


def meet_all(conjuncts: Sequence[Formula]) -> Formula:
    out = conjuncts[-1]
    for c in reversed(conjuncts[:-1]):
        out = Meet(c, out)
    return out


def machine_formula(m: MinskyMachine, ctx: EncodingContext) -> Formula:
    return meet_all(machine_conjuncts(m, ctx))


def target_sequent(m: MinskyMachine, c: Configuration, ctx: EncodingContext | None = None) -> Sequent:
    ctx = ctx or EncodingContext.for_machine(m)
    return Sequent((Meet(UNIT, machine_formula(m, ctx)),) + tuple(encode_config(c, ctx)), ctx.bottom)


# ------------------------------------------------------------- synthesis


class _Builder:
    """Derivation fragments for a fixed machine; every step goes downward."""

    def __init__(self, m: MinskyMachine, ctx: EncodingContext):
        self.m = m
        self.ctx = ctx
        self.conjuncts = machine_conjuncts(m, ctx)
        self.tails = [meet_all(self.conjuncts[i:]) for i in range(len(self.conjuncts))]
        self.g = self.tails[0]
        self.u = Meet(UNIT, self.g)
        self.b = ctx.bottom

    @staticmethod
    def ident(f: Formula) -> Derivation:
        return Derivation(Sequent((f,), f), "Id")

    def peel(self, d: Derivation, index: int) -> Derivation:
        """From ``..., conjunct[index] |- b`` (conjunct last) derive ``..., 1&G |- b``."""
        ant, suc = d.conclusion.antecedent, d.conclusion.succedent
        pos = len(ant) - 1
        head = ant[:-1]
        if index < len(self.conjuncts) - 1:
            d = Derivation(Sequent(head + (self.tails[index],), suc), "&Ll", (d,), {"pos": pos})
        for i in range(index - 1, -1, -1):
            d = Derivation(Sequent(head + (self.tails[i],), suc), "&Lr", (d,), {"pos": pos})
        return Derivation(Sequent(head + (self.u,), suc), "&Lr", (d,), {"pos": pos})

    def final(self) -> Derivation:
        """The derivation of ``1&G, e1, l0, e2 |- b``."""
        word = encode_config(FINAL, self.ctx)
        d = self.ident(self.b)
        for k, a in enumerate(word):
            prefix = tuple(word[:k])
            principal = fold_backslash(word[: k + 1], self.b)
            d = Derivation(
                Sequent(prefix + (a, principal), self.b),
                "\\L",
                (self.ident(a), d),
                {"pos": k + 1, "split": k},
            )
        d = self.peel(d, 0)
        return commute(d, (self.u,) + tuple(word))

    def lemma(self, d: Derivation, phi: Sequence[Formula], psi: Sequence[Formula], index: int) -> Derivation:
        """From ``1&G, Phi, Delta |- b`` derive ``1&G, Delta, Psi |- b``.

        ``index`` names the conjunct Psi\\Phi^bb inside G.
        """
        u, b = self.u, self.b
        ant = d.conclusion.antecedent
        k = len(phi)
        if ant[0] != u or tuple(ant[1: 1 + k]) != tuple(phi) or d.conclusion.succedent != b:
            raise TraceInvalid(f"lemma premise has the wrong shape: {d.conclusion}")
        delta = tuple(ant[1 + k:])
        # move 1&G behind Phi, then abstract Phi on the right
        d = commute(d, tuple(phi) + (u,) + delta)
        for i in range(k):
            rest = tuple(phi[i + 1:]) + (u,) + delta
            d = Derivation(Sequent(rest, fold_backslash(phi[: i + 1], b)), "\\R", (d,))
        ctx_part = (u,) + delta
        nn = double_neg_b(phi, self.ctx)
        d = Derivation(Sequent(ctx_part + (nn,), b), "\\L", (d, self.ident(b)), {"pos": len(ctx_part), "split": 0})
        for i, q in enumerate(psi):
            pre = ctx_part + tuple(psi[:i])
            principal = fold_backslash(psi[: i + 1], nn)
            d = Derivation(
                Sequent(pre + (q, principal), b),
                "\\L",
                (self.ident(q), d),
                {"pos": len(pre) + 1, "split": len(pre)},
            )
        d = self.peel(d, index)
        # bring the new copy of 1&G to the front and merge the two copies
        d = commute(d, (u, u) + delta + tuple(psi))
        return Derivation(Sequent((u,) + delta + tuple(psi), b), "Deps", (d,), {"pos": 0})

    def rotate(self, d: Derivation, times: int) -> Derivation:
        """Each round moves the first word symbol to the end."""
        first_rot = 1 + len(self.m.instructions)
        names = [v.name for v in self.ctx.script_v]
        for _ in range(times):
            q = d.conclusion.antecedent[1]
            d = self.lemma(d, [q], [q], first_rot + names.index(q.name))
        return d

    def step(self, d: Derivation, ins: Instruction, before: Configuration, after: Configuration) -> Derivation:
        """From the sequent of ``after`` derive the sequent of ``before``."""
        psi, phi = instruction_parts(ins, self.ctx)
        w_before = encode_config(before, self.ctx)
        w_after = encode_config(after, self.ctx)
        for pos in range(len(w_before) - len(psi) + 1):
            if w_before[pos: pos + len(psi)] != psi:
                continue
            d1, d2 = w_before[:pos], w_before[pos + len(psi):]
            if d1 + phi + d2 == w_after:
                break
        else:
            raise TraceInvalid(f"{ins} does not rewrite {before} into {after}")
        d = self.rotate(d, len(d1))
        d = self.lemma(d, phi, psi, 1 + self.m.instructions.index(ins))
        return self.rotate(d, len(d2))


def synthesize_derivation(
    m: MinskyMachine,
    start: Configuration,
    trace: Sequence[Instruction],
    ctx: EncodingContext | None = None,
) -> Derivation:
    """A derivation of ``target_sequent(m, start)`` following a run to (L0,0,0)."""
    ctx = ctx or EncodingContext.for_machine(m)
    for ins in trace:
        if ins not in m.instructions:
            raise TraceInvalid(f"{ins} is not an instruction of the machine")
    configs = replay(start, trace)
    if configs[-1] != FINAL:
        raise TraceInvalid(f"trace ends in {configs[-1]}, not in (L0,0,0)")
    builder = _Builder(m, ctx)
    d = builder.final()
    for t in range(len(trace) - 1, -1, -1):
        d = builder.step(d, trace[t], configs[t], configs[t + 1])
    expected = target_sequent(m, start, ctx)
    if d.conclusion != expected:
        raise TraceInvalid("synthesized conclusion differs from the target sequent")
    return d


def lemma_fragment(
    m: MinskyMachine,
    index: int,
    delta: Sequence[Formula],
    ctx: EncodingContext | None = None,
) -> tuple[Derivation, Sequent]:
    """The Lemma rewrite for conjunct ``index`` over ``delta``, with a hypothesis leaf.

    Returns the fragment and its premise sequent ``1&G, Phi, Delta |- b``.
    """
    ctx = ctx or EncodingContext.for_machine(m)
    builder = _Builder(m, ctx)
    n_ins = len(m.instructions)
    if 1 <= index <= n_ins:
        psi, phi = instruction_parts(m.instructions[index - 1], ctx)
    elif n_ins < index < len(builder.conjuncts):
        q = ctx.script_v[index - 1 - n_ins]
        psi, phi = [q], [q]
    else:
        raise IndexError("conjunct index does not name a Lemma conjunct")
    premise = Sequent((builder.u,) + tuple(phi) + tuple(delta), builder.b)
    leaf = Derivation(premise, "Hyp")
    return builder.lemma(leaf, phi, psi, index), premise


# ----------------------------------------------------------------- files


def machine_from_dict(data: dict) -> MinskyMachine:
    items: list[Instruction | JZDEC] = []
    for rec in data["instructions"]:
        op = rec["op"].lower()
        if op == "jzdec":
            items.append(JZDEC(rec["from"], rec["reg"], rec["to"], rec["to2"]))
        else:
            items.append(Instruction(op, rec["from"], rec["reg"], rec["to"]))
    return translate_jzdec(items, int(data["states"]))


def machine_to_dict(m: MinskyMachine) -> dict:
    return {
        "states": m.state_count,
        "instructions": [
            {"op": i.op, "from": i.src, "reg": i.reg, "to": i.dst} for i in m.instructions
        ],
    }


def load_machine(path: str) -> MinskyMachine:
    with open(path, encoding="utf-8") as fh:
        return machine_from_dict(json.load(fh))


def parse_configuration(text: str) -> Configuration:
    parts = [p.strip() for p in text.strip().strip("()").split(",")]
    if len(parts) != 3:
        raise ValueError(f"configuration needs three numbers, got {text!r}")
    state = parts[0][1:] if parts[0][:1] in "Ll" else parts[0]
    return Configuration(int(state), int(parts[1]), int(parts[2]))


LOOP_MACHINE = MinskyMachine(2, (DEC(1, 1, 1), JZ(1, 1, 0)))
INC_MACHINE = MinskyMachine(2, (INC(1, 1, 1),))
