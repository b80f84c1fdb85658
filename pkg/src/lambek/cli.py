"""Command-line front end.

Exit codes: 0 derivable/true/valid, 1 not derivable/false/falsified,
2 unknown or budget exhausted, 64 usage error, 65 parse or data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import acceptance
from . import langmodel as lm
from .calculi import LanguageError, check_derivation, derivation_to_dict, dumps_derivation
from .core import DISJ_SEQUENT_TEXT, CalculusId, ParseError, parse_sequent, render
from .lattice import (
    NoUnit,
    all_falsifiers,
    lattice_sequent_true,
    load_lattice,
    validate_lattice,
)
from .minsky import (
    EncodingContext,
    Reached,
    TraceInvalid,
    load_machine,
    parse_configuration,
    reach_final,
    synthesize_derivation,
    target_sequent,
)
from .prover import DEFAULT_BUDGET, Derivable, NotDerivable, SearchBudget, decide, derive_disj_in_malc_d

OK, NO, UNKNOWN, USAGE, DATA = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(args, code: int, payload: dict, text: str) -> int:
    if args.format == "json":
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        print(text)
    return code


def _sequent(text: str):
    try:
        return parse_sequent(text)
    except ParseError as exc:
        raise DataError(f"cannot parse sequent: {exc}") from exc


def _load(loader, path: str):
    try:
        return loader(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DataError(f"cannot load {path}: {exc}") from exc


# ------------------------------------------------------------------ prove


def cmd_prove(args) -> int:
    try:
        calc = CalculusId.parse(args.calculus)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    s = _sequent(args.sequent)
    try:
        budget = SearchBudget(args.budget_nodes, args.budget_depth, args.budget_deps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if calc is CalculusId.MALC_D:
        # Cut makes MALC+D unsearchable; only the built-in construction is offered.
        if s != parse_sequent(DISJ_SEQUENT_TEXT):
            return _emit(args, UNKNOWN, {"verdict": "unknown", "reason": "MALC_D is not searched"},
                         "unknown: MALC_D is not searched")
        res = Derivable(derive_disj_in_malc_d())
    else:
        try:
            res = decide(s, calc, budget)
        except LanguageError as exc:
            raise DataError(str(exc)) from exc
    payload: dict = {"calculus": calc.value, "sequent": render(s), "verdict": res.verdict,
                     "nodes": getattr(res, "nodes", 0)}
    if isinstance(res, Derivable):
        if args.emit_derivation:
            with open(args.emit_derivation, "w", encoding="utf-8") as fh:
                fh.write(dumps_derivation(res.derivation))
        payload["derivation_nodes"] = res.derivation.node_count()
        if args.format == "json":
            payload["derivation"] = derivation_to_dict(res.derivation)
        return _emit(args, OK, payload, f"derivable ({res.derivation.node_count()} nodes)\n{render(res.derivation)}")
    if isinstance(res, NotDerivable):
        return _emit(args, NO, payload, f"not derivable ({res.nodes} search nodes)")
    payload["reason"] = res.reason
    return _emit(args, UNKNOWN, payload, f"unknown: {res.reason}")


# ------------------------------------------------------------------ model


def cmd_model_eval(args) -> int:
    model = _load(lm.load_model, args.model)
    s = _sequent(args.sequent)
    try:
        true = lm.sequent_truth(model, s)
    except (lm.UnboundVariable, lm.UnitInEpsilonFree, lm.EmptyAntecedentInEpsilonFree, lm.AlphabetError) as exc:
        raise DataError(f"{type(exc).__name__}: {exc}") from exc
    return _emit(args, OK if true else NO, {"sequent": render(s), "true": true}, "true" if true else "false")


def cmd_model_classcheck(args) -> int:
    model = _load(lm.load_model, args.model)
    cls = lm.ModelClass.parse(args.cls)
    verdicts = {name: lm.class_check(lang, cls) for name, lang in sorted(model.valuation.items())}
    good = all(verdicts.values())
    text = "\n".join(f"{name}: {'ok' if v else 'fails'}" for name, v in verdicts.items())
    return _emit(args, OK if good else NO, {"class": cls.value, "variables": verdicts, "ok": good}, text)


def cmd_model_random(args) -> int:
    variables = [v for v in args.vars.split(",") if v]
    alphabet = [a for a in args.alphabet.split(",") if a]
    model = lm.random_model(alphabet, variables, args.seed, args.cls, args.semantics, args.max_states)
    print(json.dumps(lm.model_to_dict(model), indent=1))
    return OK


# ---------------------------------------------------------------- lattice


def cmd_lattice_validate(args) -> int:
    L = _load(load_lattice, args.lattice)
    report = validate_lattice(L, commutative=not args.noncommutative)
    lines = [str(f) for f in report.failures] or ["valid"]
    payload = {"valid": report.valid, "failures": [{"law": f.law, "witness": list(f.witness)} for f in report.failures]}
    return _emit(args, OK if report.valid else NO, payload, "\n".join(lines))


def _assignment(text: str) -> dict[str, str]:
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, sep, value = part.partition("=")
        if not sep:
            raise DataError(f"bad assignment item {part!r}")
        out[name.strip()] = value.strip()
    return out


def cmd_lattice_eval(args) -> int:
    L = _load(load_lattice, args.lattice)
    s = _sequent(args.sequent)
    asg = _assignment(args.assign)
    for name, value in asg.items():
        if value not in L.index:
            raise DataError(f"{value!r} is not an element of the lattice")
    try:
        true = lattice_sequent_true(L, asg, s)
    except (KeyError, NoUnit) as exc:
        raise DataError(f"{type(exc).__name__}: {exc}") from exc
    return _emit(args, OK if true else NO, {"true": true}, "true" if true else "false")


def cmd_lattice_falsify(args) -> int:
    L = _load(load_lattice, args.lattice)
    s = _sequent(args.sequent)
    try:
        found = list(all_falsifiers(L, s))
    except NoUnit as exc:
        raise DataError(str(exc)) from exc
    text = "\n".join(",".join(f"{k}={v}" for k, v in a.items()) for a in found) or "no falsifier"
    return _emit(args, NO if found else OK, {"falsifiers": found}, text)


def cmd_lattice_builtin(args) -> int:
    try:
        L = load_lattice(args.name)
    except OSError as exc:
        raise UsageError(f"unknown builtin lattice {args.name!r}") from exc
    print(json.dumps(L.to_dict(), indent=1))
    return OK


# ----------------------------------------------------------------- minsky


def _machine_and_start(args):
    m = _load(load_machine, args.machine)
    try:
        start = parse_configuration(args.start)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    if not 0 <= start.state < m.state_count:
        raise DataError(f"state {start.state} is outside the machine")
    return m, start


def cmd_minsky_simulate(args) -> int:
    m, start = _machine_and_start(args)
    res = reach_final(m, start, cap=args.cap)
    if isinstance(res, Reached):
        steps = [str(i) for i in res.trace]
        return _emit(args, OK, {"reached": True, "trace": steps}, "reached (L0,0,0)\n" + "\n".join(steps))
    return _emit(args, UNKNOWN, {"reached": False, "explored": res.explored},
                 f"not reached within caps ({res.explored} configurations)")


def cmd_minsky_encode(args) -> int:
    m, start = _machine_and_start(args)
    s = target_sequent(m, start, EncodingContext.for_machine(m))
    return _emit(args, OK, {"sequent": render(s)}, render(s))


def cmd_minsky_derive(args) -> int:
    m, start = _machine_and_start(args)
    res = reach_final(m, start, cap=args.cap)
    if not isinstance(res, Reached):
        return _emit(args, UNKNOWN, {"reached": False}, "final configuration not reached within caps")
    try:
        d = synthesize_derivation(m, start, res.trace)
    except TraceInvalid as exc:  # pragma: no cover - simulator and synthesizer disagree
        raise DataError(str(exc)) from exc
    if args.emit_derivation:
        with open(args.emit_derivation, "w", encoding="utf-8") as fh:
            fh.write(dumps_derivation(d))
    payload = {"nodes": d.node_count(), "sequent": render(d.conclusion)}
    if args.check:
        report = check_derivation(d, CalculusId.LPLUSEPS)
        payload["valid"] = report.valid
        if not report.valid:
            payload["error"] = str(report.error)
            return _emit(args, NO, payload, f"derivation rejected: {report.error}")
        return _emit(args, OK, payload, f"derivation with {d.node_count()} nodes; checker accepts")
    return _emit(args, OK, payload, f"derivation with {d.node_count()} nodes")


# ------------------------------------------------------------------ repro


def cmd_repro(args) -> int:
    if args.only is not None and args.only not in acceptance.CASE_KEYS:
        raise UsageError(f"unknown case {args.only!r}; choose from {', '.join(acceptance.CASE_KEYS)}")
    outcomes = []
    for case in acceptance.CASES:
        if args.only is None or case.key == args.only:
            out = acceptance.run(case)
            outcomes.append(out)
            if args.format == "text":
                print(out.line(), flush=True)
    failed = [o for o in outcomes if not o.passed]
    if args.format == "json":
        print(json.dumps([o.__dict__ for o in outcomes], indent=1))
    else:
        print(f"{len(outcomes) - len(failed)}/{len(outcomes)} criteria passed")
    return NO if failed else OK


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    p = _Parser(prog="lambek", description="Lambek calculi: proof search, models, lattices, Minsky encodings.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("prove", parents=[common], help="search for a derivation")
    q.add_argument("--calculus", required=True)
    q.add_argument("--sequent", required=True)
    q.add_argument("--budget-nodes", type=int, default=DEFAULT_BUDGET.max_nodes)
    q.add_argument("--budget-depth", type=int, default=DEFAULT_BUDGET.max_depth)
    q.add_argument("--budget-deps", type=int, default=DEFAULT_BUDGET.max_deps)
    q.add_argument("--emit-derivation", metavar="PATH")
    q.set_defaults(func=cmd_prove)

    model = sub.add_parser("model", help="language models").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = model.add_parser("eval", parents=[common])
    q.add_argument("--model", required=True)
    q.add_argument("--sequent", required=True)
    q.set_defaults(func=cmd_model_eval)
    q = model.add_parser("classcheck", parents=[common])
    q.add_argument("--model", required=True)
    q.add_argument("--class", dest="cls", required=True, choices=[c.value for c in lm.ModelClass])
    q.set_defaults(func=cmd_model_classcheck)
    q = model.add_parser("random", parents=[common])
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--class", dest="cls", default="plain", choices=[c.value for c in lm.ModelClass])
    q.add_argument("--vars", default="p,q")
    q.add_argument("--alphabet", default="a,b")
    q.add_argument("--semantics", default="eps", choices=("eps", "noeps"))
    q.add_argument("--max-states", type=int, default=4)
    q.set_defaults(func=cmd_model_random)

    lat = sub.add_parser("lattice", help="finite residuated lattices").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = lat.add_parser("validate", parents=[common])
    q.add_argument("--lattice", required=True, help="builtin name or JSON file")
    q.add_argument("--noncommutative", action="store_true")
    q.set_defaults(func=cmd_lattice_validate)
    q = lat.add_parser("eval", parents=[common])
    q.add_argument("--lattice", required=True)
    q.add_argument("--assign", required=True)
    q.add_argument("--sequent", required=True)
    q.set_defaults(func=cmd_lattice_eval)
    q = lat.add_parser("falsify", parents=[common])
    q.add_argument("--lattice", required=True)
    q.add_argument("--sequent", required=True)
    q.set_defaults(func=cmd_lattice_falsify)
    q = lat.add_parser("builtin", parents=[common])
    q.add_argument("name")
    q.set_defaults(func=cmd_lattice_builtin)

    mk = sub.add_parser("minsky", help="counter machines").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    for name, func in (("simulate", cmd_minsky_simulate), ("encode", cmd_minsky_encode), ("derive", cmd_minsky_derive)):
        q = mk.add_parser(name, parents=[common])
        q.add_argument("--machine", required=True)
        q.add_argument("--from", dest="start", required=True, help='configuration "i,k1,k2"')
        q.add_argument("--cap", type=int, default=64)
        if name == "derive":
            q.add_argument("--check", action="store_true")
            q.add_argument("--emit-derivation", metavar="PATH")
        q.set_defaults(func=func)

    q = sub.add_parser("repro", parents=[common], help="run the acceptance suite")
    q.add_argument("--only", metavar="CASE")
    q.set_defaults(func=cmd_repro)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
