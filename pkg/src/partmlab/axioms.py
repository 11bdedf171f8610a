"""Intrinsic first-order theories of machine computations, their
serialization, ground model checking against harvested traces, and the
multiplicity contradiction witness.

A theory describes one machine-on-input computation over the signature
{Q_state, S_symbol, <, successor, 0}: five arithmetic axioms, one axiom per
instruction (with a frame conjunct carrying untouched cells), the initial
configuration, two boundary axioms (nothing before time 0, nothing after a
halt), and per-state/per-symbol uniqueness axioms.  Three connective
regimes are emitted: plain classical ("fol"), the paraconsistent tagging
("lfi1"), and the modal tagging ("s5q") in which uniqueness negations become
paraconsistent and antecedent predicates gain a possibility prefix.

Provability is replaced throughout by truth in a finite structure harvested
from an engine trace, with quantifiers relativized to a window.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .classical import Trace
from .errors import PrecondError
from .machine import LEFT, RIGHT, WRITE, Machine
from .partm import FiringRecord, ParTrace, partm_run

VARIANT_FOL = "fol"
VARIANT_LFI1 = "lfi1"
VARIANT_S5Q = "s5q"
VARIANTS = (VARIANT_FOL, VARIANT_LFI1, VARIANT_S5Q)

CLASSICAL = "classical"
PARA = "para"


# ---------------------------------------------------------------------------
# Terms and formulas


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Succ:
    sub: "Term"


@dataclass(frozen=True)
class IntLit:
    """Ground integer literal; used only in harvested ground atoms, where
    negative cell indices are not reachable by successor numerals."""

    value: int


Term = Union[Var, Zero, Succ, IntLit]


def num(k: int) -> Term:
    if k < 0:
        return IntLit(k)
    t: Term = Zero()
    for _ in range(k):
        t = Succ(t)
    return t


@dataclass(frozen=True)
class Pred:
    kind: str  # "Q" | "S" | "less" | "eq"
    sel: Optional[str]  # state or symbol token for Q/S
    args: tuple[Term, ...]


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Not:
    sub: "Formula"
    regime: str = CLASSICAL


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    regime: str = CLASSICAL


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Possibly:
    sub: "Formula"


@dataclass(frozen=True)
class Incons:
    sub: "Formula"


Formula = Union[Pred, TrueF, FalseF, Not, And, Or, Implies, Iff, Forall, Exists, Possibly, Incons]


def q_atom(state: str, *args: Term) -> Pred:
    return Pred("Q", state, tuple(args))


def s_atom(symbol: str, *args: Term) -> Pred:
    return Pred("S", symbol, tuple(args))


def less(a: Term, b: Term) -> Pred:
    return Pred("less", None, (a, b))


def eq(a: Term, b: Term) -> Pred:
    return Pred("eq", None, (a, b))


def conj(parts: list[Formula], regime: str = CLASSICAL) -> Formula:
    """Right-associative conjunction; empty conjunction is truth."""
    if not parts:
        return TrueF()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out, regime)
    return out


def disj(parts: list[Formula]) -> Formula:
    """Right-associative disjunction; empty disjunction is falsum."""
    if not parts:
        return FalseF()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


# ---------------------------------------------------------------------------
# Theory emission


@dataclass
class Theory:
    variant: str
    axioms: list[tuple[str, Formula]]

    def ids(self) -> list[str]:
        return [a for a, _ in self.axioms]

    def formula(self, axiom_id: str) -> Formula:
        for a, f in self.axioms:
            if a == axiom_id:
                return f
        raise KeyError(axiom_id)


def expected_axiom_count(machine: Machine) -> int:
    return 5 + len(machine.instructions) + 1 + 2 + len(machine.states) + len(machine.alphabet)


def _arith_axioms() -> list[tuple[str, Formula]]:
    z, x, y = Var("z"), Var("x"), Var("y")
    return [
        ("A1", Forall("z", Exists("x", eq(z, Succ(x))))),
        (
            "A2",
            Forall(
                "z",
                Forall(
                    "x",
                    Forall(
                        "y",
                        Implies(And(eq(z, Succ(x)), eq(z, Succ(y))), eq(x, y)),
                    ),
                ),
            ),
        ),
        (
            "A3",
            Forall(
                "x",
                Forall(
                    "y",
                    Forall(
                        "z",
                        Implies(And(less(x, y), less(y, z)), less(x, z)),
                    ),
                ),
            ),
        ),
        ("A4", Forall("x", less(x, Succ(x)))),
        ("A5", Forall("x", Forall("y", Implies(less(x, y), Not(eq(x, y)))))),
    ]


def _frame(machine: Machine, t: Term, y: Term) -> Formula:
    return conj([Implies(s_atom(s, t, y), s_atom(s, Succ(t), y)) for s in machine.alphabet])


def _instruction_axiom(machine: Machine, k: int, variant: str) -> Formula:
    inst = machine.instructions[k]
    t, x, y = Var("t"), Var("x"), Var("y")
    here: Term = Succ(x) if inst.op == LEFT else x
    q_ante: Formula = q_atom(inst.state, t, here)
    s_ante: Formula = s_atom(inst.symbol, t, here)
    if inst.state_marked:
        q_ante = Incons(q_ante)
    if inst.symbol_marked:
        s_ante = Incons(s_ante)
    ante_regime = PARA if variant == VARIANT_S5Q else CLASSICAL
    ante = And(q_ante, s_ante, ante_regime)

    if inst.op == WRITE:
        frame = Forall("y", Implies(Not(eq(y, x)), _frame(machine, t, y)))
        parts: list[Formula] = [q_atom(inst.next_state, Succ(t), x), s_atom(inst.write_symbol, Succ(t), x), frame]
    elif inst.op == RIGHT:
        frame = Forall("y", _frame(machine, t, y))
        parts = [q_atom(inst.next_state, Succ(t), Succ(x)), frame]
    else:
        frame = Forall("y", _frame(machine, t, y))
        parts = [q_atom(inst.next_state, Succ(t), x), frame]

    if variant == VARIANT_S5Q and len(parts) > 1:
        cons: Formula = And(parts[0], conj(parts[1:]), PARA)
    else:
        cons = conj(parts)
    return Forall("t", Forall("x", Implies(ante, cons)))


def _initial_axiom(machine: Machine, input_symbols: list[str]) -> Formula:
    if machine.start_position < 0:
        raise PrecondError("theory emission needs a non-negative start position")
    y = Var("y")
    parts: list[Formula] = [q_atom(machine.start_state, num(0), num(machine.start_position))]
    parts += [s_atom(s, num(0), num(j)) for j, s in enumerate(input_symbols)]
    if input_symbols:
        outside = conj([Not(eq(y, num(j))) for j in range(len(input_symbols))])
        parts.append(Forall("y", Implies(outside, s_atom(machine.blank, num(0), y))))
    else:
        parts.append(Forall("y", s_atom(machine.blank, num(0), y)))
    return conj(parts)


def _no_facts(machine: Machine, t: Term, x: Term, neg: str) -> Formula:
    qs = conj([Not(q_atom(s, t, x), neg) for s in machine.states])
    ss = conj([Not(s_atom(s, t, x), neg) for s in machine.alphabet])
    return And(qs, ss)


def _before_axiom(machine: Machine) -> Formula:
    t, x = Var("t"), Var("x")
    return Forall("t", Forall("x", Implies(less(t, num(0)), _no_facts(machine, t, x, CLASSICAL))))


def _halt_axiom(machine: Machine, variant: str) -> Formula:
    t, x, u, y = Var("t"), Var("x"), Var("u"), Var("y")
    regime = PARA if variant == VARIANT_S5Q else CLASSICAL
    heads: list[tuple[str, str]] = []
    for inst in machine.instructions:
        if inst.head() not in heads:
            heads.append(inst.head())
    stuck = Forall("x", Not(disj([And(q_atom(q, t, x), s_atom(s, t, x), regime) for q, s in heads])))
    running = Exists("x", disj([q_atom(q, t, x) for q in machine.states]))
    after = Forall("u", Forall("y", Implies(less(t, u), _no_facts(machine, u, y, CLASSICAL))))
    return Forall("t", Implies(And(running, stuck), after))


def _state_unique_axiom(machine: Machine, state: str, variant: str) -> Formula:
    t, x, y = Var("t"), Var("x"), Var("y")
    neg = PARA if variant in (VARIANT_LFI1, VARIANT_S5Q) else CLASSICAL
    ante: Formula = q_atom(state, t, x)
    if variant == VARIANT_S5Q:
        ante = Possibly(ante)
    others = conj([Not(q_atom(s, t, x), neg) for s in machine.states if s != state])
    elsewhere = Forall(
        "y",
        Implies(Not(eq(y, x)), conj([Not(q_atom(s, t, y), neg) for s in machine.states])),
    )
    return Forall("t", Forall("x", Implies(ante, And(others, elsewhere))))


def _symbol_unique_axiom(machine: Machine, symbol: str, variant: str) -> Formula:
    t, x = Var("t"), Var("x")
    neg = PARA if variant in (VARIANT_LFI1, VARIANT_S5Q) else CLASSICAL
    ante: Formula = s_atom(symbol, t, x)
    if variant == VARIANT_S5Q:
        ante = Possibly(ante)
    others = conj([Not(s_atom(s, t, x), neg) for s in machine.alphabet if s != symbol])
    return Forall("t", Forall("x", Implies(ante, others)))


def emit_theory(machine: Machine, input_symbols: str | list[str], variant: str = VARIANT_FOL) -> Theory:
    """The intrinsic theory of machine-on-input, in the requested regime."""
    if variant not in VARIANTS:
        raise PrecondError(f"unknown variant {variant!r}")
    syms = list(input_symbols)
    for s in syms:
        if s not in machine.alphabet:
            raise PrecondError(f"input symbol {s!r} not in alphabet")
    axioms: list[tuple[str, Formula]] = list(_arith_axioms())
    for k in range(len(machine.instructions)):
        axioms.append((f"Ai{k+1}", _instruction_axiom(machine, k, variant)))
    axioms.append(("Aalpha", _initial_axiom(machine, syms)))
    axioms.append(("At0", _before_axiom(machine)))
    axioms.append(("Ath", _halt_axiom(machine, variant)))
    for s in machine.states:
        axioms.append((f"Aq:{s}", _state_unique_axiom(machine, s, variant)))
    for s in machine.alphabet:
        axioms.append((f"As:{s}", _symbol_unique_axiom(machine, s, variant)))
    return Theory(variant, axioms)


# ---------------------------------------------------------------------------
# Serialization


def _term_sexp(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Succ):
        return f"(succ {_term_sexp(t.sub)})"
    return str(t.value)


_TAGS = {CLASSICAL: "", PARA: "◇"}


def _formula_sexp(f: Formula) -> str:
    if isinstance(f, Pred):
        args = " ".join(_term_sexp(a) for a in f.args)
        if f.kind in ("Q", "S"):
            return f"({f.kind} {f.sel} {args})"
        return f"({f.kind} {args})"
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Not):
        return f"(not{_TAGS[f.regime]} {_formula_sexp(f.sub)})"
    if isinstance(f, And):
        return f"(and{_TAGS[f.regime]} {_formula_sexp(f.left)} {_formula_sexp(f.right)})"
    if isinstance(f, Or):
        return f"(or {_formula_sexp(f.left)} {_formula_sexp(f.right)})"
    if isinstance(f, Implies):
        return f"(implies {_formula_sexp(f.left)} {_formula_sexp(f.right)})"
    if isinstance(f, Iff):
        return f"(iff {_formula_sexp(f.left)} {_formula_sexp(f.right)})"
    if isinstance(f, Forall):
        return f"(forall {f.var} {_formula_sexp(f.body)})"
    if isinstance(f, Exists):
        return f"(exists {f.var} {_formula_sexp(f.body)})"
    if isinstance(f, Possibly):
        return f"(diamond {_formula_sexp(f.sub)})"
    if isinstance(f, Incons):
        return f"(incons {_formula_sexp(f.sub)})"
    raise TypeError(f"not a formula: {f!r}")


def _term_text(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Succ):
        return f"succ({_term_text(t.sub)})"
    return str(t.value)


def _formula_text(f: Formula) -> str:
    if isinstance(f, Pred):
        args = ", ".join(_term_text(a) for a in f.args)
        if f.kind in ("Q", "S"):
            return f"{f.kind}[{f.sel}]({args})"
        return f"{f.kind}({args})"
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Not):
        return f"not{_TAGS[f.regime]} {_formula_text(f.sub)}"
    if isinstance(f, And):
        return f"({_formula_text(f.left)} and{_TAGS[f.regime]} {_formula_text(f.right)})"
    if isinstance(f, Or):
        return f"({_formula_text(f.left)} or {_formula_text(f.right)})"
    if isinstance(f, Implies):
        return f"({_formula_text(f.left)} -> {_formula_text(f.right)})"
    if isinstance(f, Iff):
        return f"({_formula_text(f.left)} <-> {_formula_text(f.right)})"
    if isinstance(f, Forall):
        return f"forall {f.var}. {_formula_text(f.body)}"
    if isinstance(f, Exists):
        return f"exists {f.var}. {_formula_text(f.body)}"
    if isinstance(f, Possibly):
        return f"diamond {_formula_text(f.sub)}"
    if isinstance(f, Incons):
        return f"incons {_formula_text(f.sub)}"
    raise TypeError(f"not a formula: {f!r}")


def serialize_theory(theory: Theory, format: str = "sexp") -> str:
    if format == "sexp":
        lines = [f"(variant {theory.variant})"]
        lines += [f"(axiom {a} {_formula_sexp(f)})" for a, f in theory.axioms]
        return "\n".join(lines) + "\n"
    if format == "text":
        lines = [f"variant: {theory.variant}"]
        lines += [f"{a}: {_formula_text(f)}" for a, f in theory.axioms]
        return "\n".join(lines) + "\n"
    raise PrecondError(f"unknown format {format!r}")


def serialize_formula(f: Formula, format: str = "sexp") -> str:
    return _formula_sexp(f) if format == "sexp" else _formula_text(f)


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _read_sexp(tokens: list[str], pos: int):
    tok = tokens[pos]
    if tok == "(":
        out = []
        pos += 1
        while tokens[pos] != ")":
            node, pos = _read_sexp(tokens, pos)
            out.append(node)
        return out, pos + 1
    return tok, pos + 1


def _parse_term(node) -> Term:
    if isinstance(node, list):
        if node[0] != "succ" or len(node) != 2:
            raise PrecondError(f"bad term {node!r}")
        return Succ(_parse_term(node[1]))
    if node == "0":
        return Zero()
    if re.fullmatch(r"-?\d+", node):
        return IntLit(int(node))
    return Var(node)


def _parse_formula(node) -> Formula:
    if node == "true":
        return TrueF()
    if node == "false":
        return FalseF()
    if not isinstance(node, list):
        raise PrecondError(f"bad formula {node!r}")
    head = node[0]
    if head in ("Q", "S"):
        return Pred(head, node[1], tuple(_parse_term(a) for a in node[2:]))
    if head in ("less", "eq"):
        return Pred(head, None, tuple(_parse_term(a) for a in node[1:]))
    if head in ("not", "not◇"):
        return Not(_parse_formula(node[1]), PARA if head.endswith("◇") else CLASSICAL)
    if head in ("and", "and◇"):
        return And(_parse_formula(node[1]), _parse_formula(node[2]), PARA if head.endswith("◇") else CLASSICAL)
    if head == "or":
        return Or(_parse_formula(node[1]), _parse_formula(node[2]))
    if head == "implies":
        return Implies(_parse_formula(node[1]), _parse_formula(node[2]))
    if head == "iff":
        return Iff(_parse_formula(node[1]), _parse_formula(node[2]))
    if head == "forall":
        return Forall(node[1], _parse_formula(node[2]))
    if head == "exists":
        return Exists(node[1], _parse_formula(node[2]))
    if head == "diamond":
        return Possibly(_parse_formula(node[1]))
    if head == "incons":
        return Incons(_parse_formula(node[1]))
    raise PrecondError(f"unknown connective {head!r}")


def parse_theory(text: str) -> Theory:
    """Inverse of serialize_theory for the structured format."""
    variant = None
    axioms: list[tuple[str, Formula]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        tokens = _TOKEN.findall(line)
        node, _ = _read_sexp(tokens, 0)
        if not isinstance(node, list):
            raise PrecondError(f"bad theory line {line!r}")
        if node[0] == "variant":
            variant = node[1]
        elif node[0] == "axiom":
            axioms.append((node[1], _parse_formula(node[2])))
        else:
            raise PrecondError(f"bad theory line {line!r}")
    if variant is None:
        raise PrecondError("missing (variant ...) line")
    return Theory(variant, axioms)


# ---------------------------------------------------------------------------
# Ground model checking


@dataclass
class TraceModel:
    q_facts: frozenset[tuple[str, int, int]]  # (state, t, x)
    s_facts: frozenset[tuple[str, int, int]]  # (symbol, t, x)
    t_range: tuple[int, int]
    x_range: tuple[int, int]
    last_time: int
    truncated: bool

    @staticmethod
    def from_dtm_trace(machine: Machine, trace: Trace, t_pad: int = 2, x_pad: int = 2) -> "TraceModel":
        positions = {machine.start_position}
        for c in trace.steps:
            positions.add(c.pos)
            positions.update(p for p, _ in c.tape)
        x_lo, x_hi = min(positions) - x_pad, max(positions) + x_pad
        q = set()
        s = set()
        for c in trace.steps:
            q.add((c.state, c.time, c.pos))
            for x in range(x_lo, x_hi + 1):
                s.add((c.symbol_at(x, machine.blank), c.time, x))
        last = trace.steps[-1].time
        return TraceModel(
            frozenset(q), frozenset(s), (-t_pad, last + t_pad), (x_lo, x_hi), last, trace.truncated
        )

    @staticmethod
    def from_par_trace(machine: Machine, trace: ParTrace, t_pad: int = 2, x_pad: int = 2) -> "TraceModel":
        positions = {machine.start_position}
        for cfg in trace.steps:
            positions.update(p for _, p in cfg.active)
            positions.update(p for p, _ in cfg.tape)
        x_lo, x_hi = min(positions) - x_pad, max(positions) + x_pad
        q = set()
        s = set()
        for cfg in trace.steps:
            for st, p in cfg.active:
                q.add((st, cfg.time, p))
            for x in range(x_lo, x_hi + 1):
                for sym in cfg.cell(x, machine.blank):
                    s.add((sym, cfg.time, x))
        last = trace.steps[-1].time
        return TraceModel(
            frozenset(q), frozenset(s), (-t_pad, last + t_pad), (x_lo, x_hi), last, trace.truncated
        )


_TIME_VARS = {"t", "u"}
_POS_VARS = {"x", "y"}


class _Evaluator:
    def __init__(self, model: TraceModel, window: Optional[tuple[int, int, int, int]] = None):
        if window is None:
            window = (*model.t_range, *model.x_range)
        self.model = model
        t_lo, t_hi, x_lo, x_hi = window
        self.t_dom = list(range(t_lo, t_hi + 1))
        self.x_dom = list(range(x_lo, x_hi + 1))
        full = sorted(set(self.t_dom) | set(self.x_dom))
        self.full_dom = full
        # state multiplicity per time, symbol multiplicity per (time, cell)
        per_t: dict[int, int] = {}
        for _, t, _x in model.q_facts:
            per_t[t] = per_t.get(t, 0) + 1
        self.multi_state = {t for t, n in per_t.items() if n > 1}
        per_cell: dict[tuple[int, int], int] = {}
        for _, t, x in model.s_facts:
            per_cell[(t, x)] = per_cell.get((t, x), 0) + 1
        self.multi_sym = {k for k, n in per_cell.items() if n > 1}

    generic_domains = False  # arithmetic axioms quantify over untyped integers

    def domain(self, var: str, existential: bool = False) -> list[int]:
        if self.generic_domains:
            dom = self.full_dom
        elif var in _TIME_VARS:
            dom = self.t_dom
        elif var in _POS_VARS:
            dom = self.x_dom
        else:
            dom = self.full_dom
        if existential:
            return [dom[0] - 1, *dom, dom[-1] + 1]
        return dom

    def term(self, t: Term, env: dict[str, int]) -> int:
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Zero):
            return 0
        if isinstance(t, Succ):
            return self.term(t.sub, env) + 1
        return t.value

    def holds(self, f: Formula, env: dict[str, int]) -> bool:
        if isinstance(f, Pred):
            vals = [self.term(a, env) for a in f.args]
            if f.kind == "Q":
                return (f.sel, vals[0], vals[1]) in self.model.q_facts
            if f.kind == "S":
                return (f.sel, vals[0], vals[1]) in self.model.s_facts
            if f.kind == "less":
                return vals[0] < vals[1]
            return vals[0] == vals[1]
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, Not):
            return not self.holds(f.sub, env)
        if isinstance(f, And):
            return self.holds(f.left, env) and self.holds(f.right, env)
        if isinstance(f, Or):
            return self.holds(f.left, env) or self.holds(f.right, env)
        if isinstance(f, Implies):
            return (not self.holds(f.left, env)) or self.holds(f.right, env)
        if isinstance(f, Iff):
            return self.holds(f.left, env) == self.holds(f.right, env)
        if isinstance(f, Forall):
            return all(self.holds(f.body, {**env, f.var: d}) for d in self.domain(f.var))
        if isinstance(f, Exists):
            return any(
                self.holds(f.body, {**env, f.var: d}) for d in self.domain(f.var, existential=True)
            )
        if isinstance(f, Incons):
            return self._incons(f.sub, env)
        if isinstance(f, Possibly):
            raise PrecondError("ground checking handles only the classical variant")
        raise TypeError(f"not a formula: {f!r}")

    def _incons(self, f: Formula, env: dict[str, int]) -> bool:
        """Multiplicity reading of the inconsistency connective on atoms."""
        if not isinstance(f, Pred) or f.kind not in ("Q", "S"):
            raise PrecondError("inconsistency connective applies to Q/S atoms only")
        if not self.holds(f, env):
            return False
        vals = [self.term(a, env) for a in f.args]
        if f.kind == "Q":
            return vals[0] in self.multi_state
        return (vals[0], vals[1]) in self.multi_sym

    def falsify(self, f: Formula, env: dict[str, int]) -> Optional[dict[str, int]]:
        """A falsifying assignment of outer universals, or None if f holds."""
        if isinstance(f, Forall):
            for d in self.domain(f.var):
                r = self.falsify(f.body, {**env, f.var: d})
                if r is not None:
                    return r
            return None
        if isinstance(f, Implies):
            if self.holds(f.left, env):
                return self.falsify(f.right, env)
            return None
        if isinstance(f, And):
            return self.falsify(f.left, env) or self.falsify(f.right, env)
        return None if self.holds(f, env) else dict(env)


@dataclass
class SatisfactionReport:
    results: dict[str, dict]

    @property
    def all_passed(self) -> bool:
        return all(r["status"] == "pass" for r in self.results.values())

    def failures(self) -> list[str]:
        return [a for a, r in self.results.items() if r["status"] == "fail"]

    def to_json(self) -> dict:
        return self.results


def model_check_window(
    theory: Theory,
    model: TraceModel,
    window: Optional[tuple[int, int, int, int]] = None,
) -> SatisfactionReport:
    """Evaluate every axiom in the harvested structure, quantifiers
    relativized to the window.  A failure that names the final harvested
    time of a truncated trace is reported as partial, not as a failure."""
    if theory.variant != VARIANT_FOL:
        raise PrecondError("ground model checking handles only the classical variant")
    ev = _Evaluator(model, window)
    results: dict[str, dict] = {}
    arithmetic = {"A1", "A2", "A3", "A4", "A5"}
    for axiom_id, formula in theory.axioms:
        ev.generic_domains = axiom_id in arithmetic
        bad = ev.falsify(formula, {})
        if bad is None:
            results[axiom_id] = {"status": "pass"}
        elif model.truncated and any(v >= model.last_time for v in bad.values()):
            results[axiom_id] = {"status": "partial", "instance": bad}
        else:
            results[axiom_id] = {"status": "fail", "instance": bad}
    return SatisfactionReport(results)


# ---------------------------------------------------------------------------
# Contradiction witness


@dataclass
class ContradictionWitness:
    time: int  # the step after the ambiguous firing
    pos: int
    kind: str  # "state" | "symbol"
    phi: Formula
    not_phi: Formula
    premise: Formula  # the fact the uniqueness axiom is applied to
    instruction_axioms: tuple[str, str]
    uniqueness_axiom: str

    def to_json(self) -> dict:
        return {
            "t": self.time,
            "x": self.pos,
            "kind": self.kind,
            "phi": serialize_formula(self.phi),
            "not_phi": serialize_formula(self.not_phi),
            "premise": serialize_formula(self.premise),
            "instruction_axioms": list(self.instruction_axioms),
            "uniqueness_axiom": self.uniqueness_axiom,
        }


@dataclass
class WitnessSearch:
    witness: Optional[ContradictionWitness]
    truncated: bool
    trace: ParTrace


def _successor(machine: Machine, f: FiringRecord) -> tuple[str, int, Optional[str]]:
    inst = machine.instructions[f.inst]
    if inst.op == WRITE:
        return inst.next_state, f.pos, inst.write_symbol
    if inst.op == RIGHT:
        return inst.next_state, f.pos + 1, None
    return inst.next_state, f.pos - 1, None


def _build_witness(machine: Machine, t: int, f1: FiringRecord, f2: FiringRecord) -> Optional[ContradictionWitness]:
    s1, p1, w1 = _successor(machine, f1)
    s2, p2, w2 = _successor(machine, f2)
    axioms = (f"Ai{f1.inst + 1}", f"Ai{f2.inst + 1}")
    if (s1, p1) != (s2, p2):
        phi = q_atom(s1, num(t + 1), num(p1))
        premise = q_atom(s2, num(t + 1), num(p2))
        return ContradictionWitness(
            time=t + 1,
            pos=p1,
            kind="state",
            phi=phi,
            not_phi=Not(phi),
            premise=premise,
            instruction_axioms=axioms,
            uniqueness_axiom=f"Aq:{s2}",
        )
    if w1 is not None and w2 is not None and w1 != w2:
        phi = s_atom(w1, num(t + 1), num(f1.pos))
        premise = s_atom(w2, num(t + 1), num(f2.pos))
        return ContradictionWitness(
            time=t + 1,
            pos=f1.pos,
            kind="symbol",
            phi=phi,
            not_phi=Not(phi),
            premise=premise,
            instruction_axioms=axioms,
            uniqueness_axiom=f"As:{w2}",
        )
    return None


def search_contradiction(machine: Machine, input_symbols: str | list[str], max_steps: int) -> WitnessSearch:
    """Run the multiplicity engine and certify the first genuinely ambiguous
    firing: two unmarked instructions fired from one (state, position, symbol)
    occurrence with diverging effects."""
    trace = partm_run(machine, input_symbols, max_steps)
    for t, recs in enumerate(trace.firings):
        groups: dict[tuple[str, int, str], list[FiringRecord]] = {}
        for f in recs:
            if machine.instructions[f.inst].marked:
                continue
            groups.setdefault((f.state, f.pos, f.symbol), []).append(f)
        for key in sorted(groups):
            group = sorted(groups[key], key=lambda f: f.inst)
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    w = _build_witness(machine, t, group[i], group[j])
                    if w is not None:
                        return WitnessSearch(w, truncated=False, trace=trace)
    return WitnessSearch(None, truncated=trace.truncated, trace=trace)


def contradiction_witness(
    machine: Machine, input_symbols: str | list[str], max_steps: int
) -> Optional[ContradictionWitness]:
    return search_contradiction(machine, input_symbols, max_steps).witness


def certify_witness(witness: ContradictionWitness, model: TraceModel) -> bool:
    """Both members against the harvested structure: the positive atom holds
    directly, its negation via the uniqueness axiom applied to the premise."""
    ev = _Evaluator(model)
    return ev.holds(witness.phi, {}) and ev.holds(witness.premise, {}) and witness.phi != witness.premise
