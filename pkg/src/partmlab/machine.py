"""Machine data model, text DSL parser, and static validation.

A machine is described by a small line-oriented DSL (``#`` starts a comment):

    machine <name>
    states: <id> <id> ...
    symbols: <id> <id> ...
    blank: <id>
    start: <state> @ <int>
    accept: <id>          # optional
    reject: <id>          # optional
    inst: <state>[^] <symbol>[^] -> ( write <symbol> | right | left ) , <state>

Instructions are quadruples: in state S scanning symbol Y, either write a
symbol, move right, or move left, then enter the next state.  A ``^`` suffix
on the head state or scanned symbol marks an inconsistency condition: the
instruction fires only in configurations exhibiting multiplicity (multiple
simultaneous states/positions for a state mark, multiple symbols in the
scanned cell for a symbol mark).  Cell indices are signed; the tape is
bi-infinite.

Identifiers may not contain whitespace, ``#``, ``,`` or ``^``.  Instruction
order is preserved and used as the canonical tie-break order everywhere
downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

WRITE = "write"
LEFT = "left"
RIGHT = "right"

_RESERVED = {"->", ",", "@"}


class DslError(ValueError):
    """Syntax or declaration error in a machine description."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}" if line else message)


@dataclass(frozen=True)
class Instruction:
    state: str
    symbol: str
    op: str  # WRITE | LEFT | RIGHT
    next_state: str
    write_symbol: Optional[str] = None
    state_marked: bool = False
    symbol_marked: bool = False

    def head(self) -> tuple[str, str]:
        return (self.state, self.symbol)

    @property
    def marked(self) -> bool:
        return self.state_marked or self.symbol_marked


@dataclass(frozen=True)
class Machine:
    name: str
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    blank: str
    instructions: tuple[Instruction, ...]
    start_state: str
    start_position: int = 0
    accept_state: Optional[str] = None
    reject_state: Optional[str] = None

    def instruction_lookup(self) -> dict[tuple[str, str], tuple[int, ...]]:
        """Head pair -> instruction indices in declaration order (marks ignored)."""
        table: dict[tuple[str, str], list[int]] = {}
        for i, inst in enumerate(self.instructions):
            table.setdefault(inst.head(), []).append(i)
        return {k: tuple(v) for k, v in table.items()}

    def uses_marks(self) -> bool:
        return any(inst.marked for inst in self.instructions)


@dataclass
class ValidationReport:
    deterministic: bool
    ambiguous_groups: list[tuple[int, ...]]
    uses_incons_marks: bool
    undeclared_refs: list[str] = field(default_factory=list)


def validate(machine: Machine) -> ValidationReport:
    """Static analysis: determinism, head ambiguity, undeclared identifiers.

    Ambiguity groups cover unmarked instructions only: a marked instruction
    never fires in a classical configuration, so it is not a source of
    classical ambiguity (marks make the machine nondeterministic by
    themselves, via the separate flag)."""
    groups: dict[tuple[str, str], list[int]] = {}
    for i, inst in enumerate(machine.instructions):
        if not inst.marked:
            groups.setdefault(inst.head(), []).append(i)
    ambiguous = [tuple(v) for _, v in sorted(groups.items()) if len(v) >= 2]
    marks = machine.uses_marks()

    undeclared: list[str] = []
    states = set(machine.states)
    alphabet = set(machine.alphabet)
    if machine.start_state not in states:
        undeclared.append(f"start state {machine.start_state!r} not declared")
    if machine.blank not in alphabet:
        undeclared.append(f"blank symbol {machine.blank!r} not declared")
    for opt, label in ((machine.accept_state, "accept"), (machine.reject_state, "reject")):
        if opt is not None and opt not in states:
            undeclared.append(f"{label} state {opt!r} not declared")
    for i, inst in enumerate(machine.instructions):
        if inst.state not in states:
            undeclared.append(f"instruction {i}: state {inst.state!r} not declared")
        if inst.next_state not in states:
            undeclared.append(f"instruction {i}: state {inst.next_state!r} not declared")
        if inst.symbol not in alphabet:
            undeclared.append(f"instruction {i}: symbol {inst.symbol!r} not declared")
        if inst.op == WRITE and inst.write_symbol not in alphabet:
            undeclared.append(f"instruction {i}: symbol {inst.write_symbol!r} not declared")

    return ValidationReport(
        deterministic=not ambiguous and not marks,
        ambiguous_groups=ambiguous,
        uses_incons_marks=marks,
        undeclared_refs=undeclared,
    )


def _check_ident(tok: str, line: int, col: int, what: str) -> str:
    if not tok or tok in _RESERVED or "^" in tok or "#" in tok or "," in tok:
        raise DslError(f"invalid {what} {tok!r}", line, col)
    return tok


def _tokenize(line: str) -> list[tuple[str, int]]:
    text = line.split("#", 1)[0]
    # commas and arrows separate tokens even without surrounding spaces
    for sep in (",", "->"):
        text = text.replace(sep, f" {sep} ")
    toks: list[tuple[str, int]] = []
    col = 0
    for raw in text.split(" "):
        if raw.strip():
            toks.append((raw.strip(), line.find(raw.strip(), col) + 1))
        col += len(raw) + 1
    return toks


def parse_machine(text: str) -> Machine:
    """Parse a DSL source into a Machine; raises DslError with line/column."""
    name = None
    states: list[str] = []
    alphabet: list[str] = []
    blank = None
    start_state = None
    start_position = 0
    accept = None
    reject = None
    instructions: list[Instruction] = []
    seen_states: set[str] = set()
    seen_symbols: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokenize(raw)
        if not toks:
            continue
        key, kcol = toks[0]
        rest = toks[1:]

        if key == "machine":
            if len(rest) != 1:
                raise DslError("expected: machine <name>", lineno, kcol)
            name = _check_ident(rest[0][0], lineno, rest[0][1], "machine name")
        elif key == "states:":
            for tok, col in rest:
                tok = _check_ident(tok, lineno, col, "state")
                if tok in seen_states:
                    raise DslError(f"duplicate state declaration {tok!r}", lineno, col)
                seen_states.add(tok)
                states.append(tok)
        elif key == "symbols:":
            for tok, col in rest:
                tok = _check_ident(tok, lineno, col, "symbol")
                if tok in seen_symbols:
                    raise DslError(f"duplicate symbol declaration {tok!r}", lineno, col)
                seen_symbols.add(tok)
                alphabet.append(tok)
        elif key == "blank:":
            if len(rest) != 1:
                raise DslError("expected: blank: <symbol>", lineno, kcol)
            blank = rest[0][0]
            if blank not in seen_symbols:
                raise DslError(f"undeclared blank symbol {blank!r}", lineno, rest[0][1])
        elif key == "start:":
            if len(rest) != 3 or rest[1][0] != "@":
                raise DslError("expected: start: <state> @ <int>", lineno, kcol)
            start_state = rest[0][0]
            if start_state not in seen_states:
                raise DslError(f"undeclared state {start_state!r}", lineno, rest[0][1])
            try:
                start_position = int(rest[2][0])
            except ValueError:
                raise DslError(f"bad start position {rest[2][0]!r}", lineno, rest[2][1])
        elif key in ("accept:", "reject:"):
            if len(rest) != 1:
                raise DslError(f"expected: {key} <state>", lineno, kcol)
            tok, col = rest[0]
            if tok not in seen_states:
                raise DslError(f"undeclared state {tok!r}", lineno, col)
            if key == "accept:":
                accept = tok
            else:
                reject = tok
        elif key == "inst:":
            instructions.append(_parse_inst(rest, lineno, kcol, seen_states, seen_symbols))
        else:
            raise DslError(f"unknown directive {key!r}", lineno, kcol)

    if name is None:
        raise DslError("missing 'machine <name>' line", 1, 1)
    if blank is None:
        raise DslError("missing 'blank:' line", 1, 1)
    if start_state is None:
        raise DslError("missing 'start:' line", 1, 1)
    if accept is not None and accept == reject:
        raise DslError(f"accept and reject states coincide ({accept!r})", 1, 1)
    return Machine(
        name=name,
        states=tuple(states),
        alphabet=tuple(alphabet),
        blank=blank,
        instructions=tuple(instructions),
        start_state=start_state,
        start_position=start_position,
        accept_state=accept,
        reject_state=reject,
    )


def _strip_mark(tok: str) -> tuple[str, bool]:
    if tok.endswith("^"):
        return tok[:-1], True
    return tok, False


def _parse_inst(rest, lineno, kcol, seen_states, seen_symbols) -> Instruction:
    # <state>[^] <symbol>[^] -> (write <symbol> | right | left) , <state>
    toks = [t for t, _ in rest]
    cols = [c for _, c in rest]
    if len(toks) < 6 or toks[2] != "->":
        raise DslError("expected: inst: <state>[^] <symbol>[^] -> <action> , <state>", lineno, kcol)
    state, smark = _strip_mark(toks[0])
    symbol, ymark = _strip_mark(toks[1])
    if state not in seen_states:
        raise DslError(f"undeclared state {state!r}", lineno, cols[0])
    if symbol not in seen_symbols:
        raise DslError(f"undeclared symbol {symbol!r}", lineno, cols[1])
    action = toks[3]
    if action == WRITE:
        if len(toks) != 7 or toks[5] != ",":
            raise DslError("expected: write <symbol> , <state>", lineno, cols[3])
        wsym, nxt, ncol = toks[4], toks[6], cols[6]
        if wsym not in seen_symbols:
            raise DslError(f"undeclared symbol {wsym!r}", lineno, cols[4])
    elif action in (RIGHT, LEFT):
        if len(toks) != 6 or toks[4] != ",":
            raise DslError(f"expected: {action} , <state>", lineno, cols[3])
        wsym, nxt, ncol = None, toks[5], cols[5]
    else:
        raise DslError(f"unknown action {action!r}", lineno, cols[3])
    if nxt not in seen_states:
        raise DslError(f"undeclared state {nxt!r}", lineno, ncol)
    return Instruction(
        state=state,
        symbol=symbol,
        op=action,
        next_state=nxt,
        write_symbol=wsym,
        state_marked=smark,
        symbol_marked=ymark,
    )


def serialize_machine(machine: Machine) -> str:
    """Canonical DSL form; parse(serialize(m)) is structurally equal to m."""
    lines = [f"machine {machine.name}"]
    lines.append("states: " + " ".join(machine.states))
    lines.append("symbols: " + " ".join(machine.alphabet))
    lines.append(f"blank: {machine.blank}")
    lines.append(f"start: {machine.start_state} @ {machine.start_position}")
    if machine.accept_state is not None:
        lines.append(f"accept: {machine.accept_state}")
    if machine.reject_state is not None:
        lines.append(f"reject: {machine.reject_state}")
    for inst in machine.instructions:
        head = inst.state + ("^" if inst.state_marked else "")
        scan = inst.symbol + ("^" if inst.symbol_marked else "")
        if inst.op == WRITE:
            action = f"write {inst.write_symbol}"
        else:
            action = inst.op
        lines.append(f"inst: {head} {scan} -> {action} , {inst.next_state}")
    return "\n".join(lines) + "\n"


def make_machine(
    name: str,
    states: Iterable[str],
    alphabet: Iterable[str],
    blank: str,
    instructions: Iterable[Instruction],
    start_state: str,
    start_position: int = 0,
    accept_state: Optional[str] = None,
    reject_state: Optional[str] = None,
) -> Machine:
    """Build a Machine programmatically and fail fast on undeclared identifiers."""
    m = Machine(
        name=name,
        states=tuple(states),
        alphabet=tuple(alphabet),
        blank=blank,
        instructions=tuple(instructions),
        start_state=start_state,
        start_position=start_position,
        accept_state=accept_state,
        reject_state=reject_state,
    )
    report = validate(m)
    if report.undeclared_refs:
        raise DslError("; ".join(report.undeclared_refs))
    return m
