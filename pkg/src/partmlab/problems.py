"""Machine builders for the demo problems.

Oracles are machine fragments with a fixed calling convention: input bits on
cells 0..n-1, the result bit written at cell n, and the fragment halting in
its exit state with the head on the result cell.  The Deutsch and
Deutsch-Jozsa builders splice an oracle between a superposing prefix and a
multiplicity test of the result cell; the CSAT compiler pairs an ambiguous
guessing prefix with an oblivious clause evaluator and the accepting/rejecting
amplification instructions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Optional

from .classical import dtm_run, ndtm_run_all
from .epartm import EpTrace, epartm_acceptance, epartm_run
from .errors import PrecondError
from .machine import Instruction, LEFT, Machine, RIGHT, WRITE, make_machine, validate
from .partm import ParConfig, ParTrace, freeze_cells, partm_run, partm_run_from

BIT0, BIT1, BLANK, MARKER = "0", "1", "_", "*"


# ---------------------------------------------------------------------------
# Oracle fragments


@dataclass(frozen=True)
class OracleFragment:
    name: str
    machine: Machine  # start state = entry, head starts at cell 0
    entry_state: str
    exit_state: str
    arity: int

    @property
    def result_cell(self) -> int:
        return self.arity


def _fragment(name: str, states, instructions, entry, exit_state, arity) -> OracleFragment:
    machine = make_machine(
        name=name,
        states=states,
        alphabet=(BIT0, BIT1, BLANK),
        blank=BLANK,
        instructions=instructions,
        start_state=entry,
        start_position=0,
    )
    return OracleFragment(name, machine, entry, exit_state, arity)


def _wr(state, symbol, write, nxt, **kw) -> Instruction:
    return Instruction(state, symbol, WRITE, nxt, write_symbol=write, **kw)


def _mv(state, symbol, op, nxt) -> Instruction:
    return Instruction(state, symbol, op, nxt)


def constant_oracle(n: int, bit: int) -> OracleFragment:
    """f(x) = bit for all x."""
    insts = [
        _mv("e", BIT0, RIGHT, "c"),
        _mv("e", BIT1, RIGHT, "c"),
        _mv("c", BIT0, RIGHT, "c"),
        _mv("c", BIT1, RIGHT, "c"),
        _wr("c", BLANK, str(bit), "x"),
    ]
    if n == 1:
        # entry already sits next to the result cell: write straight away
        insts = [
            _mv("e", BIT0, RIGHT, "c"),
            _mv("e", BIT1, RIGHT, "c"),
            _wr("c", BLANK, str(bit), "x"),
        ]
    return _fragment(f"const{bit}", ("e", "c", "x"), insts, "e", "x", n)


def projection_oracle(n: int, k: int, negate: bool = False) -> OracleFragment:
    """f(x) = x_k (or its negation); 0-based k < n."""
    if not 0 <= k < n:
        raise PrecondError(f"projection index {k} out of range for arity {n}")
    states = [f"w{j}" for j in range(k + 1)] + ["c0", "c1", "x"]
    insts: list[Instruction] = []
    for j in range(k):
        insts += [_mv(f"w{j}", BIT0, RIGHT, f"w{j+1}"), _mv(f"w{j}", BIT1, RIGHT, f"w{j+1}")]
    lo, hi = ("1", "0") if negate else ("0", "1")
    insts += [_mv(f"w{k}", BIT0, RIGHT, "c0"), _mv(f"w{k}", BIT1, RIGHT, "c1")]
    for b, out in (("0", lo), ("1", hi)):
        insts += [
            _mv(f"c{b}", BIT0, RIGHT, f"c{b}"),
            _mv(f"c{b}", BIT1, RIGHT, f"c{b}"),
            _wr(f"c{b}", BLANK, out, "x"),
        ]
    name = f"{'neg' if negate else 'proj'}{k}"
    return _fragment(name, states, insts, "w0", "x", n)


def negation_oracle(n: int, k: int) -> OracleFragment:
    return projection_oracle(n, k, negate=True)


def _fold_oracle(n: int, name: str, init: int, combine: Callable[[int, int], int]) -> OracleFragment:
    """Read all n bits left to right, folding them into one accumulator bit."""
    states = [f"r{j}_{v}" for j in range(n) for v in (0, 1)] + ["f0", "f1", "x"]
    insts: list[Instruction] = []
    for j in range(n):
        for v in (0, 1):
            for b in (0, 1):
                nxt = f"f{combine(v, b)}" if j == n - 1 else f"r{j+1}_{combine(v, b)}"
                insts.append(_mv(f"r{j}_{v}", str(b), RIGHT, nxt))
    for v in (0, 1):
        insts.append(_wr(f"f{v}", BLANK, str(v), "x"))
    return _fragment(name, states, insts, f"r0_{init}", "x", n)


def and_oracle(n: int) -> OracleFragment:
    return _fold_oracle(n, "and", 1, lambda a, b: a & b)


def or_oracle(n: int) -> OracleFragment:
    return _fold_oracle(n, "or", 0, lambda a, b: a | b)


def xor_oracle(n: int) -> OracleFragment:
    return _fold_oracle(n, "xor", 0, lambda a, b: a ^ b)


def oracle_templates(n: int) -> list[OracleFragment]:
    """The bundled parallelizable templates for arity n."""
    out = [constant_oracle(n, 0), constant_oracle(n, 1)]
    for k in range(n):
        out.append(projection_oracle(n, k))
        out.append(negation_oracle(n, k))
    if n >= 2:
        out += [and_oracle(n), or_oracle(n), xor_oracle(n)]
    return out


def oracle_by_name(name: str, n: int) -> OracleFragment:
    if name == "const0":
        return constant_oracle(n, 0)
    if name == "const1":
        return constant_oracle(n, 1)
    if name in ("id", "identity"):
        return projection_oracle(n, 0)
    if name in ("neg", "negation"):
        return negation_oracle(n, 0)
    if name.startswith("proj"):
        return projection_oracle(n, int(name[4:] or 0))
    if name.startswith("negproj"):
        return negation_oracle(n, int(name[7:] or 0))
    if name == "and":
        return and_oracle(n)
    if name == "or":
        return or_oracle(n)
    if name == "xor":
        return xor_oracle(n)
    if name == "anomaly":
        from .fixtures import ANOMALY

        if n != 1:
            raise PrecondError("the anomaly oracle has arity 1")
        return OracleFragment("anomaly", ANOMALY, "q1", "q4", 1)
    raise PrecondError(f"unknown oracle {name!r}")


def classical_table(oracle: OracleFragment, max_steps: int = 10_000) -> dict[tuple[int, ...], set[str]]:
    """Result-cell symbols of each classical run, keyed by input bits."""
    table: dict[tuple[int, ...], set[str]] = {}
    det = validate(oracle.machine).deterministic
    for bits in product((0, 1), repeat=oracle.arity):
        word = "".join(str(b) for b in bits)
        if det:
            trace = dtm_run(oracle.machine, word, max_steps)
            if not trace.halted:
                raise PrecondError(f"oracle {oracle.name} did not halt on {word!r}")
            finals = [trace.final]
        else:
            tree = ndtm_run_all(oracle.machine, word, max_steps)
            if tree.truncated:
                raise PrecondError(f"oracle {oracle.name} did not halt on {word!r}")
            finals = tree.leaves()
        table[bits] = {c.symbol_at(oracle.result_cell, oracle.machine.blank) for c in finals}
    return table


def check_oracle_contract(oracle: OracleFragment, max_steps: int = 10_000) -> None:
    """Verify the calling convention on every classical input; raises on breach."""
    if oracle.machine.uses_marks():
        raise PrecondError(f"oracle {oracle.name} carries inconsistency marks")
    det = validate(oracle.machine).deterministic
    for bits in product((0, 1), repeat=oracle.arity):
        word = "".join(str(b) for b in bits)
        finals = (
            [dtm_run(oracle.machine, word, max_steps).final]
            if det
            else ndtm_run_all(oracle.machine, word, max_steps).leaves()
        )
        for c in finals:
            if c.state != oracle.exit_state:
                raise PrecondError(f"oracle {oracle.name} halts in {c.state}, not its exit state")
            if c.pos != oracle.result_cell:
                raise PrecondError(f"oracle {oracle.name} halts at cell {c.pos}, not the result cell")
            if c.symbol_at(oracle.result_cell, oracle.machine.blank) not in (BIT0, BIT1):
                raise PrecondError(f"oracle {oracle.name} left no bit on the result cell")


# ---------------------------------------------------------------------------
# Deutsch / Deutsch-Jozsa


def _renamed_oracle(oracle: OracleFragment) -> tuple[list[str], list[Instruction], str, str, list[str]]:
    """Oracle states/instructions with fresh state names and unified symbols."""
    smap = {s: f"o{i+1}" for i, s in enumerate(oracle.machine.states)}
    if BLANK in oracle.machine.alphabet and oracle.machine.blank != BLANK:
        raise PrecondError(f"oracle {oracle.name} uses {BLANK!r} as a non-blank symbol")
    ymap = {oracle.machine.blank: BLANK}
    if MARKER in oracle.machine.alphabet and oracle.machine.blank != MARKER:
        ymap[MARKER] = "o" + MARKER
    insts = [
        Instruction(
            state=smap[i.state],
            symbol=ymap.get(i.symbol, i.symbol),
            op=i.op,
            next_state=smap[i.next_state],
            write_symbol=None if i.write_symbol is None else ymap.get(i.write_symbol, i.write_symbol),
            state_marked=i.state_marked,
            symbol_marked=i.symbol_marked,
        )
        for i in oracle.machine.instructions
    ]
    extra = [
        ymap.get(y, y)
        for y in oracle.machine.alphabet
        if ymap.get(y, y) not in (BIT0, BIT1, BLANK, MARKER)
    ]
    return [smap[s] for s in oracle.machine.states], insts, smap[oracle.entry_state], smap[oracle.exit_state], extra


def _test_tail(exit_state: str) -> list[Instruction]:
    """Multiplicity test of the result cell: 0 means constant, 1 means not."""
    return [
        _wr(exit_state, BIT0, BIT0, "t1"),
        _wr(exit_state, BIT1, BIT0, "t1"),
        _wr(exit_state, BIT1, MARKER, "t1", symbol_marked=True),
        _wr("t1", MARKER, BIT1, "t1"),
    ]


def build_deutsch(oracle: OracleFragment) -> Machine:
    """Superpose cell 0, run the oracle once, multiplicity-test cell 1."""
    if oracle.arity != 1:
        raise PrecondError(f"Deutsch oracle must have arity 1, got {oracle.arity}")
    ostates, oinsts, entry, exit_state, extra = _renamed_oracle(oracle)
    instructions = [
        _wr("q1", BIT0, BIT0, entry),
        _wr("q1", BIT0, BIT1, entry),
        *oinsts,
        *_test_tail(exit_state),
    ]
    return make_machine(
        name=f"deutsch_{oracle.name}",
        states=["q1", *ostates, "t1"],
        alphabet=[BIT0, BIT1, *extra, MARKER, BLANK],
        blank=BLANK,
        instructions=instructions,
        start_state="q1",
        start_position=0,
    )


def build_deutsch_jozsa(n: int, oracle: OracleFragment) -> Machine:
    """Superpose cells 0..n-1, return the head, run the oracle, test cell n."""
    if n < 1:
        raise PrecondError("arity must be at least 1")
    if oracle.arity != n:
        raise PrecondError(f"oracle arity {oracle.arity} does not match n={n}")
    if n == 1:
        m = build_deutsch(oracle)
        return Machine(**{**m.__dict__, "name": f"dj1_{oracle.name}"})
    ostates, oinsts, entry, exit_state, extra = _renamed_oracle(oracle)
    instructions = [
        # superposing walker: writes fork into a dead state, the walker moves on
        _wr("q1", BIT0, BIT0, "d"),
        _wr("q1", BIT0, BIT1, "d"),
        _mv("q1", BIT0, RIGHT, "q1"),
        _mv("q1", BLANK, LEFT, "b"),
        _mv("b", BIT0, LEFT, "b"),
        _mv("b", BLANK, RIGHT, entry),
        *oinsts,
        *_test_tail(exit_state),
    ]
    return make_machine(
        name=f"dj{n}_{oracle.name}",
        states=["q1", "d", "b", *ostates, "t1"],
        alphabet=[BIT0, BIT1, *extra, MARKER, BLANK],
        blank=BLANK,
        instructions=instructions,
        start_state="q1",
        start_position=0,
    )


def run_deutsch(machine: Machine, n: int, max_steps: int = 500) -> tuple[int, ParTrace]:
    """Execute a Deutsch/DJ machine on n zeros; verdict 1 iff multiplicity found."""
    trace = partm_run(machine, BIT0 * n, max_steps)
    if not trace.halted:
        raise PrecondError("Deutsch machine did not halt within budget")
    verdict = 1 if BIT1 in trace.final.cell(n, machine.blank) else 0
    return verdict, trace


def entry_times(trace: ParTrace, entry_state: str) -> list[int]:
    """Time steps at which the oracle entry state is active."""
    return [
        cfg.time for cfg in trace.steps if any(s == entry_state for s, _ in cfg.active)
    ]


def spliced_entry_state(machine: Machine, oracle: OracleFragment) -> str:
    return f"o{oracle.machine.states.index(oracle.entry_state) + 1}"


def brute_force_classification(oracle: OracleFragment) -> str:
    """'constant' or 'non-constant', from the oracle's classical truth table."""
    table = classical_table(oracle)
    values = set()
    for syms in table.values():
        if len(syms) != 1:
            raise PrecondError(f"oracle {oracle.name} is not single-valued classically")
        values |= syms
    return "constant" if len(values) == 1 else "non-constant"


# ---------------------------------------------------------------------------
# Parallelizability


@dataclass
class ParallelizabilityReport:
    parallelizable: bool
    partm_symbols: set[str]
    classical_symbols: set[str]
    partm_states: set[str]
    classical_states: set[str]

    @property
    def spurious_symbols(self) -> set[str]:
        return self.partm_symbols - self.classical_symbols

    @property
    def spurious_states(self) -> set[str]:
        return self.partm_states - self.classical_states

    def to_json(self) -> dict:
        return {
            "parallelizable": self.parallelizable,
            "partm_symbols": sorted(self.partm_symbols),
            "classical_symbols": sorted(self.classical_symbols),
            "partm_states": sorted(self.partm_states),
            "classical_states": sorted(self.classical_states),
            "spurious_symbols": sorted(self.spurious_symbols),
            "spurious_states": sorted(self.spurious_states),
        }


def check_parallelizable(oracle: OracleFragment, n: int, max_steps: int = 10_000) -> ParallelizabilityReport:
    """Compare the run on the fully superposed input with the union of the
    classical runs over {0,1}^n (final result-cell symbols and final states)."""
    if oracle.arity != n:
        raise PrecondError(f"oracle arity {oracle.arity} does not match n={n}")
    machine = oracle.machine
    start = ParConfig(
        time=0,
        active=frozenset(((oracle.entry_state, 0),)),
        tape=freeze_cells({j: (BIT0, BIT1) for j in range(n)}, machine.blank),
    )
    par = partm_run_from(machine, start, max_steps)
    if not par.halted:
        raise PrecondError(f"oracle {oracle.name} did not halt on the superposed input")
    par_syms = set(par.final.cell(oracle.result_cell, machine.blank))
    par_states = {s for s, _ in par.final.active}

    cls_syms: set[str] = set()
    cls_states: set[str] = set()
    det = validate(machine).deterministic
    for bits in product((0, 1), repeat=n):
        word = "".join(str(b) for b in bits)
        if det:
            finals = [dtm_run(machine, word, max_steps).final]
        else:
            tree = ndtm_run_all(machine, word, max_steps)
            if tree.truncated:
                raise PrecondError(f"oracle {oracle.name} did not halt on {word!r}")
            finals = tree.leaves()
        for c in finals:
            cls_syms.add(c.symbol_at(oracle.result_cell, machine.blank))
            cls_states.add(c.state)
    return ParallelizabilityReport(
        parallelizable=(par_syms == cls_syms and par_states == cls_states),
        partm_symbols=par_syms,
        classical_symbols=cls_syms,
        partm_states=par_states,
        classical_states=cls_states,
    )


# ---------------------------------------------------------------------------
# CSAT


@dataclass(frozen=True)
class CNF:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.clauses:
            raise PrecondError("a CNF needs at least one clause")
        for clause in self.clauses:
            if not clause:
                raise PrecondError("empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise PrecondError(f"literal {lit} out of range 1..{self.num_vars}")


def parse_dimacs(text: str) -> CNF:
    num_vars = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise PrecondError(f"bad DIMACS header {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if num_vars is None:
        raise PrecondError("missing DIMACS 'p cnf' header")
    return CNF(num_vars, tuple(clauses))


def to_dimacs(cnf: CNF) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    lines += [" ".join(str(l) for l in clause) + " 0" for clause in cnf.clauses]
    return "\n".join(lines) + "\n"


def eval_cnf(cnf: CNF, assignment: tuple[int, ...]) -> bool:
    return all(
        any(assignment[abs(l) - 1] == (1 if l > 0 else 0) for l in clause)
        for clause in cnf.clauses
    )


def brute_force_satisfiable(cnf: CNF) -> bool:
    return any(eval_cnf(cnf, a) for a in product((0, 1), repeat=cnf.num_vars))


def _lit_matches(clause: tuple[int, ...], var0: int, bit: int) -> bool:
    want = var0 + 1
    return any(l == want and bit == 1 or l == -want and bit == 0 for l in clause)


def build_cnf_evaluator(cnf: CNF, name: str = "cnf_eval") -> Machine:
    """Deterministic oblivious evaluator over an assignment written on cells
    0..v-1: per clause, one left-to-right sweep and a return walk; lands in
    qy/qn at cell 0 after a fixed number of steps independent of the bits."""
    v, cls = cnf.num_vars, cnf.clauses
    states: list[str] = []
    insts: list[Instruction] = []

    def fwd(c, j, s, o):
        return f"f{c}_{j}_{int(s)}{int(o)}"

    def turn(c, s, o):
        return f"t{c}_{int(s)}{int(o)}"

    def back(c, j, o):
        return f"bk{c}_{j}_{int(o)}"

    def next_start(c, o):
        return fwd(c, 0, False, o) if c < len(cls) else f"land{int(o)}"

    for c, clause in enumerate(cls):
        for j in range(v):
            for s in (False, True):
                for o in (False, True):
                    states.append(fwd(c, j, s, o))
                    for bit in (0, 1):
                        s2 = s or _lit_matches(clause, j, bit)
                        nxt = fwd(c, j + 1, s2, o) if j < v - 1 else turn(c, s2, o)
                        insts.append(_mv(fwd(c, j, s, o), str(bit), RIGHT, nxt))
        for s in (False, True):
            for o in (False, True):
                states.append(turn(c, s, o))
                o2 = o and s
                tgt = back(c, v - 1, o2) if v >= 2 else next_start(c + 1, o2)
                insts.append(_mv(turn(c, s, o), BLANK, LEFT, tgt))
        for j in range(v - 1, 0, -1):
            for o in (False, True):
                states.append(back(c, j, o))
                tgt = back(c, j - 1, o) if j >= 2 else next_start(c + 1, o)
                for bit in (0, 1):
                    insts.append(_mv(back(c, j, o), str(bit), LEFT, tgt))
    for o in (False, True):
        states.append(f"land{int(o)}")
        verdict = "qy" if o else "qn"
        for bit in (0, 1):
            insts.append(_wr(f"land{int(o)}", str(bit), str(bit), verdict))
    states += ["qy", "qn"]
    return make_machine(
        name=name,
        states=states,
        alphabet=(BIT0, BIT1, BLANK),
        blank=BLANK,
        instructions=insts,
        start_state=fwd(0, 0, False, True),
        start_position=0,
        accept_state="qy",
        reject_state="qn",
    )


def csat_compile(cnf: CNF, amplify: bool = True) -> Machine:
    """Guess every assignment via ambiguous writes, evaluate obliviously, then
    (optionally) amplify the verdict with the marked instruction families."""
    v = cnf.num_vars
    evaluator = build_cnf_evaluator(cnf)
    states = [f"g{j}" for j in range(v)] + [f"h{j}" for j in range(v)] + ["rt"]
    states += [f"r{j}" for j in range(v - 1, 0, -1)]
    insts: list[Instruction] = []
    for j in range(v):
        insts.append(_wr(f"g{j}", BLANK, BIT0, f"h{j}"))
        insts.append(_wr(f"g{j}", BLANK, BIT1, f"h{j}"))
        nxt = f"g{j+1}" if j < v - 1 else "rt"
        for bit in (0, 1):
            insts.append(_mv(f"h{j}", str(bit), RIGHT, nxt))
    eval_start = evaluator.start_state
    tgt = f"r{v-1}" if v >= 2 else eval_start
    insts.append(_mv("rt", BLANK, LEFT, tgt))
    for j in range(v - 1, 0, -1):
        tgt = f"r{j-1}" if j >= 2 else eval_start
        for bit in (0, 1):
            insts.append(_mv(f"r{j}", str(bit), LEFT, tgt))
    insts += list(evaluator.instructions)
    states += list(evaluator.states)
    if amplify:
        for sym in (BIT0, BIT1, BLANK):
            insts.append(_wr("qy", sym, sym, "qy", state_marked=True))
            insts.append(_wr("qn", sym, sym, "qy", state_marked=True))
    return make_machine(
        name="csat",
        states=states,
        alphabet=(BIT0, BIT1, BLANK),
        blank=BLANK,
        instructions=insts,
        start_state="g0",
        start_position=0,
        accept_state="qy",
        reject_state="qn",
    )


def csat_phase3_time(cnf: CNF) -> int:
    """Uniform depth at which every path lands in qy/qn at cell 0."""
    v, c = cnf.num_vars, len(cnf.clauses)
    return 3 * v + 2 * v * c + 1


def run_csat(cnf: CNF, max_steps: Optional[int] = None) -> tuple[bool, EpTrace]:
    machine = csat_compile(cnf)
    budget = (csat_phase3_time(cnf) + 4) if max_steps is None else max_steps
    trace = epartm_run(machine, "", budget)
    if not trace.halted:
        raise PrecondError("CSAT machine did not halt within budget")
    frac = epartm_acceptance(trace.final, machine)
    if frac.m not in (0, frac.n):
        raise PrecondError(f"CSAT verdict is mixed: {frac.m}/{frac.n}")
    return frac.m == frac.n, trace
