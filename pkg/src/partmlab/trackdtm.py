"""Compilation of a multiplicity machine into a deterministic single-head
machine over a tracked alphabet, with decoding and step accounting.

The tape alphabet is a tuple of 2n+m binary tracks (n = source states,
m = source symbols) plus a delimiter flag: tracks 1..n mark which states are
present at a cell, tracks n+1..n+m which symbols the cell holds, and tracks
n+m+1..2n+m are scratch space for the states being produced this step.  Two
delimiter flags bracket the window containing all state marks.

One simulated step is four scans between the delimiters:

  1. right-to-left, firing left-moving instructions (targets carried into
     the scratch tracks of the left neighbour) and counting cells where a
     write instruction will fire;
  2. left-to-right, firing right-moving instructions symmetrically;
  3. right-to-left, firing write instructions: symbol tracks are rewritten
     in place and write successors collected in scratch;
  4. left-to-right, copying scratch onto the state tracks, zeroing scratch,
     and counting the produced (state, cell) marks for the next step's
     multiplicity flag.

Delimiters relocate outward when a move carries a state past them.  If a
whole cycle fires nothing, the copy-back is skipped (the tape still encodes
the halted configuration) and, when the source machine declares an accepting
state, a fifth scan searches the window for it.

Control states are generated lazily and hold only bounded data (phase,
carried state subset, four flags, a saturating counter); the number of
generated states is capped.  Every transition is an honest quadruple step:
a visit that rewrites a cell costs a write step plus a move step.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .errors import BudgetError, PrecondError
from .machine import Instruction, LEFT, Machine, RIGHT, WRITE, make_machine
from .partm import ParConfig, freeze_cells, initial_par_config, partm_run

_PHASES = ("boot", "lmove", "rmove", "write", "copy", "accept", "halt_accept", "halt_reject")


@dataclass(frozen=True)
class ControlState:
    phase: str
    carry: frozenset[int] = frozenset()
    mult: bool = False
    moved: bool = False
    wcells: int = 0  # cells with a firing write instruction, saturating at 2
    fired: bool = False
    found: bool = False
    pairs: int = 0  # produced (state, cell) marks, saturating at 2
    then: Optional[tuple[str, "ControlState"]] = None  # pending move after a write


@dataclass
class MalformedSnapshot(ValueError):
    message: str

    def __str__(self) -> str:
        return self.message


@dataclass
class _Step:
    action: tuple  # ("write", cell) | ("left",) | ("right",)
    next_ctrl: ControlState
    cycle_end: bool = False
    overhead: bool = False  # delimiter handling / relocation


class TrackDTM:
    """Deterministic track machine simulating a source machine step by step."""

    def __init__(self, machine: Machine, acceptance_scan: Optional[bool] = None):
        self.machine = machine
        self.n = len(machine.states)
        self.m = len(machine.alphabet)
        self.num_tracks = 2 * self.n + self.m
        self.state_idx = {s: i for i, s in enumerate(machine.states)}
        self.sym_idx = {s: j for j, s in enumerate(machine.alphabet)}
        self.blank_idx = self.sym_idx[machine.blank]
        self.delim_bit = 1 << self.num_tracks
        self.acceptance_scan = (
            machine.accept_state is not None if acceptance_scan is None else acceptance_scan
        )
        if self.acceptance_scan and machine.accept_state is None:
            raise PrecondError("acceptance scan needs a declared accepting state")
        self.state_cap = 200_000
        self._delta: dict[tuple[ControlState, int], Optional[_Step]] = {}
        self._order: list[tuple[ControlState, int]] = []
        self._by_op: dict[str, list[Instruction]] = {LEFT: [], RIGHT: [], WRITE: []}
        for inst in machine.instructions:
            self._by_op[inst.op].append(inst)

    # -- cell helpers ------------------------------------------------------

    def state_bits(self, cell: int) -> int:
        return cell & ((1 << self.n) - 1)

    def sym_bits(self, cell: int) -> int:
        return (cell >> self.n) & ((1 << self.m) - 1)

    def scratch_bits(self, cell: int) -> int:
        return (cell >> (self.n + self.m)) & ((1 << self.n) - 1)

    def is_delim(self, cell: int) -> bool:
        return bool(cell & self.delim_bit)

    def _assemble(self, states: int, syms: int, scratch: int, delim: bool) -> int:
        return states | (syms << self.n) | (scratch << (self.n + self.m)) | (self.delim_bit if delim else 0)

    def cell_symbols(self, cell: int) -> frozenset[int]:
        bits = self.sym_bits(cell)
        if bits == 0:
            return frozenset((self.blank_idx,))
        return frozenset(j for j in range(self.m) if bits >> j & 1)

    def render_cell(self, cell: int) -> str:
        bits = "".join(str(cell >> k & 1) for k in range(self.num_tracks))
        return f"<{bits}{'$' if self.is_delim(cell) else ''}>"

    # -- firing predicates -------------------------------------------------

    def _fires(self, inst: Instruction, cell: int, mult: bool) -> bool:
        if not (self.state_bits(cell) >> self.state_idx[inst.state]) & 1:
            return False
        syms = self.cell_symbols(cell)
        if self.sym_idx[inst.symbol] not in syms:
            return False
        if inst.state_marked and not mult:
            return False
        if inst.symbol_marked and len(syms) < 2:
            return False
        return True

    def _movers(self, op: str, cell: int, mult: bool) -> frozenset[int]:
        return frozenset(
            self.state_idx[i.next_state] for i in self._by_op[op] if self._fires(i, cell, mult)
        )

    def _write_firings(self, cell: int, mult: bool) -> list[Instruction]:
        return [i for i in self._by_op[WRITE] if self._fires(i, cell, mult)]

    # -- the transition function -------------------------------------------

    def delta(self, ctrl: ControlState, cell: int) -> Optional[_Step]:
        key = (ctrl, cell)
        if key not in self._delta:
            if len(self._delta) >= self.state_cap:
                raise BudgetError("generated control table exceeded its cap")
            self._delta[key] = self._compute(ctrl, cell)
            self._order.append(key)
        return self._delta[key]

    def _compute(self, ctrl: ControlState, cell: int) -> Optional[_Step]:
        if ctrl.then is not None:
            direction, nxt = ctrl.then
            return _Step((direction,), nxt, cycle_end=(ctrl.phase == "cycle_close"))
        phase = ctrl.phase
        if phase == "boot":
            raise AssertionError("boot control must carry a pending move")
        if phase in ("halt_accept", "halt_reject"):
            return None
        if phase == "lmove":
            return self._lmove(ctrl, cell)
        if phase == "lreloc":
            new = cell | self.delim_bit
            nxt = replace(ctrl, phase="rmove", carry=frozenset(), then=None)
            return self._emit(ctrl, cell, new, RIGHT, nxt, overhead=True)
        if phase == "rmove":
            return self._rmove(ctrl, cell)
        if phase == "rreloc":
            new = cell | self.delim_bit
            nxt = replace(ctrl, phase="write", carry=frozenset(), then=None)
            return self._emit(ctrl, cell, new, LEFT, nxt, overhead=True)
        if phase == "write":
            return self._write(ctrl, cell)
        if phase == "copy":
            return self._copy(ctrl, cell)
        if phase == "accept":
            return self._accept(ctrl, cell)
        raise AssertionError(f"unknown phase {phase}")

    def _emit(
        self,
        ctrl: ControlState,
        cell: int,
        new_cell: int,
        direction: str,
        nxt: ControlState,
        overhead: bool = False,
        cycle_end: bool = False,
    ) -> _Step:
        if new_cell == cell:
            return _Step((direction,), nxt, cycle_end=cycle_end, overhead=overhead)
        hold = replace(
            ctrl, phase="cycle_close" if cycle_end else ctrl.phase, then=(direction, nxt)
        )
        return _Step(("write", new_cell), hold, overhead=overhead)

    def _lmove(self, ctrl: ControlState, cell: int) -> _Step:
        if self.is_delim(cell):
            if ctrl.carry:
                # extend the window one cell to the left
                new = self._assemble(
                    self.state_bits(cell),
                    self.sym_bits(cell),
                    self.scratch_bits(cell) | _mask(ctrl.carry),
                    delim=False,
                )
                nxt = replace(ctrl, phase="lreloc", carry=frozenset())
                return self._emit(ctrl, cell, new, LEFT, nxt, overhead=True)
            nxt = replace(ctrl, phase="rmove", carry=frozenset())
            return _Step((RIGHT,), nxt, overhead=True)
        fired = self._movers(LEFT, cell, ctrl.mult)
        wrote = 1 if self._write_firings(cell, ctrl.mult) else 0
        new = self._assemble(
            self.state_bits(cell),
            self.sym_bits(cell),
            self.scratch_bits(cell) | _mask(ctrl.carry),
            delim=False,
        )
        nxt = replace(
            ctrl,
            carry=fired,
            moved=ctrl.moved or bool(fired),
            fired=ctrl.fired or bool(fired),
            wcells=min(2, ctrl.wcells + wrote),
        )
        return self._emit(ctrl, cell, new, LEFT, nxt)

    def _rmove(self, ctrl: ControlState, cell: int) -> _Step:
        if self.is_delim(cell):
            if ctrl.carry:
                new = self._assemble(
                    self.state_bits(cell),
                    self.sym_bits(cell),
                    self.scratch_bits(cell) | _mask(ctrl.carry),
                    delim=False,
                )
                nxt = replace(ctrl, phase="rreloc", carry=frozenset())
                return self._emit(ctrl, cell, new, RIGHT, nxt, overhead=True)
            nxt = replace(ctrl, phase="write", carry=frozenset())
            return _Step((LEFT,), nxt, overhead=True)
        fired = self._movers(RIGHT, cell, ctrl.mult)
        new = self._assemble(
            self.state_bits(cell),
            self.sym_bits(cell),
            self.scratch_bits(cell) | _mask(ctrl.carry),
            delim=False,
        )
        nxt = replace(
            ctrl,
            carry=fired,
            moved=ctrl.moved or bool(fired),
            fired=ctrl.fired or bool(fired),
        )
        return self._emit(ctrl, cell, new, RIGHT, nxt)

    def _write(self, ctrl: ControlState, cell: int) -> Optional[_Step]:
        if self.is_delim(cell):
            if ctrl.fired:
                nxt = replace(ctrl, phase="copy", pairs=0)
                return _Step((RIGHT,), nxt, overhead=True)
            if self.acceptance_scan:
                nxt = replace(ctrl, phase="accept", found=False)
                return _Step((RIGHT,), nxt, overhead=True)
            return None  # halted: no instruction applies here
        firings = self._write_firings(cell, ctrl.mult)
        if firings:
            old = self.cell_symbols(cell)
            written = frozenset(self.sym_idx[i.write_symbol] for i in firings)
            matched = frozenset(self.sym_idx[i.symbol] for i in firings)
            carried = ctrl.moved or ctrl.wcells >= 2
            result = (old | written) if carried else ((old - matched) | written)
            if result == frozenset((self.blank_idx,)):
                sym_bits = 0
            else:
                sym_bits = _mask(result)
            scratch = self.scratch_bits(cell) | _mask(
                frozenset(self.state_idx[i.next_state] for i in firings)
            )
            new = self._assemble(self.state_bits(cell), sym_bits, scratch, delim=False)
            nxt = replace(ctrl, fired=True)
            return self._emit(ctrl, cell, new, LEFT, nxt)
        return _Step((LEFT,), ctrl)

    def _copy(self, ctrl: ControlState, cell: int) -> _Step:
        if self.is_delim(cell):
            nxt = ControlState(phase="lmove", mult=ctrl.pairs >= 2)
            return _Step((LEFT,), nxt, cycle_end=True, overhead=True)
        scratch = self.scratch_bits(cell)
        new = self._assemble(scratch, self.sym_bits(cell), 0, delim=False)
        nxt = replace(ctrl, pairs=min(2, ctrl.pairs + _popcount(scratch)))
        return self._emit(ctrl, cell, new, RIGHT, nxt)

    def _accept(self, ctrl: ControlState, cell: int) -> _Step:
        if self.is_delim(cell):
            phase = "halt_accept" if ctrl.found else "halt_reject"
            return _Step((RIGHT,), ControlState(phase=phase), overhead=True)
        accept_bit = self.state_idx[self.machine.accept_state]
        found = ctrl.found or bool(self.state_bits(cell) >> accept_bit & 1)
        return _Step((RIGHT,), replace(ctrl, found=found))

    # -- encoding / decoding -------------------------------------------------

    def encode(self, input_symbols: str | list[str]) -> tuple[dict[int, int], int, ControlState]:
        start = initial_par_config(self.machine, input_symbols)
        return self.encode_config(start)

    def encode_config(self, config: ParConfig) -> tuple[dict[int, int], int, ControlState]:
        tape: dict[int, int] = {}
        for p, syms in config.tape:
            tape[p] = tape.get(p, 0) | (_mask(frozenset(self.sym_idx[s] for s in syms)) << self.n)
        positions = [p for _, p in config.active]
        for s, p in config.active:
            tape[p] = tape.get(p, 0) | (1 << self.state_idx[s])
        left, right = min(positions) - 1, max(positions) + 1
        tape[left] = tape.get(left, 0) | self.delim_bit
        tape[right] = tape.get(right, 0) | self.delim_bit
        ctrl = ControlState(
            phase="boot",
            mult=len(config.active) > 1,
            then=(LEFT, ControlState(phase="lmove", mult=len(config.active) > 1)),
        )
        return tape, right, ctrl

    def decode(self, tape: dict[int, int], time: int = 0) -> ParConfig:
        delims = sorted(p for p, c in tape.items() if self.is_delim(c))
        if len(delims) != 2:
            raise MalformedSnapshot(f"expected 2 delimiters, found {len(delims)}")
        left, right = delims
        active = set()
        cells: dict[int, frozenset[str]] = {}
        for p, c in tape.items():
            if self.scratch_bits(c):
                raise MalformedSnapshot(f"non-zero scratch tracks at cell {p}")
            states = self.state_bits(c)
            if states:
                if not left < p < right:
                    raise MalformedSnapshot(f"state mark outside the window at cell {p}")
                for i in range(self.n):
                    if states >> i & 1:
                        active.add((self.machine.states[i], p))
            bits = self.sym_bits(c)
            if bits:
                cells[p] = frozenset(
                    self.machine.alphabet[j] for j in range(self.m) if bits >> j & 1
                )
        return ParConfig(
            time=time,
            active=frozenset(active),
            tape=freeze_cells(cells, self.machine.blank),
        )

    # -- materialized DSL form ----------------------------------------------

    def to_machine(self, name: Optional[str] = None) -> Machine:
        """The so-far-materialized transition table as a plain machine."""
        names: dict[ControlState, str] = {}

        def nm(c: ControlState) -> str:
            if c not in names:
                names[c] = f"c{len(names)}"
            return names[c]

        instructions = []
        cells = {0}
        halts = {}
        for (ctrl, cell), step in ((k, self._delta[k]) for k in self._order):
            cells.add(cell)
            if step is None:
                halts[ctrl] = ctrl.phase
                nm(ctrl)
                continue
            if step.action[0] == "write":
                cells.add(step.action[1])
                instructions.append(
                    Instruction(nm(ctrl), self.render_cell(cell), WRITE, nm(step.next_ctrl),
                                write_symbol=self.render_cell(step.action[1]))
                )
            else:
                op = RIGHT if step.action[0] == RIGHT else LEFT
                instructions.append(
                    Instruction(nm(ctrl), self.render_cell(cell), op, nm(step.next_ctrl))
                )
        accept = next((nm(c) for c, ph in halts.items() if ph == "halt_accept"), None)
        reject = next((nm(c) for c, ph in halts.items() if ph == "halt_reject"), None)
        return make_machine(
            name=name or f"track_{self.machine.name}",
            states=list(names.values()) or ["c0"],
            alphabet=[self.render_cell(c) for c in sorted(cells)],
            blank=self.render_cell(0),
            instructions=instructions,
            start_state=next(iter(names.values()), "c0"),
            start_position=0,
            accept_state=accept,
            reject_state=None if reject == accept else reject,
        )


def _mask(indices: frozenset[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


def _popcount(x: int) -> int:
    return bin(x).count("1")


def compile_partm_to_dtm(machine: Machine, acceptance_scan: Optional[bool] = None) -> TrackDTM:
    return TrackDTM(machine, acceptance_scan=acceptance_scan)


def track_decode(tdtm: TrackDTM, tape: dict[int, int], time: int = 0) -> ParConfig:
    """Decode a cycle-boundary tape snapshot back into a multiplicity config."""
    return tdtm.decode(tape, time=time)


class TrackRun:
    """Executes a TrackDTM cycle by cycle."""

    def __init__(self, tdtm: TrackDTM, input_symbols: str | list[str] = "", config: Optional[ParConfig] = None):
        self.tdtm = tdtm
        if config is None:
            self.tape, self.head, self.ctrl = tdtm.encode(input_symbols)
        else:
            self.tape, self.head, self.ctrl = tdtm.encode_config(config)
        self.total_steps = 0
        self.halted = False
        self.per_cycle_steps: list[int] = []
        self.per_cycle_overhead: list[int] = []

    def _micro(self) -> Optional[_Step]:
        cell = self.tape.get(self.head, 0)
        step = self.tdtm.delta(self.ctrl, cell)
        if step is None:
            self.halted = True
            return None
        self.total_steps += 1
        if step.action[0] == "write":
            self.tape[self.head] = step.action[1]
        elif step.action[0] == RIGHT:
            self.head += 1
        else:
            self.head -= 1
        self.ctrl = step.next_ctrl
        return step

    def run_cycle(self, max_micro_steps: int = 1_000_000) -> str:
        """Advance one simulated step; returns 'cycle' or 'halt'."""
        if self.halted:
            return "halt"
        steps = 0
        overhead = 0
        for _ in range(max_micro_steps):
            step = self._micro()
            if step is None:
                return "halt"
            steps += 1
            if step.overhead:
                overhead += 1
            if step.cycle_end:
                self.per_cycle_steps.append(steps)
                self.per_cycle_overhead.append(overhead)
                return "cycle"
        raise BudgetError("cycle exceeded the micro-step cap")

    def decode(self, time: int = 0) -> ParConfig:
        return self.tdtm.decode(self.tape, time=time)


@dataclass
class EquivalenceReport:
    decoded: list[ParConfig]
    matched: list[bool]
    dtm_steps_per_partm_step: list[int]
    adjusted_steps: list[int]
    halt_cycle_steps: Optional[int]
    halted_in_sync: bool
    bound_constant: float
    fit_c: float
    fit_d: int
    fit_c_quadratic: float
    total_dtm_steps: int

    @property
    def all_matched(self) -> bool:
        return all(self.matched)

    @property
    def first_divergence(self) -> Optional[int]:
        for t, ok in enumerate(self.matched):
            if not ok:
                return t
        return None

    def to_json(self) -> dict:
        from .partm import par_config_json

        return {
            "matched": self.matched,
            "first_divergence": self.first_divergence,
            "dtm_steps_per_partm_step": self.dtm_steps_per_partm_step,
            "adjusted_steps": self.adjusted_steps,
            "halt_cycle_steps": self.halt_cycle_steps,
            "halted_in_sync": self.halted_in_sync,
            "bound_constant": self.bound_constant,
            "fit": {"C": self.fit_c, "D": self.fit_d, "C_quadratic": self.fit_c_quadratic},
            "total_dtm_steps": self.total_dtm_steps,
            "decoded": [par_config_json(c) for c in self.decoded],
        }


def fit_linear_bound(cycle_steps: list[int]) -> tuple[float, int, float]:
    """Max-based fit: D is the first cycle's cost, C the smallest slope with
    steps(t) <= C*t + D for every cycle, and the quadratic constant bounds
    the cumulative cost by C_q * t^2."""
    if not cycle_steps:
        return 0.0, 0, 0.0
    d = cycle_steps[0]
    c = max((max(0, s - d) / t for t, s in enumerate(cycle_steps, start=1)), default=0.0)
    cumulative = 0
    cq = 0.0
    for t, s in enumerate(cycle_steps, start=1):
        cumulative += s
        cq = max(cq, cumulative / (t * t))
    return c, d, cq


def simulate_and_compare(machine: Machine, input_symbols: str | list[str], steps: int) -> EquivalenceReport:
    """Run the source machine and its compiled form side by side, decoding the
    track tape at every cycle boundary."""
    par = partm_run(machine, input_symbols, steps)
    tdtm = compile_partm_to_dtm(machine, acceptance_scan=False)
    run = TrackRun(tdtm, input_symbols)
    decoded = [run.decode(time=0)]
    matched = [decoded[0] == par.steps[0]]
    for t in range(1, len(par.steps)):
        event = run.run_cycle()
        if event == "halt":
            break
        snap = run.decode(time=t)
        decoded.append(snap)
        matched.append(snap == par.steps[t])
    halt_cycle_steps = None
    halted_in_sync = True
    if par.halted and not run.halted:
        before = run.total_steps
        event = run.run_cycle()
        halted_in_sync = event == "halt"
        halt_cycle_steps = run.total_steps - before
        if halted_in_sync:
            final = run.decode(time=par.steps[-1].time)
            halted_in_sync = final == par.steps[-1]
    cycle_steps = run.per_cycle_steps
    adjusted = [s - o for s, o in zip(cycle_steps, run.per_cycle_overhead)]
    c, d, cq = fit_linear_bound(cycle_steps)
    bound = max((s / t for t, s in enumerate(cycle_steps, start=1)), default=0.0)
    return EquivalenceReport(
        decoded=decoded,
        matched=matched,
        dtm_steps_per_partm_step=cycle_steps,
        adjusted_steps=adjusted,
        halt_cycle_steps=halt_cycle_steps,
        halted_in_sync=halted_in_sync,
        bound_constant=bound,
        fit_c=c,
        fit_d=d,
        fit_c_quadratic=cq,
        total_dtm_steps=run.total_steps,
    )
