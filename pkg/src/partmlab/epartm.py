"""Synchronous superpositions of classical configurations.

A superposition is a multiset of classical configurations sharing one time
stamp.  Each step, every configuration is replaced by one successor per
applicable instruction (classical single-symbol semantics), so distinct
computation paths never mix.  A configuration with no applicable
instruction is carried frozen; the machine halts when every configuration
is frozen.

Inconsistency marks are read against the whole pre-step snapshot: a state
mark fires only if two configurations differ in state or position, a
symbol mark only if two configurations differ in the symbol at the
candidate's own head position.  Applicability is re-evaluated every step,
so a frozen configuration may resume once the global predicates change.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .classical import ClassicalConfig, apply_instruction, config_json, initial_config
from .errors import PrecondError
from .machine import Machine
from .partm import AcceptanceFraction


def _key(c: ClassicalConfig):
    return (c.state, c.pos, c.tape)


@dataclass(frozen=True)
class Superposition:
    time: int
    configs: tuple[ClassicalConfig, ...]  # canonical order, duplicates kept

    @staticmethod
    def of(configs, time: int) -> "Superposition":
        return Superposition(time, tuple(sorted(configs, key=_key)))

    def cores(self) -> list[tuple]:
        return [c.core() for c in self.configs]

    def to_json(self) -> dict:
        grouped: list[dict] = []
        for c in self.configs:
            entry = config_json(c)
            entry.pop("t")
            if grouped and grouped[-1]["state"] == entry["state"] \
                    and grouped[-1]["pos"] == entry["pos"] \
                    and grouped[-1]["cells"] == entry["cells"]:
                grouped[-1]["count"] += 1
            else:
                entry["count"] = 1
                grouped.append(entry)
        return {"t": self.time, "configs": grouped}


@dataclass
class EpTrace:
    steps: list[Superposition]
    halted: bool
    truncated: bool

    @property
    def final(self) -> Superposition:
        return self.steps[-1]

    def to_json(self) -> dict:
        return {
            "trace": [sp.to_json() for sp in self.steps],
            "halted": self.halted,
            "truncated": self.truncated,
        }


def _applicable(machine: Machine, c: ClassicalConfig, state_incons: bool, sym_incons) -> list[int]:
    table = machine.instruction_lookup()
    sym = c.symbol_at(c.pos, machine.blank)
    out = []
    for i in table.get((c.state, sym), ()):
        inst = machine.instructions[i]
        if inst.state_marked and not state_incons:
            continue
        if inst.symbol_marked and not sym_incons(c.pos):
            continue
        out.append(i)
    return out


def epartm_step(machine: Machine, sp: Superposition) -> Optional[Superposition]:
    """One globally synchronous step; None signals the halt of the machine."""
    configs = sp.configs
    state_incons = len({(c.state, c.pos) for c in configs}) > 1
    sym_cache: dict[int, bool] = {}

    def sym_incons(p: int) -> bool:
        if p not in sym_cache:
            sym_cache[p] = len({c.symbol_at(p, machine.blank) for c in configs}) > 1
        return sym_cache[p]

    new: list[ClassicalConfig] = []
    any_fired = False
    for c in configs:
        apps = _applicable(machine, c, state_incons, sym_incons)
        if not apps:
            new.append(ClassicalConfig(c.state, c.pos, c.tape, c.time + 1))
            continue
        any_fired = True
        for i in apps:
            new.append(apply_instruction(c, machine.instructions[i], machine.blank))
    if not any_fired:
        return None
    return Superposition.of(new, sp.time + 1)


def epartm_run(
    machine: Machine,
    input_symbols: str | list[str],
    max_steps: int,
    dedup: bool = False,
) -> EpTrace:
    sp = Superposition.of([initial_config(machine, input_symbols)], 0)
    return epartm_run_from(machine, sp, max_steps, dedup=dedup)


def epartm_run_from(
    machine: Machine, sp: Superposition, max_steps: int, dedup: bool = False
) -> EpTrace:
    def normalize(s: Superposition) -> Superposition:
        if not dedup:
            return s
        seen: dict[tuple, ClassicalConfig] = {}
        for c in s.configs:
            seen.setdefault(_key(c), c)
        return Superposition.of(seen.values(), s.time)

    sp = normalize(sp)
    steps = [sp]
    for _ in range(max_steps):
        nxt = epartm_step(machine, sp)
        if nxt is None:
            return EpTrace(steps, halted=True, truncated=False)
        sp = normalize(nxt)
        steps.append(sp)
    halted = epartm_step(machine, sp) is None
    return EpTrace(steps, halted=halted, truncated=not halted)


@dataclass
class EntanglementWitness:
    kind: str  # "state-symbol" | "symbol-symbol"
    x: int
    y: int
    present: list[tuple[str, str]]
    absent: tuple[str, str]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "x": self.x,
            "y": self.y,
            "present": [list(p) for p in self.present],
            "absent": list(self.absent),
        }


def entangled(
    sp: Superposition, x: int, y: int, kind: str = "state-symbol", blank: str = "_"
) -> Optional[EntanglementWitness]:
    """Witness two realized value pairs at (x, y) whose cross pair is unrealized."""
    if kind == "state-symbol":
        realized = {
            (c.state, c.symbol_at(y, blank)) for c in sp.configs if c.pos == x
        }
    elif kind == "symbol-symbol":
        realized = {(c.symbol_at(x, blank), c.symbol_at(y, blank)) for c in sp.configs}
    else:
        raise PrecondError(f"unknown entanglement kind {kind!r}")
    pairs = sorted(realized)
    for a in pairs:
        for b in pairs:
            if a[0] == b[0] or a[1] == b[1]:
                continue
            for cross in ((a[0], b[1]), (b[0], a[1])):
                if cross not in realized:
                    return EntanglementWitness(kind, x, y, present=[a, b], absent=cross)
    return None


def epartm_acceptance(final: Superposition, machine: Machine) -> AcceptanceFraction:
    """m/n over the final multiset: n configurations, m in the accepting state."""
    if machine.accept_state is None or machine.reject_state is None:
        raise PrecondError("acceptance requires declared accept and reject states")
    n = len(final.configs)
    m = sum(1 for c in final.configs if c.state == machine.accept_state)
    return AcceptanceFraction(m, n)
