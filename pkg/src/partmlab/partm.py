"""Simultaneous-execution semantics with multiplicity of states, positions
and cell symbols.

A step fires *every* instruction whose head matches some active (state,
position) pair and some symbol present in the scanned cell, subject to the
inconsistency marks: a state mark requires more than one active pair, a
symbol mark requires more than one symbol in the scanned cell.  The next
active set is the set of firing successors; unfired pairs do not persist.

Tape update per cell p: writes contribute their written symbols; a firing
instruction *carries* cell p (preserves its whole content) unless it is a
write at p itself, so a matched symbol disappears only when every firing
this step is a write at that very cell.  Cells untouched by writes are
unchanged.  Cells whose set would be exactly {blank} are normalized away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import islice, product
from typing import Iterable, NamedTuple, Optional

from .classical import ClassicalConfig
from .errors import PrecondError
from .machine import RIGHT, WRITE, Machine


@dataclass(frozen=True)
class ParConfig:
    time: int
    active: frozenset[tuple[str, int]]
    tape: tuple[tuple[int, frozenset[str]], ...]  # sorted; absent cell = {blank}

    def cell(self, pos: int, blank: str) -> frozenset[str]:
        for p, syms in self.tape:
            if p == pos:
                return syms
        return frozenset((blank,))

    def cells(self) -> dict[int, frozenset[str]]:
        return dict(self.tape)


def freeze_cells(cells: dict[int, Iterable[str]], blank: str) -> tuple[tuple[int, frozenset[str]], ...]:
    out = []
    for p, syms in cells.items():
        fs = frozenset(syms)
        if fs and fs != frozenset((blank,)):
            out.append((p, fs))
    return tuple(sorted(out))


@dataclass(frozen=True)
class FiringRecord:
    inst: int
    state: str
    pos: int
    symbol: str


@dataclass
class ParTrace:
    steps: list[ParConfig]
    firings: list[list[FiringRecord]]  # firings[t] produced steps[t+1]
    halted: bool
    truncated: bool

    @property
    def final(self) -> ParConfig:
        return self.steps[-1]

    def fired_instructions(self, t: int) -> list[int]:
        return sorted({f.inst for f in self.firings[t]})

    def to_json(self) -> dict:
        return {
            "trace": [par_config_json(c) for c in self.steps],
            "firings": [
                {
                    "t": t,
                    "fired": [
                        {"inst": f.inst, "state": f.state, "pos": f.pos, "sym": f.symbol}
                        for f in recs
                    ],
                }
                for t, recs in enumerate(self.firings)
            ],
            "halted": self.halted,
            "truncated": self.truncated,
        }


def par_config_json(cfg: ParConfig) -> dict:
    return {
        "t": cfg.time,
        "active": [[s, p] for s, p in sorted(cfg.active)],
        "cells": {str(p): sorted(syms) for p, syms in cfg.tape},
    }


def initial_par_config(machine: Machine, input_symbols: str | list[str]) -> ParConfig:
    syms = list(input_symbols)
    for s in syms:
        if s not in machine.alphabet:
            raise PrecondError(f"input symbol {s!r} not in alphabet")
    cells = {i: (s,) for i, s in enumerate(syms)}
    return ParConfig(
        time=0,
        active=frozenset(((machine.start_state, machine.start_position),)),
        tape=freeze_cells(cells, machine.blank),
    )


def firing_set(machine: Machine, config: ParConfig) -> list[FiringRecord]:
    """All (instruction, pair, symbol) triples that fire in this configuration."""
    table = machine.instruction_lookup()
    multi_state = len(config.active) > 1
    firings: list[FiringRecord] = []
    for state, pos in sorted(config.active):
        cell = config.cell(pos, machine.blank)
        multi_sym = len(cell) > 1
        for sym in sorted(cell):
            for i in table.get((state, sym), ()):
                inst = machine.instructions[i]
                if inst.state_marked and not multi_state:
                    continue
                if inst.symbol_marked and not multi_sym:
                    continue
                firings.append(FiringRecord(i, state, pos, sym))
    return firings


def partm_step(machine: Machine, config: ParConfig) -> Optional[tuple[ParConfig, list[FiringRecord]]]:
    """One synchronous step; None signals that the machine halts here."""
    firings = firing_set(machine, config)
    if not firings:
        return None

    new_active: set[tuple[str, int]] = set()
    writes: dict[int, set[str]] = {}
    matched: dict[int, set[str]] = {}
    for f in firings:
        inst = machine.instructions[f.inst]
        if inst.op == WRITE:
            new_active.add((inst.next_state, f.pos))
            writes.setdefault(f.pos, set()).add(inst.write_symbol)
            matched.setdefault(f.pos, set()).add(f.symbol)
        elif inst.op == RIGHT:
            new_active.add((inst.next_state, f.pos + 1))
        else:
            new_active.add((inst.next_state, f.pos - 1))

    cells: dict[int, Iterable[str]] = {}
    for p, syms in config.tape:
        cells[p] = syms
    for p in writes:
        cells.setdefault(p, frozenset((machine.blank,)))
    new_cells: dict[int, frozenset[str]] = {}
    for p, old in cells.items():
        old = frozenset(old)
        w = writes.get(p)
        if not w:
            new_cells[p] = old
            continue
        carried = any(
            machine.instructions[f.inst].op != WRITE or f.pos != p for f in firings
        )
        if carried:
            new_cells[p] = old | w
        else:
            new_cells[p] = (old - matched[p]) | w

    nxt = ParConfig(
        time=config.time + 1,
        active=frozenset(new_active),
        tape=freeze_cells(new_cells, machine.blank),
    )
    return nxt, firings


def partm_run(machine: Machine, input_symbols: str | list[str], max_steps: int) -> ParTrace:
    return partm_run_from(machine, initial_par_config(machine, input_symbols), max_steps)


def partm_run_from(machine: Machine, config: ParConfig, max_steps: int) -> ParTrace:
    steps = [config]
    firings: list[list[FiringRecord]] = []
    for _ in range(max_steps):
        result = partm_step(machine, config)
        if result is None:
            return ParTrace(steps, firings, halted=True, truncated=False)
        config, recs = result
        steps.append(config)
        firings.append(recs)
    halted = partm_step(machine, config) is None
    return ParTrace(steps, firings, halted=halted, truncated=not halted)


@dataclass
class ResultEnumeration:
    results: list[dict[int, str]]  # choice tapes, blank cells omitted
    total: int
    truncated: bool


def partm_results(final: ParConfig, max_choices: int, blank: str) -> ResultEnumeration:
    """Enumerate choice functions over multi-symbol cells of a halted config.

    The total count is exact even when enumeration stops at max_choices.
    """
    cells = sorted(final.tape)
    total = math.prod(len(syms) for _, syms in cells) if cells else 1
    positions = [p for p, _ in cells]
    options = [sorted(syms) for _, syms in cells]
    results = []
    for combo in islice(product(*options), max_choices):
        tape = {p: s for p, s in zip(positions, combo) if s != blank}
        results.append(tape)
    return ResultEnumeration(results, total, truncated=total > max_choices)


class AcceptanceFraction(NamedTuple):
    m: int
    n: int

    @property
    def probability(self) -> Fraction:
        return Fraction(self.m, self.n)


def partm_acceptance(final: ParConfig, machine: Machine) -> AcceptanceFraction:
    """m/n over the active pairs of a halted configuration: n pairs, m accepting."""
    if machine.accept_state is None or machine.reject_state is None:
        raise PrecondError("acceptance requires declared accept and reject states")
    n = len(final.active)
    m = sum(1 for s, _ in final.active if s == machine.accept_state)
    return AcceptanceFraction(m, n)


def singleton_config(cfg: ClassicalConfig) -> ParConfig:
    """Lift a classical configuration to its singleton multiplicity form."""
    return ParConfig(
        time=cfg.time,
        active=frozenset(((cfg.state, cfg.pos),)),
        tape=tuple((p, frozenset((s,))) for p, s in cfg.tape),
    )


def admits_choice(par: ParConfig, cfg: ClassicalConfig, blank: str) -> bool:
    """True if cfg is obtainable from par by choosing states/symbols."""
    if (cfg.state, cfg.pos) not in par.active:
        return False
    cells = dict(cfg.tape)
    for p, syms in par.tape:
        if cells.pop(p, blank) not in syms:
            return False
    return not cells  # cfg must not have symbols where par has only blank
