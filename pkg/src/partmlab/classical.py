"""Reference DTM execution and exhaustive NDTM tree exploration.

These are the oracle engines: deterministic runs are the ground truth for
the conservativity properties of the paraconsistent engines, and the
exhaustive nondeterministic tree supplies leaf multisets and path sets.

Configurations normalize the tape (blank cells are absent), so structural
equality of configurations is decidable and cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import PrecondError
from .machine import RIGHT, WRITE, Instruction, Machine, validate


@dataclass(frozen=True)
class ClassicalConfig:
    state: str
    pos: int
    tape: tuple[tuple[int, str], ...]  # sorted, non-blank cells only
    time: int = 0

    def symbol_at(self, pos: int, blank: str) -> str:
        for p, s in self.tape:
            if p == pos:
                return s
        return blank

    def cells(self) -> dict[int, str]:
        return dict(self.tape)

    def core(self) -> tuple[str, int, tuple[tuple[int, str], ...]]:
        """Time-independent identity, for multiset comparisons."""
        return (self.state, self.pos, self.tape)


def freeze_tape(cells: dict[int, str], blank: str) -> tuple[tuple[int, str], ...]:
    return tuple(sorted((p, s) for p, s in cells.items() if s != blank))


def initial_config(machine: Machine, input_symbols: str | list[str]) -> ClassicalConfig:
    syms = list(input_symbols)
    for s in syms:
        if s not in machine.alphabet:
            raise PrecondError(f"input symbol {s!r} not in alphabet")
    cells = {i: s for i, s in enumerate(syms)}
    return ClassicalConfig(
        state=machine.start_state,
        pos=machine.start_position,
        tape=freeze_tape(cells, machine.blank),
        time=0,
    )


def apply_instruction(cfg: ClassicalConfig, inst: Instruction, blank: str) -> ClassicalConfig:
    if inst.op == WRITE:
        cells = cfg.cells()
        if inst.write_symbol == blank:
            cells.pop(cfg.pos, None)
        else:
            cells[cfg.pos] = inst.write_symbol
        return ClassicalConfig(inst.next_state, cfg.pos, freeze_tape(cells, blank), cfg.time + 1)
    delta = 1 if inst.op == RIGHT else -1
    return ClassicalConfig(inst.next_state, cfg.pos + delta, cfg.tape, cfg.time + 1)


def applicable_instructions(machine: Machine, cfg: ClassicalConfig) -> list[int]:
    sym = cfg.symbol_at(cfg.pos, machine.blank)
    table = machine.instruction_lookup()
    return list(table.get((cfg.state, sym), ()))


@dataclass
class Trace:
    steps: list[ClassicalConfig]
    halted: bool
    truncated: bool

    @property
    def final(self) -> ClassicalConfig:
        return self.steps[-1]

    def to_json(self) -> dict:
        return {
            "trace": [config_json(c) for c in self.steps],
            "halted": self.halted,
            "truncated": self.truncated,
        }


def config_json(cfg: ClassicalConfig) -> dict:
    return {
        "t": cfg.time,
        "state": cfg.state,
        "pos": cfg.pos,
        "cells": {str(p): s for p, s in cfg.tape},
    }


def dtm_run(machine: Machine, input_symbols: str | list[str], max_steps: int) -> Trace:
    """Run a deterministic machine; halting and budget exhaustion are distinct."""
    report = validate(machine)
    if not report.deterministic:
        raise PrecondError(
            "dtm_run requires a deterministic machine: "
            + (f"ambiguous head groups {report.ambiguous_groups}" if report.ambiguous_groups else "")
            + (" uses inconsistency marks" if report.uses_incons_marks else "")
        )
    cfg = initial_config(machine, input_symbols)
    steps = [cfg]
    for _ in range(max_steps):
        apps = applicable_instructions(machine, cfg)
        if not apps:
            return Trace(steps, halted=True, truncated=False)
        cfg = apply_instruction(cfg, machine.instructions[apps[0]], machine.blank)
        steps.append(cfg)
    halted = not applicable_instructions(machine, cfg)
    return Trace(steps, halted=halted, truncated=not halted)


@dataclass
class TreeNode:
    config: ClassicalConfig
    branches: tuple[tuple[int, "TreeNode"], ...]
    halted: bool

    def to_json(self) -> dict:
        node = config_json(self.config)
        if self.branches:
            node["branches"] = [{"inst": i, "node": child.to_json()} for i, child in self.branches]
        return node


@dataclass
class ComputationTree:
    root: TreeNode
    truncated: bool

    def leaves(self) -> list[ClassicalConfig]:
        """Halted configurations, in left-to-right (declaration-order) order."""
        out: list[ClassicalConfig] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.halted:
                out.append(node.config)
            stack.extend(child for _, child in reversed(node.branches))
        return out

    def level(self, t: int) -> list[ClassicalConfig]:
        out: list[ClassicalConfig] = []

        def walk(node: TreeNode) -> None:
            if node.config.time == t:
                out.append(node.config)
                return
            for _, child in node.branches:
                walk(child)

        walk(self.root)
        return out

    def paths(self) -> Iterator[list[ClassicalConfig]]:
        def walk(node: TreeNode, prefix: list[ClassicalConfig]):
            prefix = prefix + [node.config]
            if not node.branches:
                yield prefix
                return
            for _, child in node.branches:
                yield from walk(child, prefix)

        yield from walk(self.root, [])

    def to_json(self) -> dict:
        return {"tree": self.root.to_json(), "truncated": self.truncated}


def ndtm_run_all(machine: Machine, input_symbols: str | list[str], max_steps: int) -> ComputationTree:
    """Exhaustive branching execution; children ordered by declaration order."""
    if machine.uses_marks():
        raise PrecondError("ndtm_run_all rejects machines with inconsistency marks")
    truncated = False

    def expand(cfg: ClassicalConfig) -> TreeNode:
        nonlocal truncated
        apps = applicable_instructions(machine, cfg)
        if not apps:
            return TreeNode(cfg, (), halted=True)
        if cfg.time >= max_steps:
            truncated = True
            return TreeNode(cfg, (), halted=False)
        branches = tuple(
            (i, expand(apply_instruction(cfg, machine.instructions[i], machine.blank)))
            for i in apps
        )
        return TreeNode(cfg, branches, halted=False)

    root = expand(initial_config(machine, input_symbols))
    return ComputationTree(root, truncated)
