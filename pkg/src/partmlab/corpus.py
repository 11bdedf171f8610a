"""Seeded random corpora for the property suites.

All generators are deterministic functions of their seed, so test runs are
reproducible; sizes follow the desk-scale limits used by the acceptance
suite (machines with at most 3 states and 3 symbols, CNFs with at most 4
variables and 4 clauses).
"""

from __future__ import annotations

import random
from typing import Callable, Optional

from .classical import ndtm_run_all
from .machine import Instruction, LEFT, Machine, RIGHT, WRITE, make_machine, validate
from .problems import CNF

DEFAULT_SEED = 20240913


def random_machine(rng: random.Random, max_states: int = 3, max_symbols: int = 3) -> Machine:
    n_states = rng.randint(1, max_states)
    n_syms = rng.randint(1, max_symbols - 1)
    states = [f"q{i+1}" for i in range(n_states)]
    alphabet = [str(i) for i in range(n_syms)] + ["_"]
    n_inst = rng.randint(0, 2 * n_states)
    instructions = []
    for _ in range(n_inst):
        state = rng.choice(states)
        symbol = rng.choice(alphabet)
        nxt = rng.choice(states)
        kind = rng.randrange(3)
        if kind == 0:
            instructions.append(Instruction(state, symbol, WRITE, nxt, write_symbol=rng.choice(alphabet)))
        elif kind == 1:
            instructions.append(Instruction(state, symbol, RIGHT, nxt))
        else:
            instructions.append(Instruction(state, symbol, LEFT, nxt))
    return make_machine(
        name=f"rand{rng.randrange(10**6)}",
        states=states,
        alphabet=alphabet,
        blank="_",
        instructions=instructions,
        start_state=states[0],
        start_position=0,
    )


def random_input(rng: random.Random, machine: Machine, max_len: int = 3) -> str:
    syms = [s for s in machine.alphabet if s != machine.blank]
    if not syms:
        return ""
    return "".join(rng.choice(syms) for _ in range(rng.randint(0, max_len)))


def machine_corpus(
    count: int,
    seed: int = DEFAULT_SEED,
    keep: Optional[Callable[[Machine, str], bool]] = None,
    max_attempts: int = 100_000,
) -> list[tuple[Machine, str]]:
    """The first `count` seeded (machine, input) pairs satisfying `keep`."""
    rng = random.Random(seed)
    out: list[tuple[Machine, str]] = []
    for _ in range(max_attempts):
        if len(out) >= count:
            return out
        machine = random_machine(rng)
        word = random_input(rng, machine)
        if keep is None or keep(machine, word):
            out.append((machine, word))
    raise RuntimeError(f"only {len(out)}/{count} corpus entries found")


def deterministic_corpus(count: int, seed: int = DEFAULT_SEED) -> list[tuple[Machine, str]]:
    return machine_corpus(count, seed, keep=lambda m, w: validate(m).deterministic)


def branching_corpus(count: int, seed: int = DEFAULT_SEED, max_steps: int = 8) -> list[tuple[Machine, str]]:
    """Mark-free machines whose full computation tree completes within budget."""

    def keep(machine: Machine, word: str) -> bool:
        tree = ndtm_run_all(machine, word, max_steps)
        return not tree.truncated and bool(tree.root.branches)

    return machine_corpus(count, seed, keep=keep)


def random_cnf(rng: random.Random, max_vars: int = 4, max_clauses: int = 4) -> CNF:
    v = rng.randint(1, max_vars)
    n_clauses = rng.randint(1, max_clauses)
    clauses = []
    for _ in range(n_clauses):
        width = rng.randint(1, v)
        chosen = rng.sample(range(1, v + 1), width)
        clauses.append(tuple(var if rng.random() < 0.5 else -var for var in chosen))
    return CNF(v, tuple(clauses))


def cnf_corpus(count: int, seed: int = DEFAULT_SEED) -> list[CNF]:
    rng = random.Random(seed)
    return [random_cnf(rng) for _ in range(count)]
