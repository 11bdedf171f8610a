"""Bundled machines used by the test suites, the CLI demos and the
compiler equivalence checks.

EXAMPLE1 is the five-state machine whose run on input "0" superposes cell 0,
computes the constant-1 function over the superposition and multiplicity-tests
the result cell (the symbol mark on its eighth instruction keeps the test
blocked while the cell is single-valued).  ANOMALY is the constant-1 machine
that, started on a superposed cell, leaks the spurious result 0 because
distinct computation paths mix.
"""

from __future__ import annotations

from .machine import Machine, parse_machine

EXAMPLE1_SRC = """\
machine example1
states: q1 q2 q3 q4 q5
symbols: 0 1 * _
blank: _
start: q1 @ 0
inst: q1 0 -> write 0 , q2
inst: q1 0 -> write 1 , q2
inst: q2 0 -> right , q3
inst: q2 1 -> right , q3
inst: q3 _ -> write 1 , q4
inst: q4 0 -> write 0 , q5
inst: q4 1 -> write 0 , q5
inst: q4 1^ -> write * , q5
inst: q5 * -> write 1 , q5
"""

# Same machine with the symbol mark dropped: a plain NDTM.
EXAMPLE1_UNMARKED_SRC = EXAMPLE1_SRC.replace("machine example1", "machine example1u").replace(
    "inst: q4 1^ -> write * , q5", "inst: q4 1 -> write * , q5"
)

ANOMALY_SRC = """\
machine anomaly
states: q1 q2 q3 q4 q5
symbols: 0 1 _
blank: _
start: q1 @ 0
inst: q1 0 -> write 0 , q2
inst: q1 1 -> write 1 , q3
inst: q2 0 -> right , q4
inst: q3 1 -> right , q4
inst: q2 1 -> right , q5
inst: q4 _ -> write 1 , q4
inst: q5 _ -> write 0 , q5
"""

EMPTY_SRC = """\
machine empty
states: q1
symbols: _
blank: _
start: q1 @ 0
"""

# Deterministic: walks right forever, laying down 1s.  Never halts; its
# state window slides right, so per-cycle compiled step counts grow.
RIGHT_WALKER_SRC = """\
machine walker
states: w m
symbols: 1 _
blank: _
start: w @ 0
inst: w _ -> write 1 , m
inst: m 1 -> right , w
"""

# Nondeterministic: splits into two heads racing outward in both
# directions.  Maximal window growth (two cells per step).
SPREADER_SRC = """\
machine spreader
states: s l r
symbols: 0 _
blank: _
start: s @ 0
inst: s _ -> left , l
inst: s _ -> right , r
inst: l _ -> left , l
inst: r _ -> right , r
"""

# Deterministic: flips one cell between 0 and 1 forever.  Constant window.
OSCILLATOR_SRC = """\
machine oscillator
states: a b
symbols: 0 1 _
blank: _
start: a @ 0
inst: a 0 -> write 1 , b
inst: b 1 -> write 0 , a
"""

# Two write instructions to distinct states: the ambiguity yields a
# state-multiplicity contradiction witness.
STATE_FORK_SRC = """\
machine statefork
states: q1 q2 q3
symbols: 0 _
blank: _
start: q1 @ 0
inst: q1 0 -> write 0 , q2
inst: q1 0 -> write 0 , q3
"""

# A state-marked instruction that actually fires: the initial fork makes the
# pair set multiple, enabling the marked write one step later.
QMARK_SRC = """\
machine qmark
states: s a b c
symbols: 0 1 _
blank: _
start: s @ 0
inst: s _ -> right , a
inst: s _ -> left , b
inst: a^ _ -> write 1 , c
inst: b _ -> write 0 , b
"""

EXAMPLE1 = parse_machine(EXAMPLE1_SRC)
EXAMPLE1_UNMARKED = parse_machine(EXAMPLE1_UNMARKED_SRC)
ANOMALY = parse_machine(ANOMALY_SRC)
EMPTY = parse_machine(EMPTY_SRC)
RIGHT_WALKER = parse_machine(RIGHT_WALKER_SRC)
SPREADER = parse_machine(SPREADER_SRC)
OSCILLATOR = parse_machine(OSCILLATOR_SRC)
STATE_FORK = parse_machine(STATE_FORK_SRC)
QMARK = parse_machine(QMARK_SRC)

FIXTURES: dict[str, Machine] = {
    m.name: m
    for m in (
        EXAMPLE1,
        EXAMPLE1_UNMARKED,
        ANOMALY,
        EMPTY,
        RIGHT_WALKER,
        SPREADER,
        OSCILLATOR,
        STATE_FORK,
        QMARK,
    )
}

# (machine, input) pairs for the compiled-DTM equivalence sweep.
TRACK_RUNS: list[tuple[Machine, str]] = [
    (EXAMPLE1, "0"),
    (EXAMPLE1_UNMARKED, "0"),
    (ANOMALY, "0"),
    (ANOMALY, "1"),
    (EMPTY, ""),
    (RIGHT_WALKER, ""),
    (SPREADER, ""),
    (OSCILLATOR, "0"),
    (STATE_FORK, "0"),
    (QMARK, ""),
]

# Deterministic machines that halt within a small budget, with sample inputs:
# the ground-model-checking targets.
DETERMINISTIC_HALTING: list[tuple[Machine, str]] = [
    (ANOMALY, "0"),
    (ANOMALY, "1"),
    (EMPTY, ""),
]

# Machines that reach an ambiguous configuration: contradiction-witness targets.
AMBIGUITY_REACHING: list[tuple[Machine, str]] = [
    (EXAMPLE1, "0"),
    (EXAMPLE1_UNMARKED, "0"),
    (STATE_FORK, "0"),
    (SPREADER, ""),
]
