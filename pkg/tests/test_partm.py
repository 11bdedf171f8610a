import random

import pytest

from partmlab.classical import dtm_run, ndtm_run_all
from partmlab.corpus import DEFAULT_SEED, branching_corpus, deterministic_corpus
from partmlab.errors import PrecondError
from partmlab.fixtures import ANOMALY, EXAMPLE1
from partmlab.machine import Instruction, Machine
from partmlab.partm import (
    ParConfig,
    admits_choice,
    firing_set,
    freeze_cells,
    initial_par_config,
    partm_acceptance,
    partm_results,
    partm_run,
    partm_run_from,
    partm_step,
    singleton_config,
)

FIGURE1 = [
    ({("q1", 0)}, {0: {"0"}}),
    ({("q2", 0)}, {0: {"0", "1"}}),
    ({("q3", 1)}, {0: {"0", "1"}}),
    ({("q4", 1)}, {0: {"0", "1"}, 1: {"1"}}),
    ({("q5", 1)}, {0: {"0", "1"}, 1: {"0"}}),
]
FIGURE1_FIRED = [[0, 1], [2, 3], [4], [6]]


def as_pairs(cfg):
    return set(cfg.active), {p: set(s) for p, s in cfg.tape}


def test_figure1_exact_trace():
    trace = partm_run(EXAMPLE1, "0", 20)
    assert trace.halted and not trace.truncated
    assert len(trace.steps) == 5
    for cfg, (active, cells) in zip(trace.steps, FIGURE1):
        assert as_pairs(cfg) == (active, cells)
    assert [trace.fired_instructions(t) for t in range(4)] == FIGURE1_FIRED
    # the marked instruction is blocked while the scanned cell is single-valued
    assert 7 not in trace.fired_instructions(3)


def test_step_t0_to_t1():
    cfg = initial_par_config(EXAMPLE1, "0")
    nxt, recs = partm_step(EXAMPLE1, cfg)
    assert as_pairs(nxt) == ({("q2", 0)}, {0: {"0", "1"}})
    assert sorted({f.inst for f in recs}) == [0, 1]


def test_step_t3_blocks_marked_instruction():
    cfg = ParConfig(3, frozenset((("q4", 1),)), freeze_cells({0: {"0", "1"}, 1: {"1"}}, "_"))
    nxt, recs = partm_step(EXAMPLE1, cfg)
    assert {f.inst for f in recs} == {6}
    assert as_pairs(nxt)[1][1] == {"0"}


def test_halt_on_empty_firing_set():
    cfg = ParConfig(0, frozenset((("q5", 1),)), freeze_cells({1: {"0"}}, "_"))
    assert partm_step(EXAMPLE1, cfg) is None


def test_marked_instruction_fires_on_multivalued_cell():
    cfg = ParConfig(0, frozenset((("q4", 1),)), freeze_cells({1: {"0", "1"}}, "_"))
    nxt, recs = partm_step(EXAMPLE1, cfg)
    assert {f.inst for f in recs} == {5, 6, 7}
    # all firings write at cell 1, nothing carries it: matched symbols go away
    assert as_pairs(nxt)[1][1] == {"0", "*"}


def test_results_enumeration_figure1():
    trace = partm_run(EXAMPLE1, "0", 20)
    res = partm_results(trace.final, 16, "_")
    assert res.total == 2  # cell 0 is two-valued, cell 1 single-valued
    assert not res.truncated
    assert {r[1] for r in res.results} == {"0"}


def test_results_all_singletons():
    trace = dtm_run(ANOMALY, "0", 50)
    final = singleton_config(trace.final)
    res = partm_results(final, 10, "_")
    assert res.total == 1 and len(res.results) == 1


def test_results_truncation_reports_exact_total():
    cfg = ParConfig(0, frozenset((("q1", 0),)), freeze_cells({0: {"0", "1"}, 1: {"0", "1"}, 2: {"0", "1"}}, "_"))
    res = partm_results(cfg, 3, "_")
    assert res.total == 8 and res.truncated and len(res.results) == 3


def test_anomaly_superposed_results_include_both_bits():
    start = ParConfig(0, frozenset((("q1", 0),)), freeze_cells({0: {"0", "1"}}, "_"))
    trace = partm_run_from(ANOMALY, start, 50)
    assert trace.halted
    res = partm_results(trace.final, 100, "_")
    assert {r.get(1) for r in res.results} == {"0", "1"}


def accepting_machine():
    return Machine(
        name="acc",
        states=("q1", "qy", "qn"),
        alphabet=("0", "_"),
        blank="_",
        instructions=(),
        start_state="q1",
        accept_state="qy",
        reject_state="qn",
    )


def test_acceptance_fractions():
    m = accepting_machine()
    single = ParConfig(0, frozenset((("qy", 3),)), ())
    assert partm_acceptance(single, m) == (1, 1)
    mixed = ParConfig(0, frozenset((("qy", 3), ("qn", 3), ("qn", 5))), ())
    frac = partm_acceptance(mixed, m)
    assert (frac.m, frac.n) == (1, 3)


def test_acceptance_requires_distinguished_states():
    with pytest.raises(PrecondError):
        partm_acceptance(ParConfig(0, frozenset((("q1", 0),)), ()), EXAMPLE1)


def test_acceptance_counts_active_pairs():
    from partmlab.problems import CNF, csat_compile, csat_phase3_time

    cnf = CNF(2, ((1, 2), (-1, 2)))
    machine = csat_compile(cnf)
    trace = partm_run(machine, "", csat_phase3_time(cnf) + 4)
    assert trace.halted
    frac = partm_acceptance(trace.final, machine)
    assert frac.n == len(trace.final.active)


def test_conservativity_on_deterministic_corpus():
    for machine, word in deterministic_corpus(60):
        dtm = dtm_run(machine, word, 8)
        par = partm_run(machine, word, 8)
        assert len(dtm.steps) == len(par.steps)
        assert dtm.halted == par.halted and dtm.truncated == par.truncated
        for c, p in zip(dtm.steps, par.steps):
            assert singleton_config(c) == p


def test_over_approximates_branching_corpus():
    for machine, word in branching_corpus(60):
        par = partm_run(machine, word, 8)
        tree = ndtm_run_all(machine, word, 8)
        for path in tree.paths():
            for cfg in path:
                if cfg.time < len(par.steps):
                    assert admits_choice(par.steps[cfg.time], cfg, machine.blank), (
                        machine.name,
                        word,
                        cfg,
                    )


def test_over_approximation_move_write_collision():
    # a move and a write fire on the same cell: the move branch keeps the
    # old symbol, so the cell must retain it alongside the written one
    m = Machine(
        name="mw",
        states=("q1", "q2"),
        alphabet=("0", "1", "_"),
        blank="_",
        instructions=(
            Instruction("q1", "0", "right", "q2"),
            Instruction("q1", "0", "write", "q2", write_symbol="1"),
        ),
        start_state="q1",
    )
    par = partm_run(m, "0", 4)
    assert as_pairs(par.steps[1]) == ({("q2", 0), ("q2", 1)}, {0: {"0", "1"}})
    for cfg in ndtm_run_all(m, "0", 4).leaves():
        assert admits_choice(par.steps[cfg.time], cfg, "_")


def test_monotone_firing_without_marks():
    unmarked = Machine(
        **{
            **EXAMPLE1.__dict__,
            "instructions": tuple(
                Instruction(i.state, i.symbol, i.op, i.next_state, i.write_symbol)
                for i in EXAMPLE1.instructions
            ),
        }
    )
    trace = partm_run(EXAMPLE1, "0", 20)
    for cfg in trace.steps:
        marked_firings = {(f.inst, f.state, f.pos, f.symbol) for f in firing_set(EXAMPLE1, cfg)}
        free_firings = {(f.inst, f.state, f.pos, f.symbol) for f in firing_set(unmarked, cfg)}
        assert marked_firings <= free_firings


def test_tape_frame_property():
    rng = random.Random(DEFAULT_SEED)
    trace = partm_run(EXAMPLE1, "0", 20)
    for t, recs in enumerate(trace.firings):
        wrote = {
            f.pos for f in recs if EXAMPLE1.instructions[f.inst].op == "write"
        }
        before, after = trace.steps[t], trace.steps[t + 1]
        for p in set(dict(before.tape)) | set(dict(after.tape)):
            if p not in wrote:
                assert before.cell(p, "_") == after.cell(p, "_")


def test_state_mark_fires_once_pairs_multiply():
    from partmlab.fixtures import QMARK

    trace = partm_run(QMARK, "", 10)
    assert trace.halted
    # the fork makes two pairs, enabling the marked write one step later
    assert as_pairs(trace.steps[1])[0] == {("a", 1), ("b", -1)}
    assert ("c", 1) in trace.steps[2].active
    # concurrent writes at distinct cells carry each other's blanks
    assert trace.steps[2].cell(1, "_") == {"1", "_"}
    assert trace.steps[2].cell(-1, "_") == {"0", "_"}
    # the pair with no applicable instruction is dropped at the next step
    assert as_pairs(trace.steps[3])[0] == {("b", -1)}


def test_deterministic_machine_trace_equals_dtm_figure():
    trace = dtm_run(ANOMALY, "0", 50)
    par = partm_run(ANOMALY, "0", 50)
    assert [singleton_config(c) for c in trace.steps] == par.steps


def test_trace_json_shape():
    doc = partm_run(EXAMPLE1, "0", 20).to_json()
    step = doc["trace"][1]
    assert step == {"t": 1, "active": [["q2", 0]], "cells": {"0": ["0", "1"]}}
    fired = doc["firings"][0]
    assert fired["t"] == 0
    assert {f["inst"] for f in fired["fired"]} == {0, 1}
    assert set(fired["fired"][0]) == {"inst", "state", "pos", "sym"}
