from collections import Counter

import pytest

from partmlab.classical import ClassicalConfig, dtm_run, ndtm_run_all
from partmlab.corpus import branching_corpus, deterministic_corpus
from partmlab.epartm import (
    Superposition,
    entangled,
    epartm_acceptance,
    epartm_run,
    epartm_run_from,
    epartm_step,
)
from partmlab.errors import PrecondError
from partmlab.fixtures import EXAMPLE1_UNMARKED
from partmlab.machine import Instruction, Machine, WRITE


def cfg(state, pos, cells=(), time=0):
    return ClassicalConfig(state, pos, tuple(sorted(cells)), time)


def cores(sp):
    return Counter(c.core() for c in sp.configs)


def test_initial_split_mirrors_ambiguity():
    trace = epartm_run(EXAMPLE1_UNMARKED, "0", 1)
    sp = trace.steps[1]
    assert cores(sp) == Counter(
        [("q2", 0, ((0, "0"),)), ("q2", 0, ((0, "1"),))]
    )


def test_no_mixing_every_config_is_a_path_prefix():
    # every superposed configuration must occur on some branching-run path:
    # computation paths never mix
    trace = epartm_run(EXAMPLE1_UNMARKED, "0", 20)
    assert trace.halted
    tree = ndtm_run_all(EXAMPLE1_UNMARKED, "0", 20)
    reachable = set()
    for path in tree.paths():
        for c in path:
            reachable.add((c.time, c.core()))
            if c is path[-1]:
                # a halted path persists frozen in later snapshots
                for t in range(c.time, len(trace.steps)):
                    reachable.add((t, c.core()))
    for sp in trace.steps:
        for c in sp.configs:
            assert (c.time, c.core()) in reachable


def test_singleton_deterministic_equals_dtm():
    for machine, word in deterministic_corpus(50):
        dtm = dtm_run(machine, word, 8)
        ep = epartm_run(machine, word, 8)
        assert dtm.halted == ep.halted and dtm.truncated == ep.truncated
        assert len(dtm.steps) == len(ep.steps)
        for c, sp in zip(dtm.steps, ep.steps):
            assert len(sp.configs) == 1
            assert sp.configs[0] == c


def amplifier_machine():
    insts = []
    for sym in ("0", "1", "_"):
        insts.append(Instruction("qy", sym, WRITE, "qy", write_symbol=sym, state_marked=True))
        insts.append(Instruction("qn", sym, WRITE, "qy", write_symbol=sym, state_marked=True))
    return Machine(
        name="amp",
        states=("qy", "qn"),
        alphabet=("0", "1", "_"),
        blank="_",
        instructions=tuple(insts),
        start_state="qy",
        accept_state="qy",
        reject_state="qn",
    )


def test_amplification_collapses_in_two_steps():
    m = amplifier_machine()
    sp = Superposition.of([cfg("qy", 0, [(0, "0")]), cfg("qn", 0, [(0, "1")])], 0)
    trace = epartm_run_from(m, sp, 10)
    assert trace.halted
    assert len(trace.steps) == 2  # one amplifying step, then global freeze
    assert all(c.state == "qy" for c in trace.final.configs)
    assert epartm_acceptance(trace.final, m) == (2, 2)


def test_unanimous_rejection_freezes_immediately():
    m = amplifier_machine()
    sp = Superposition.of([cfg("qn", 0, [(0, "0")]), cfg("qn", 0, [(0, "1")])], 0)
    trace = epartm_run_from(m, sp, 10)
    assert trace.halted and len(trace.steps) == 1
    assert epartm_acceptance(trace.final, m) == (0, 2)


def test_frozen_config_persists_until_halt():
    # one config halts immediately in a dead state, the other keeps writing
    m = Machine(
        name="fz",
        states=("a", "b", "dead"),
        alphabet=("0", "1", "_"),
        blank="_",
        instructions=(
            Instruction("a", "_", WRITE, "dead", write_symbol="0"),
            Instruction("a", "_", WRITE, "b", write_symbol="1"),
            Instruction("b", "1", WRITE, "b", write_symbol="0"),
        ),
        start_state="a",
    )
    trace = epartm_run(m, "", 10)
    assert trace.halted
    frozen = [c for sp in trace.steps[1:] for c in sp.configs if c.state == "dead"]
    assert all(c.core() == ("dead", 0, ((0, "0"),)) for c in frozen)
    assert len(frozen) == len(trace.steps) - 1


def test_frozen_config_can_resume_when_predicates_change():
    # the symbol-marked instruction is blocked while every configuration
    # agrees on cell 0; once another branch rewrites its own cell 0, the
    # frozen configuration resumes
    m = Machine(
        name="wake",
        states=("r", "a", "b", "w"),
        alphabet=("0", "1", "_"),
        blank="_",
        instructions=(
            Instruction("r", "0", WRITE, "w", write_symbol="1", symbol_marked=True),
            Instruction("a", "0", WRITE, "b", write_symbol="1"),
        ),
        start_state="r",
    )
    sp0 = Superposition.of([cfg("r", 0, [(0, "0")]), cfg("a", 0, [(0, "0")])], 0)
    sp1 = epartm_step(m, sp0)
    # the r-copy was frozen at t=0 (cell 0 uniform) while the a-copy wrote
    assert cores(sp1) == Counter([("r", 0, ((0, "0"),)), ("b", 0, ((0, "1"),))])
    sp2 = epartm_step(m, sp1)
    assert ("w", 0, ((0, "1"),)) in cores(sp2)
    trace = epartm_run_from(m, sp0, 10)
    assert trace.halted and len(trace.steps) == 3


def test_leaf_multiset_equivalence_on_corpus():
    for machine, word in branching_corpus(60):
        tree = ndtm_run_all(machine, word, 8)
        ep = epartm_run(machine, word, 8)
        assert ep.halted
        assert Counter(c.core() for c in tree.leaves()) == Counter(ep.final.cores())


def test_synchrony_predicates_from_pre_step_snapshot():
    # both configs flip state simultaneously; with post-step evaluation the
    # marked instruction would already see the divergence at t=0
    m = Machine(
        name="sync",
        states=("a", "b", "c"),
        alphabet=("0", "1", "_"),
        blank="_",
        instructions=(
            Instruction("a", "_", WRITE, "b", write_symbol="0"),
            Instruction("a", "_", WRITE, "c", write_symbol="1"),
            Instruction("b", "0", WRITE, "b", write_symbol="1", state_marked=True),
        ),
        start_state="a",
    )
    sp1 = epartm_step(m, Superposition.of([cfg("a", 0)], 0))
    # after the split the marked instruction may fire (configs now differ)
    assert cores(sp1) == Counter([("b", 0, ((0, "0"),)), ("c", 0, ((0, "1"),))])
    sp2 = epartm_step(m, sp1)
    assert ("b", 0, ((0, "1"),)) in cores(sp2)


def test_dedup_flag_merges_identical_configs():
    m = Machine(
        name="dup",
        states=("a", "b"),
        alphabet=("0", "_"),
        blank="_",
        instructions=(
            Instruction("a", "_", WRITE, "b", write_symbol="0"),
            Instruction("a", "_", WRITE, "b", write_symbol="0"),
        ),
        start_state="a",
    )
    plain = epartm_run(m, "", 5)
    assert len(plain.final.configs) == 2
    deduped = epartm_run(m, "", 5, dedup=True)
    assert len(deduped.final.configs) == 1


def test_entangled_witness():
    sp = Superposition.of(
        [cfg("q1", 0, [(3, "0")]), cfg("q2", 0, [(3, "1")])], 0
    )
    w = entangled(sp, 0, 3, "state-symbol", blank="_")
    assert w is not None
    assert set(w.present) == {("q1", "0"), ("q2", "1")}
    assert w.absent in (("q1", "1"), ("q2", "0"))


def test_singleton_never_entangled():
    sp = Superposition.of([cfg("q1", 0, [(3, "0")])], 0)
    assert entangled(sp, 0, 3, "state-symbol", blank="_") is None


def test_product_superposition_not_entangled():
    configs = [
        cfg("q1", 0, [(3, "0")]),
        cfg("q1", 0, [(3, "1")]),
        cfg("q2", 0, [(3, "0")]),
        cfg("q2", 0, [(3, "1")]),
    ]
    assert entangled(Superposition.of(configs, 0), 0, 3, "state-symbol", blank="_") is None


def test_symbol_symbol_entanglement():
    sp = Superposition.of(
        [cfg("q", 9, [(0, "0"), (1, "0")]), cfg("q", 9, [(0, "1"), (1, "1")])], 0
    )
    assert entangled(sp, 0, 1, "symbol-symbol", blank="_") is not None
    product = Superposition.of(
        [cfg("q", 9, [(0, a), (1, b)]) for a in ("0", "1") for b in ("0", "1")], 0
    )
    assert entangled(product, 0, 1, "symbol-symbol", blank="_") is None


def test_acceptance_mixed_and_pure():
    m = amplifier_machine()
    sp = Superposition.of(
        [cfg("qy", 0), cfg("qy", 1, [(0, "1")]), cfg("qn", 0)], 0
    )
    assert epartm_acceptance(sp, m) == (2, 3)
    allno = Superposition.of([cfg("qn", i) for i in range(4)], 0)
    assert epartm_acceptance(allno, m) == (0, 4)


def test_acceptance_needs_distinguished_states():
    with pytest.raises(PrecondError):
        epartm_acceptance(Superposition.of([cfg("q1", 0)], 0), EXAMPLE1_UNMARKED)


def test_superposition_json_groups_duplicates():
    sp = Superposition.of([cfg("a", 0), cfg("a", 0), cfg("b", 1)], 3)
    doc = sp.to_json()
    assert doc["t"] == 3
    assert doc["configs"][0] == {"state": "a", "pos": 0, "cells": {}, "count": 2}
    assert doc["configs"][1]["count"] == 1
