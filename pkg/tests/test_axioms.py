import pytest

from partmlab.axioms import (
    And,
    Forall,
    Incons,
    Not,
    Possibly,
    Pred,
    TraceModel,
    VARIANT_FOL,
    VARIANT_LFI1,
    VARIANT_S5Q,
    certify_witness,
    contradiction_witness,
    emit_theory,
    expected_axiom_count,
    model_check_window,
    num,
    parse_theory,
    q_atom,
    s_atom,
    search_contradiction,
    serialize_formula,
    serialize_theory,
)
from partmlab.classical import dtm_run
from partmlab.errors import PrecondError
from partmlab.fixtures import (
    AMBIGUITY_REACHING,
    ANOMALY,
    DETERMINISTIC_HALTING,
    EMPTY,
    EXAMPLE1,
    EXAMPLE1_UNMARKED,
    SPREADER,
    STATE_FORK,
)
from partmlab.partm import partm_run


def test_axiom_count_formula():
    for machine in (EXAMPLE1, ANOMALY, EMPTY):
        th = emit_theory(machine, "", VARIANT_FOL)
        assert len(th.axioms) == expected_axiom_count(machine)
    assert expected_axiom_count(EXAMPLE1) == 26


def test_axiom_ids_unique_and_complete():
    th = emit_theory(EXAMPLE1, "0")
    ids = th.ids()
    assert len(set(ids)) == len(ids)
    assert ids[:5] == ["A1", "A2", "A3", "A4", "A5"]
    assert "Aalpha" in ids and "At0" in ids and "Ath" in ids
    assert sum(1 for i in ids if i.startswith("Ai")) == 9
    assert sum(1 for i in ids if i.startswith("Aq:")) == 5
    assert sum(1 for i in ids if i.startswith("As:")) == 4


def test_a4_text_serialization():
    th = emit_theory(EMPTY, "")
    assert serialize_formula(th.formula("A4"), "text") == "forall x. less(x, succ(x))"


def test_a1_text_serialization():
    th = emit_theory(EMPTY, "")
    assert serialize_formula(th.formula("A1"), "text") == "forall z. exists x. eq(z, succ(x))"


def test_structured_roundtrip():
    for variant in (VARIANT_FOL, VARIANT_LFI1, VARIANT_S5Q):
        th = emit_theory(EXAMPLE1, "0", variant)
        assert parse_theory(serialize_theory(th, "sexp")) == th


def test_empty_instruction_machine_vacuous_halt_disjunction():
    th = emit_theory(EMPTY, "")
    text = serialize_formula(th.formula("Ath"))
    assert "false" in text  # the empty head-pair disjunction renders as falsum


def test_s5_variant_uniqueness_regimes():
    th = emit_theory(EXAMPLE1, "0", VARIANT_S5Q)
    axiom = th.formula("Aq:q1")
    text = serialize_formula(axiom)
    assert "(diamond (Q q1 t x))" in text
    assert "not◇" in text
    # the position guard stays classical
    assert "(not (eq y x))" in text
    fol = serialize_formula(emit_theory(EXAMPLE1, "0").formula("Aq:q1"))
    assert "diamond" not in fol and "◇" not in fol


def test_s5_variant_instruction_regimes():
    th = emit_theory(EXAMPLE1, "0", VARIANT_S5Q)
    text = serialize_formula(th.formula("Ai1"))
    assert text.count("and◇") == 2  # antecedent + first consequent conjunction
    fol = serialize_formula(emit_theory(EXAMPLE1, "0").formula("Ai1"))
    assert "and◇" not in fol


def test_marked_instruction_gets_inconsistency_connective():
    th = emit_theory(EXAMPLE1, "0")
    text = serialize_formula(th.formula("Ai8"))
    assert "(incons (S 1 t x))" in text
    unmarked = serialize_formula(th.formula("Ai7"))
    assert "incons" not in unmarked


def test_variants_share_skeleton():
    def strip(f):
        if isinstance(f, Not):
            return ("not", strip(f.sub))
        if isinstance(f, And):
            return ("and", strip(f.left), strip(f.right))
        if isinstance(f, Possibly):
            return strip(f.sub)
        if isinstance(f, Forall):
            return ("forall", f.var, strip(f.body))
        if hasattr(f, "left"):
            return (type(f).__name__, strip(f.left), strip(f.right))
        if hasattr(f, "sub"):
            return (type(f).__name__, strip(f.sub))
        if hasattr(f, "body"):
            return (type(f).__name__, f.var, strip(f.body))
        return f

    for machine in (EXAMPLE1, ANOMALY):
        fol = emit_theory(machine, "0", VARIANT_FOL)
        lfi = emit_theory(machine, "0", VARIANT_LFI1)
        s5 = emit_theory(machine, "0", VARIANT_S5Q)
        for (a, f1), (_, f2), (_, f3) in zip(fol.axioms, lfi.axioms, s5.axioms):
            assert strip(f1) == strip(f2) == strip(f3), a


def test_deterministic_fixture_traces_satisfy_theory():
    for machine, word in DETERMINISTIC_HALTING:
        trace = dtm_run(machine, word, 100)
        assert trace.halted
        model = TraceModel.from_dtm_trace(machine, trace)
        report = model_check_window(emit_theory(machine, word), model)
        assert report.all_passed, (machine.name, word, report.failures())


def test_mutation_deleted_fact_fails_instruction_axiom():
    trace = dtm_run(ANOMALY, "0", 100)
    model = TraceModel.from_dtm_trace(ANOMALY, trace)
    mutated = TraceModel(
        q_facts=frozenset(f for f in model.q_facts if f[1] != 1),
        s_facts=model.s_facts,
        t_range=model.t_range,
        x_range=model.x_range,
        last_time=model.last_time,
        truncated=model.truncated,
    )
    report = model_check_window(emit_theory(ANOMALY, "0"), mutated)
    failures = report.failures()
    assert any(a.startswith("Ai") for a in failures)
    axiom = next(a for a in failures if a.startswith("Ai"))
    assert report.results[axiom]["instance"]["t"] == 0


def test_a5_passes_on_any_model():
    for machine, word in DETERMINISTIC_HALTING:
        trace = dtm_run(machine, word, 100)
        model = TraceModel.from_dtm_trace(machine, trace)
        report = model_check_window(emit_theory(machine, word), model)
        assert report.results["A5"]["status"] == "pass"


def test_truncated_trace_yields_partial_not_fail():
    from partmlab.fixtures import OSCILLATOR

    trace = dtm_run(OSCILLATOR, "0", 6)
    assert trace.truncated
    model = TraceModel.from_dtm_trace(OSCILLATOR, trace)
    report = model_check_window(emit_theory(OSCILLATOR, "0"), model)
    statuses = {r["status"] for r in report.results.values()}
    assert "fail" not in statuses
    assert "partial" in statuses  # the boundary instruction axiom


def test_model_check_rejects_non_classical_variant():
    trace = dtm_run(ANOMALY, "0", 100)
    model = TraceModel.from_dtm_trace(ANOMALY, trace)
    with pytest.raises(PrecondError):
        model_check_window(emit_theory(ANOMALY, "0", VARIANT_S5Q), model)


def test_witness_example1():
    w = contradiction_witness(EXAMPLE1, "0", 20)
    assert w is not None
    assert w.time == 1 and w.pos == 0 and w.kind == "symbol"
    assert w.phi == s_atom("0", num(1), num(0))
    assert w.premise == s_atom("1", num(1), num(0))
    assert w.instruction_axioms == ("Ai1", "Ai2")
    assert w.uniqueness_axiom == "As:1"


def test_witness_none_for_deterministic_machine():
    assert contradiction_witness(ANOMALY, "0", 50) is None
    found = search_contradiction(ANOMALY, "0", 50)
    assert found.witness is None and not found.truncated


def test_witness_truncation_flag():
    from partmlab.fixtures import RIGHT_WALKER

    found = search_contradiction(RIGHT_WALKER, "", 5)
    assert found.witness is None and found.truncated


def test_state_fork_gives_q_witness():
    w = contradiction_witness(STATE_FORK, "0", 10)
    assert w is not None and w.kind == "state"
    assert w.phi == q_atom("q2", num(1), num(0))
    assert w.premise == q_atom("q3", num(1), num(0))
    assert w.uniqueness_axiom == "Aq:q3"


def test_spreader_gives_q_witness_with_distinct_positions():
    w = contradiction_witness(SPREADER, "", 10)
    assert w is not None and w.kind == "state"


def test_every_ambiguity_fixture_witness_certified():
    for machine, word in AMBIGUITY_REACHING:
        found = search_contradiction(machine, word, 20)
        assert found.witness is not None, machine.name
        model = TraceModel.from_par_trace(machine, found.trace)
        assert certify_witness(found.witness, model), machine.name


def test_witness_atoms_hold_in_harvested_model():
    trace = partm_run(EXAMPLE1, "0", 20)
    model = TraceModel.from_par_trace(EXAMPLE1, trace)
    w = contradiction_witness(EXAMPLE1, "0", 20)
    from partmlab.axioms import _Evaluator

    ev = _Evaluator(model)
    assert ev.holds(w.phi, {})
    assert ev.holds(w.premise, {})


def test_incons_evaluates_as_multiplicity():
    trace = partm_run(EXAMPLE1, "0", 20)
    model = TraceModel.from_par_trace(EXAMPLE1, trace)
    from partmlab.axioms import _Evaluator

    ev = _Evaluator(model)
    # cell 0 is two-valued from t=1 on; cell 1 never is
    assert ev.holds(Incons(s_atom("0", num(1), num(0))), {})
    assert not ev.holds(Incons(s_atom("1", num(3), num(1))), {})


def test_emit_rejects_bad_input_and_start():
    with pytest.raises(PrecondError):
        emit_theory(EXAMPLE1, "7")
    neg = EXAMPLE1.__dict__ | {"start_position": -1}
    from partmlab.machine import Machine

    with pytest.raises(PrecondError):
        emit_theory(Machine(**neg), "0")
