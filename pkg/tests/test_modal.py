import pytest

from partmlab.modal import (
    And,
    Atom,
    Box,
    ConjD,
    Diamond,
    Iff,
    Implies,
    KernelCheckError,
    NegD,
    Not,
    Or,
    bullet,
    check_catalog,
    circ,
    classical_conj,
    classical_neg,
    eval_world,
    modal_subformulas,
    s5_satisfiable,
    s5_valid,
    translate_pns5,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_translation_clauses():
    assert translate_pns5(p) == p
    assert translate_pns5(NegD(p)) == Diamond(Not(p))
    assert translate_pns5(ConjD(p, q)) == Diamond(And(p, q))
    assert translate_pns5(Or(p, q)) == Or(p, q)
    assert translate_pns5(Implies(p, q)) == Implies(p, q)


def test_translation_nested():
    f = ConjD(p, ConjD(q, r))
    assert translate_pns5(f) == Diamond(And(p, Diamond(And(q, r))))


def test_translation_rejects_s5_nodes():
    with pytest.raises(ValueError):
        translate_pns5(Diamond(p))
    with pytest.raises(ValueError):
        translate_pns5(Not(p))


def test_translation_size_linear():
    def size(f):
        if isinstance(f, Atom):
            return 1
        if hasattr(f, "sub"):
            return 1 + size(f.sub)
        return 1 + size(f.left) + size(f.right)

    f = p
    for _ in range(6):
        f = ConjD(f, NegD(f))
    assert size(translate_pns5(f)) <= 3 * size(f)


def test_forced_two_world_model():
    model = s5_satisfiable(And(Diamond(p), Diamond(Not(p))))
    assert model is not None and len(model.worlds) == 2
    values = {w["p"] for w in model.worlds}
    assert values == {True, False}


def test_contradiction_unsatisfiable():
    assert s5_satisfiable(And(p, Not(p))) is None


def test_non_associativity_countermodel():
    f = Iff(
        translate_pns5(ConjD(p, ConjD(q, r))),
        translate_pns5(ConjD(ConjD(p, q), r)),
    )
    assert not s5_valid(f)
    model = s5_satisfiable(Not(f))
    assert model is not None
    assert eval_world(model, model.designated, Not(f))


def test_small_model_bound_respected():
    f = And(Diamond(p), And(Diamond(Not(p)), Diamond(q)))
    model = s5_satisfiable(f)
    assert model is not None
    assert len(model.worlds) <= len(modal_subformulas(f)) + 1
    assert eval_world(model, model.designated, f)


def test_found_models_satisfy_their_formulas():
    cases = [
        Diamond(p),
        Or(p, Diamond(Not(p))),
        And(Box(Implies(p, q)), Diamond(p)),
        Not(Box(p)),
        translate_pns5(ConjD(p, NegD(p))),
    ]
    for f in cases:
        model = s5_satisfiable(f)
        assert model is not None
        assert eval_world(model, model.designated, f)


def test_box_diamond_duality():
    assert s5_valid(Iff(Box(p), Not(Diamond(Not(p)))))
    assert s5_valid(Implies(Box(p), p))
    assert s5_valid(Implies(Diamond(Diamond(p)), Diamond(p)))  # the s5 collapse
    assert not s5_valid(Implies(Diamond(p), p))


def test_commutativity_valid():
    assert s5_valid(Iff(translate_pns5(ConjD(p, q)), translate_pns5(ConjD(q, p))))


def test_incons_equivalence():
    assert s5_valid(Iff(translate_pns5(bullet(p)), And(Diamond(p), Diamond(Not(p)))))


def test_consis_equivalence():
    assert s5_valid(Iff(translate_pns5(circ(p)), Or(Box(Not(p)), Box(p))))


def test_no_plain_explosion():
    # the point of the construction: inconsistency alone does not explode
    assert not s5_valid(Implies(translate_pns5(ConjD(p, NegD(p))), q))


def test_classical_definitions_entail():
    assert s5_valid(Implies(translate_pns5(classical_neg(p)), Not(p)))
    assert s5_valid(Implies(translate_pns5(classical_conj(p, q)), And(p, q)))


def test_catalog_all_pass():
    report = check_catalog(strict=True)
    assert all(entry["status"] == "pass" for entry in report.values())
    expected = {
        "nonsep-left",
        "nonsep-right",
        "adjunction-taut",
        "adjunction-thm",
        "non-associativity",
        "commutativity",
        "no-combination",
        "multi-conj-3",
        "multi-conj-4",
        "incons-def",
        "consis-def",
        "classical-neg-form",
        "classical-neg-entails",
        "classical-conj-form",
        "classical-conj-entails",
        "explosion-1",
        "explosion-2",
        "explosion-3",
        "explosion-4",
    }
    assert set(report) == expected


def test_catalog_countermodels_recorded():
    report = check_catalog(strict=True)
    for entry_id in ("nonsep-left", "non-associativity", "no-combination"):
        assert "model" in report[entry_id]
        assert len(report[entry_id]["model"]["worlds"]) >= 1
