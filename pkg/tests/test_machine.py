import pytest

from partmlab.corpus import DEFAULT_SEED, machine_corpus
from partmlab.fixtures import ANOMALY, EXAMPLE1, EXAMPLE1_SRC
from partmlab.machine import (
    DslError,
    Instruction,
    WRITE,
    parse_machine,
    serialize_machine,
    validate,
)


def test_parse_example1():
    m = parse_machine(EXAMPLE1_SRC)
    assert m.name == "example1"
    assert len(m.states) == 5
    assert m.alphabet == ("0", "1", "*", "_")
    assert m.blank == "_"
    assert len(m.instructions) == 9
    i8 = m.instructions[7]
    assert i8.state == "q4" and i8.symbol == "1"
    assert i8.symbol_marked and not i8.state_marked
    assert i8.op == WRITE and i8.write_symbol == "*"
    assert m.start_state == "q1" and m.start_position == 0


def test_parse_empty_machine_is_valid():
    m = parse_machine("machine tiny\nstates: q1\nsymbols: _\nblank: _\nstart: q1 @ 0\n")
    assert m.instructions == ()
    assert validate(m).deterministic


def test_undeclared_state_in_instruction():
    src = "machine bad\nstates: q1\nsymbols: 0 _\nblank: _\nstart: q1 @ 0\ninst: q1 0 -> right , q9\n"
    with pytest.raises(DslError) as err:
        parse_machine(src)
    assert "q9" in str(err.value)
    assert err.value.line == 6


def test_duplicate_declarations_rejected():
    with pytest.raises(DslError):
        parse_machine("machine d\nstates: q1 q1\nsymbols: _\nblank: _\nstart: q1 @ 0\n")
    with pytest.raises(DslError):
        parse_machine("machine d\nstates: q1\nsymbols: _ _\nblank: _\nstart: q1 @ 0\n")


def test_syntax_error_carries_position():
    with pytest.raises(DslError) as err:
        parse_machine("machine x\nstates: q1\nsymbols: _\nblank: _\nstart: q1 0\n")
    assert err.value.line == 5


def test_roundtrip_example1():
    assert parse_machine(serialize_machine(EXAMPLE1)) == EXAMPLE1


def test_roundtrip_random_machines():
    for machine, _ in machine_corpus(60, seed=DEFAULT_SEED + 1):
        assert parse_machine(serialize_machine(machine)) == machine


def test_validate_example1_ambiguity():
    report = validate(EXAMPLE1)
    assert not report.deterministic
    assert report.uses_incons_marks
    # the two writes from (q1, 0) form the only ambiguous head group
    assert report.ambiguous_groups == [(0, 1)]


def test_validate_anomaly_deterministic():
    report = validate(ANOMALY)
    assert report.deterministic
    assert report.ambiguous_groups == []
    assert not report.uses_incons_marks


def test_validate_is_pure():
    a = validate(EXAMPLE1)
    b = validate(EXAMPLE1)
    assert a == b


def test_deterministic_iff_no_groups_and_no_marks():
    for machine, _ in machine_corpus(80, seed=DEFAULT_SEED + 2):
        report = validate(machine)
        assert report.deterministic == (not report.ambiguous_groups and not report.uses_incons_marks)
        seen = {}
        for idx, inst in enumerate(machine.instructions):
            seen.setdefault(inst.head(), []).append(idx)
        groups = sorted(tuple(v) for v in seen.values() if len(v) >= 2)
        assert sorted(report.ambiguous_groups) == groups


def test_accept_reject_must_differ():
    src = (
        "machine a\nstates: q1 qy\nsymbols: _\nblank: _\nstart: q1 @ 0\n"
        "accept: qy\nreject: qy\n"
    )
    with pytest.raises(DslError):
        parse_machine(src)


def test_comments_and_negative_start():
    src = (
        "# a machine\nmachine c\nstates: q1\nsymbols: _\nblank: _\n"
        "start: q1 @ -3  # head starts left of the input\n"
    )
    m = parse_machine(src)
    assert m.start_position == -3
