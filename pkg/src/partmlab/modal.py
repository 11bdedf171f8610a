"""Propositional S5 kernel with small-model satisfiability, the translation
from the paraconsistent non-separable signature into S5, and a machine-checked
catalog of the connective properties the rest of the package relies on.

The non-separable signature is {negd, conjd, or, implies}: ``negd A``
translates to ``diamond(not A)`` and ``A conjd B`` to ``diamond(A and B)``;
disjunction and implication translate homomorphically.  Satisfiability uses
the S5 small-model property: a satisfiable formula has a model whose worlds
are distinct atom valuations, at most (number of modal subformulas + 1) of
them, so candidate world sets are enumerated by increasing size.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Optional, Union

from .errors import BudgetError


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Diamond:
    sub: "Formula"


@dataclass(frozen=True)
class Box:
    sub: "Formula"


@dataclass(frozen=True)
class NegD:
    sub: "Formula"


@dataclass(frozen=True)
class ConjD:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, Iff, Diamond, Box, NegD, ConjD]


def translate_pns5(f: Formula) -> Formula:
    """Translate a non-separable-signature formula into plain S5."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, NegD):
        return Diamond(Not(translate_pns5(f.sub)))
    if isinstance(f, ConjD):
        return Diamond(And(translate_pns5(f.left), translate_pns5(f.right)))
    if isinstance(f, Or):
        return Or(translate_pns5(f.left), translate_pns5(f.right))
    if isinstance(f, Implies):
        return Implies(translate_pns5(f.left), translate_pns5(f.right))
    raise ValueError(f"not in the non-separable signature: {type(f).__name__}")


# Derived connectives of the non-separable logic.


def bullet(a: Formula) -> Formula:
    """Inconsistency: a holds together with its paraconsistent negation."""
    return ConjD(a, NegD(a))


def circ(a: Formula) -> Formula:
    """Consistency: the paraconsistent negation of the inconsistency of a."""
    return NegD(bullet(a))


def classical_neg(a: Formula) -> Formula:
    return ConjD(NegD(a), circ(a))


def classical_conj(a: Formula, b: Formula) -> Formula:
    return ConjD(ConjD(a, b), ConjD(circ(a), circ(b)))


def atoms_of(f: Formula) -> list[str]:
    out: set[str] = set()

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            out.add(g.name)
        elif isinstance(g, (Not, Diamond, Box, NegD)):
            walk(g.sub)
        else:
            walk(g.left)
            walk(g.right)

    walk(f)
    return sorted(out)


def modal_subformulas(f: Formula) -> set[Formula]:
    out: set[Formula] = set()

    def walk(g: Formula) -> None:
        if isinstance(g, (Diamond, Box)):
            out.add(g)
            walk(g.sub)
        elif isinstance(g, Not):
            walk(g.sub)
        elif isinstance(g, Atom):
            pass
        elif isinstance(g, (NegD, ConjD)):
            raise ValueError("translate before deciding satisfiability")
        else:
            walk(g.left)
            walk(g.right)

    walk(f)
    return out


@dataclass
class KripkeModel:
    worlds: tuple[dict[str, bool], ...]  # universal accessibility
    designated: int = 0

    def to_json(self) -> dict:
        return {"worlds": [dict(sorted(w.items())) for w in self.worlds], "designated": self.designated}


def eval_world(model: KripkeModel, world: int, f: Formula) -> bool:
    """Direct recursive evaluation; the independent check for found models."""
    if isinstance(f, Atom):
        return model.worlds[world].get(f.name, False)
    if isinstance(f, Not):
        return not eval_world(model, world, f.sub)
    if isinstance(f, And):
        return eval_world(model, world, f.left) and eval_world(model, world, f.right)
    if isinstance(f, Or):
        return eval_world(model, world, f.left) or eval_world(model, world, f.right)
    if isinstance(f, Implies):
        return (not eval_world(model, world, f.left)) or eval_world(model, world, f.right)
    if isinstance(f, Iff):
        return eval_world(model, world, f.left) == eval_world(model, world, f.right)
    if isinstance(f, Diamond):
        return any(eval_world(model, w, f.sub) for w in range(len(model.worlds)))
    if isinstance(f, Box):
        return all(eval_world(model, w, f.sub) for w in range(len(model.worlds)))
    raise ValueError(f"not an S5 formula: {type(f).__name__}")


_CANDIDATE_CAP = 5_000_000


def s5_satisfiable(f: Formula, max_worlds: Optional[int] = None) -> Optional[KripkeModel]:
    """Smallest model of f (by world count) or None.

    Worlds are atom valuations; candidate world sets are enumerated by
    increasing size up to the small-model bound, so a returned model has at
    most (modal subformula count + 1) worlds.
    """
    names = atoms_of(f)
    bound = len(modal_subformulas(f)) + 1 if max_worlds is None else max_worlds
    valuations = [dict(zip(names, bits)) for bits in product((False, True), repeat=len(names))]
    bound = min(bound, len(valuations))

    candidates = 0
    for k in range(1, bound + 1):
        for subset in combinations(range(len(valuations)), k):
            candidates += 1
            if candidates > _CANDIDATE_CAP:
                raise BudgetError("satisfiability search exceeded the candidate cap")
            mask = _sat_mask(f, [valuations[i] for i in subset])
            if mask:
                model = KripkeModel(tuple(valuations[i] for i in subset))
                model.designated = (mask & -mask).bit_length() - 1
                return model
    return None


def _sat_mask(f: Formula, worlds: list[dict[str, bool]]) -> int:
    full = (1 << len(worlds)) - 1
    memo: dict[Formula, int] = {}

    def rec(g: Formula) -> int:
        got = memo.get(g)
        if got is not None:
            return got
        if isinstance(g, Atom):
            m = 0
            for i, w in enumerate(worlds):
                if w.get(g.name, False):
                    m |= 1 << i
        elif isinstance(g, Not):
            m = full ^ rec(g.sub)
        elif isinstance(g, And):
            m = rec(g.left) & rec(g.right)
        elif isinstance(g, Or):
            m = rec(g.left) | rec(g.right)
        elif isinstance(g, Implies):
            m = (full ^ rec(g.left)) | rec(g.right)
        elif isinstance(g, Iff):
            m = full ^ (rec(g.left) ^ rec(g.right))
        elif isinstance(g, Diamond):
            m = full if rec(g.sub) else 0
        elif isinstance(g, Box):
            m = full if rec(g.sub) == full else 0
        else:
            raise ValueError(f"not an S5 formula: {type(g).__name__}")
        memo[g] = m
        return m

    return rec(f)


def s5_valid(f: Formula) -> bool:
    return s5_satisfiable(Not(f)) is None


class KernelCheckError(AssertionError):
    """The connective catalog failed: the kernel cannot be trusted."""


def _right_conj(parts: list[Formula]) -> Formula:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def catalog_entries() -> list[tuple[str, str, Formula]]:
    """(entry id, 'valid'|'invalid', S5 formula) for every checked claim."""
    p, q, r, s = Atom("p"), Atom("q"), Atom("r"), Atom("s")
    t = translate_pns5
    entries: list[tuple[str, str, Formula]] = []

    # non-separability: the conjunction does not yield its conjuncts
    entries.append(("nonsep-left", "invalid", Implies(t(ConjD(p, q)), p)))
    entries.append(("nonsep-right", "invalid", Implies(t(ConjD(p, q)), q)))
    # adjunction on theorem instances: valid A, B give a valid conjunction
    taut1, taut2 = Implies(p, p), Implies(q, q)
    entries.append(("adjunction-taut", "valid", Diamond(And(taut1, taut2))))
    comm_inst = t(Implies(ConjD(p, q), ConjD(q, p)))
    entries.append(("adjunction-thm", "valid", Diamond(And(comm_inst, taut1))))
    # non-associativity
    entries.append(
        ("non-associativity", "invalid", Iff(t(ConjD(p, ConjD(q, r))), t(ConjD(ConjD(p, q), r))))
    )
    # commutativity
    entries.append(("commutativity", "valid", Iff(t(ConjD(p, q)), t(ConjD(q, p)))))
    # no recombination across two non-separable pairs
    entries.append(
        (
            "no-combination",
            "invalid",
            Implies(
                And(t(ConjD(p, q)), t(ConjD(r, s))),
                Or(t(ConjD(p, s)), t(ConjD(r, q))),
            ),
        )
    )
    # prefixed multi-conjunction collapses to one diamond (n = 3 and 4)
    entries.append(
        (
            "multi-conj-3",
            "valid",
            Iff(Diamond(And(p, _right_conj([q, r]))), Diamond(And(And(p, q), r))),
        )
    )
    entries.append(
        (
            "multi-conj-4",
            "valid",
            Iff(
                Diamond(And(p, _right_conj([q, r, s]))),
                Diamond(And(And(And(p, q), r), s)),
            ),
        )
    )
    # derived connectives against their plain S5 forms
    entries.append(("incons-def", "valid", Iff(t(bullet(p)), And(Diamond(p), Diamond(Not(p))))))
    entries.append(("consis-def", "valid", Iff(t(circ(p)), Or(Box(Not(p)), Box(p)))))
    entries.append(
        (
            "classical-neg-form",
            "valid",
            Iff(t(classical_neg(p)), And(Diamond(Not(p)), Or(Box(Not(p)), Box(p)))),
        )
    )
    entries.append(("classical-neg-entails", "valid", Implies(t(classical_neg(p)), Not(p))))
    four_boxes = Or(
        Box(And(p, q)),
        Or(Box(And(p, Not(q))), Or(Box(And(Not(p), q)), Box(And(Not(p), Not(q))))),
    )
    entries.append(
        (
            "classical-conj-form",
            "valid",
            Iff(t(classical_conj(p, q)), And(Diamond(And(p, q)), four_boxes)),
        )
    )
    entries.append(("classical-conj-entails", "valid", Implies(t(classical_conj(p, q)), And(p, q))))
    # the four explosion principles
    expl = [
        classical_conj(p, classical_conj(NegD(p), circ(p))),
        ConjD(p, ConjD(NegD(p), circ(p))),
        ConjD(ConjD(p, NegD(p)), circ(p)),
        ConjD(ConjD(p, circ(p)), classical_neg(p)),
    ]
    for i, ante in enumerate(expl, start=1):
        entries.append((f"explosion-{i}", "valid", Implies(t(ante), q)))
    return entries


def check_catalog(strict: bool = True) -> dict[str, dict]:
    """Verify every catalog claim; countermodels are re-checked by direct
    evaluation.  With strict=True any failure raises KernelCheckError."""
    report: dict[str, dict] = {}
    failures: list[str] = []
    for entry_id, claim, formula in catalog_entries():
        if claim == "valid":
            ok = s5_valid(formula)
            report[entry_id] = {"claim": claim, "status": "pass" if ok else "fail"}
        else:
            model = s5_satisfiable(Not(formula))
            ok = model is not None and eval_world(model, model.designated, Not(formula))
            report[entry_id] = {"claim": claim, "status": "pass" if ok else "fail"}
            if model is not None:
                report[entry_id]["model"] = model.to_json()
        if not ok:
            failures.append(entry_id)
    if strict and failures:
        raise KernelCheckError(f"catalog entries failed: {', '.join(failures)}")
    return report
