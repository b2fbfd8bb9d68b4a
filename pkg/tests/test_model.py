import pytest
from hypothesis import given

from elrc.model import (
    BOT,
    TOP,
    Atom,
    Conj,
    DefeasibleNominalError,
    DefNominal,
    Exists,
    FreshNameSource,
    KnowledgeBase,
    Nominal,
    StrictGci,
    canonicalize,
    is_nominal_safe_kb,
    is_nsafe_concept,
    is_safe_axiom,
    is_safe_concept,
    signature,
)
from elrc.parse import parse_concept

from generators import NOMINAL, random_concept, random_safe_nominal_kb, seeds

import random

A, B, C = Atom("A"), Atom("B"), Atom("C")


def test_canonicalize_sorts_and_dedups():
    assert canonicalize(Conj((B, A, A))) == Conj((A, B))


def test_canonicalize_top_is_identity():
    assert canonicalize(TOP) == TOP


def test_canonicalize_flattens():
    assert canonicalize(Conj((Conj((A, B)), C))) == Conj((A, B, C))


def test_conj_needs_two_operands():
    with pytest.raises(ValueError):
        Conj((A,))


@given(seeds)
def test_canonicalize_idempotent(seed):
    c = random_concept(random.Random(seed), NOMINAL)
    assert canonicalize(canonicalize(c)) == canonicalize(c)


@pytest.mark.parametrize(
    "text, safe",
    [("some r. {a}", True), ("{a}", False), ("A & some r. {b}", True), ("top", True), ("{a} & A", False)],
)
def test_safe_concept(text, safe):
    assert is_safe_concept(parse_concept(text)) is safe


@pytest.mark.parametrize("text, nsafe", [("{a}", True), ("{a} & A", False), ("top", True)])
def test_nsafe_concept(text, nsafe):
    assert is_nsafe_concept(parse_concept(text)) is nsafe


def test_safeness_rejects_defeasible_nominals_directly():
    with pytest.raises(DefeasibleNominalError):
        is_safe_concept(DefNominal("a"))


def test_nosafe_kb_is_flagged(nosafe):
    assert not is_nominal_safe_kb(nosafe)


def test_assertions_are_safe():
    kb = KnowledgeBase.of([StrictGci(Nominal("a"), C), StrictGci(Nominal("a"), Exists("r", Nominal("b")))])
    assert is_nominal_safe_kb(kb)


def test_empty_kb_is_safe():
    assert is_nominal_safe_kb(KnowledgeBase())


def _naive_safe(c, top_level_lhs):
    """Independent recursive reading of the safeness definition."""
    def walk(x, under_exists):
        if isinstance(x, Nominal):
            return under_exists
        if isinstance(x, Conj):
            return all(walk(o, False) for o in x.operands)
        if isinstance(x, Exists):
            return walk(x.filler, True)
        return True

    if top_level_lhs and isinstance(c, Nominal):
        return True
    return walk(c, False)


def _random_nominal_concept(rng):
    inds = ["a", "b"]
    roll = rng.random()
    if roll < 0.25:
        return Nominal(rng.choice(inds))
    if roll < 0.5:
        return Atom(rng.choice("AB"))
    if roll < 0.75:
        return Exists("r", _random_nominal_concept(rng))
    return Conj((_random_nominal_concept(rng), _random_nominal_concept(rng)))


@given(seeds)
def test_safe_kb_matches_naive_reading(seed):
    rng = random.Random(seed)
    axioms = [StrictGci(_random_nominal_concept(rng), _random_nominal_concept(rng)) for _ in range(3)]
    kb = KnowledgeBase.of(axioms)
    naive = all(_naive_safe(ax.lhs, True) and _naive_safe(ax.rhs, False) for ax in kb.tbox)
    assert is_nominal_safe_kb(kb) == naive


@given(seeds)
def test_safe_implies_nsafe(seed):
    c = _random_nominal_concept(random.Random(seed))
    if is_safe_concept(c):
        assert is_nsafe_concept(c)


@given(seeds)
def test_generated_nominal_kbs_are_safe(seed):
    assert is_nominal_safe_kb(random_safe_nominal_kb(random.Random(seed), NOMINAL))


def test_safe_axiom_reads_defeasible_nominals_classically():
    assert is_safe_axiom(StrictGci(DefNominal("a"), Exists("r", DefNominal("b"))))
    assert not is_safe_axiom(StrictGci(A, DefNominal("a")))


def test_signature():
    sig = signature(KnowledgeBase.of([StrictGci(A, B)]))
    assert (sig.atoms, sig.roles, sig.individuals) == ({"A", "B"}, frozenset(), frozenset())
    sig = signature(KnowledgeBase.of([StrictGci(A, Exists("r", Nominal("a")))]))
    assert (sig.atoms, sig.roles, sig.individuals) == ({"A"}, {"r"}, {"a"})
    sig = signature(KnowledgeBase())
    assert not (sig.atoms or sig.roles or sig.individuals)


def test_fresh_names():
    assert FreshNameSource("delta").fresh() == "__rc.delta.0"
    src = FreshNameSource("defn")
    assert src.fresh() != src.fresh()
    assert FreshNameSource("nom").for_individual("a") == "__rc.nom.a"


def test_fresh_names_skip_avoided():
    src = FreshNameSource("delta", avoid=frozenset({"__rc.delta.0"}))
    assert src.fresh() == "__rc.delta.1"


def test_unknown_namespace():
    with pytest.raises(ValueError):
        FreshNameSource("other")


def test_kb_of_canonicalizes():
    kb = KnowledgeBase.of([StrictGci(Conj((B, A)), BOT), StrictGci(Conj((A, B)), BOT)])
    assert len(kb.tbox) == 1
