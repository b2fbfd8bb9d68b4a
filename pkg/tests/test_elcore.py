import random
import threading

import pytest
from hypothesis import given

from elrc.elcore import Engine, NominalInCoreError, TestCounter, entails, read_and_reset_counter, saturate
from elrc.model import BOT, TOP, Atom, Exists, Nominal, StrictGci, conj
from elrc.normalize import normalize_tbox
from elrc.oracle import entails_bounded
from elrc.parse import parse_axiom, parse_kb
from elrc.rc import build_t_delta, compute_ranking, rational_closure_entails

from generators import SMALL, TINY, mixed_kb_from_seed, random_concept, seeds

A, B, C = Atom("A"), Atom("B"), Atom("C")


def tb(*lines):
    return parse_kb("tbox:\n" + "\n".join(lines)).tbox


def test_transitivity():
    assert saturate(normalize_tbox(tb("A <= B", "B <= C"))[0]).subsumes("A", "C")


def test_existential_into_empty_filler():
    assert saturate(normalize_tbox(tb("A <= some r. B", "B <= bot"))[0]).subsumes("A", "bot")


def test_conjunction_rule():
    assert saturate(normalize_tbox(tb("A <= B", "A <= C", "B & C <= bot"))[0]).subsumes("A", "bot")


def test_top_trivially_entailed():
    assert Engine().entails(tb("A <= B"), StrictGci(TOP, TOP))


def test_delta_encoding_of_bloodcells(bloodcells):
    e = Engine()
    r = compute_ranking(bloodcells, e)
    enc = build_t_delta(r.tstar, r.dstar, e.delta_names)
    assert e.entails(enc.tbox, StrictGci(conj(Atom("MRBC"), enc.delta), BOT))
    assert not e.entails(enc.tbox, StrictGci(conj(Atom("VRBC"), enc.delta), BOT))


def test_counter_counts_and_resets():
    e = Engine()
    e.entails(tb("A <= B"), StrictGci(A, B))
    assert e.read_and_reset_counter() == 1
    assert e.read_and_reset_counter() == 0


def test_batch_counts_each_query():
    e = Engine()
    e.entails_many(tb("A <= B"), [StrictGci(A, B), StrictGci(B, A), StrictGci(A, C)])
    assert e.counter.value == 3


def test_bloodcells_rc_call_within_bound(bloodcells):
    e = Engine()
    rational_closure_entails(bloodcells, parse_axiom("BRBC <~ NotN"), e)
    d = len(bloodcells.dbox)
    assert e.read_and_reset_counter() <= d**3 + 2 * d + 4


def test_module_level_counter():
    read_and_reset_counter()
    entails(tb("A <= B"), StrictGci(A, B))
    assert read_and_reset_counter() == 1


def test_counter_is_thread_safe():
    c = TestCounter()

    def bump():
        for _ in range(1000):
            c.add()

    threads = [threading.Thread(target=bump) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert c.value == 8000


def test_nominals_rejected():
    with pytest.raises(NominalInCoreError):
        Engine().entails([StrictGci(A, Exists("r", Nominal("a")))], StrictGci(A, B))


def test_complex_query_sides():
    t = tb("A <= some r. B", "some r. B <= C")
    assert Engine().entails(t, StrictGci(A, conj(C, Exists("r", TOP))))
    assert not Engine().entails(t, StrictGci(C, A))


@given(seeds)
def test_reflexive(seed):
    rng = random.Random(seed)
    kb = mixed_kb_from_seed(seed, SMALL)
    c = random_concept(rng, SMALL)
    assert Engine().entails(kb.tbox, StrictGci(c, c))


@given(seeds)
def test_monotone(seed):
    rng = random.Random(seed)
    kb = mixed_kb_from_seed(seed, SMALL)
    bigger = kb.tbox | mixed_kb_from_seed(seed + 1, SMALL).tbox
    q = StrictGci(random_concept(rng, SMALL), random_concept(rng, SMALL))
    if Engine().entails(kb.tbox, q):
        assert Engine().entails(bigger, q)


@given(seeds)
def test_transitive_through_atoms(seed):
    rng = random.Random(seed)
    t = mixed_kb_from_seed(seed, SMALL).tbox
    a, b, c = (Atom(rng.choice(SMALL.atom_names())) for _ in range(3))
    e = Engine()
    if e.entails(t, StrictGci(a, b)) and e.entails(t, StrictGci(b, c)):
        assert e.entails(t, StrictGci(a, c))


@given(seeds)
def test_fifo_lifo_agree(seed):
    t = mixed_kb_from_seed(seed, SMALL).tbox
    normal, _ = normalize_tbox(t)
    assert saturate(normal, "fifo").subs == saturate(normal, "lifo").subs
    rng = random.Random(seed)
    qs = [StrictGci(random_concept(rng, SMALL), random_concept(rng, SMALL)) for _ in range(5)]
    assert Engine("fifo").entails_many(t, qs) == Engine("lifo").entails_many(t, qs)


@given(seeds)
def test_fixpoint_size_bound(seed):
    normal, _ = normalize_tbox(mixed_kb_from_seed(seed, SMALL).tbox)
    s = saturate(normal)
    n_atoms = len(s.subs) + 1  # plus bot
    n_roles = len(s.edges)
    facts = sum(len(v) for v in s.subs.values()) + sum(len(v) for v in s.edges.values())
    assert facts <= n_atoms**2 + n_roles * n_atoms**2


@given(seeds)
def test_agrees_with_bounded_models(seed):
    rng = random.Random(seed)
    t = mixed_kb_from_seed(seed, TINY).tbox
    q = StrictGci(random_concept(rng, TINY), random_concept(rng, TINY))
    assert Engine().entails(t, q) == entails_bounded(t, q)
