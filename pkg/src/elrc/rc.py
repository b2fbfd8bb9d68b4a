"""Rational Closure for EL-bottom via delta-atom encodings.

Exceptionality of a set of defeasible axioms ``E`` is decided classically:
add a fresh atom ``delta`` and the axioms ``lhs & delta <= rhs`` for every
``lhs <~ rhs`` in ``E``; then ``C`` is exceptional iff
``C & delta <= bot`` follows.  The ranking and the closure itself are
sequences of such tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .elcore import Engine, default_engine
from .model import (
    BOT,
    TOP,
    Atom,
    Concept,
    DefeasibleGci,
    FreshNameSource,
    KnowledgeBase,
    StrictGci,
    axioms_signature,
    conj,
)

Rank = Union[int, float]
INFINITE: Rank = math.inf


def format_rank(r: Rank) -> str:
    return "inf" if r == INFINITE else str(int(r))


@dataclass(frozen=True)
class TDeltaEncoding:
    delta_atom: str
    tbox: frozenset[StrictGci]

    @property
    def delta(self) -> Atom:
        return Atom(self.delta_atom)


@dataclass(frozen=True)
class Ranking:
    tstar: frozenset[StrictGci]
    dstar: frozenset[DefeasibleGci]
    cells: tuple[frozenset[DefeasibleGci], ...]
    infinite: frozenset[DefeasibleGci]
    rounds: int = 1
    absorbing_rounds: int = 0
    tbox: frozenset[StrictGci] = field(default=frozenset(), repr=False)

    def rank_of_axiom(self, ax: DefeasibleGci) -> Rank:
        for i, cell in enumerate(self.cells):
            if ax in cell:
                return i
        if ax in self.infinite:
            return INFINITE
        raise KeyError(str(ax))

    def cells_from(self, i: int) -> frozenset[DefeasibleGci]:
        return frozenset().union(*self.cells[i:])

    @property
    def absorbed(self) -> list[StrictGci]:
        """The ``lhs <= bot`` axioms added for infinite-rank defeasible axioms."""
        return sorted(self.tstar - self.tbox, key=str)


def build_t_delta(
    t: Iterable[StrictGci],
    eset: Iterable[DefeasibleGci],
    fresh: FreshNameSource,
) -> TDeltaEncoding:
    t = frozenset(t)
    eset = sorted(eset, key=str)
    taken = axioms_signature(list(t) + eset).atoms
    name = fresh.fresh()
    while name in taken:
        name = fresh.fresh()
    d = Atom(name)
    added = {StrictGci(conj(ax.lhs, d), ax.rhs) for ax in eset}
    return TDeltaEncoding(name, t | added)


def _exceptional_in(enc: TDeltaEncoding, concepts: list[Concept], engine: Engine) -> list[bool]:
    qs = [StrictGci(conj(c, enc.delta), BOT) for c in concepts]
    return engine.entails_many(enc.tbox, qs)


def exceptional(
    t: Iterable[StrictGci],
    eset: Iterable[DefeasibleGci],
    engine: Engine | None = None,
) -> frozenset[DefeasibleGci]:
    """The axioms of ``eset`` whose left side is exceptional w.r.t. ``<t, eset>``."""
    engine = engine or default_engine()
    eset = sorted(eset, key=str)
    if not eset:
        return frozenset()
    enc = build_t_delta(t, eset, engine.delta_names)
    flags = _exceptional_in(enc, [ax.lhs for ax in eset], engine)
    return frozenset(ax for ax, f in zip(eset, flags) if f)


def _compute_ranking(kb: KnowledgeBase, engine: Engine) -> Ranking:
    tstar = set(kb.tbox)
    dstar = set(kb.dbox)
    infinite: set[DefeasibleGci] = set()
    rounds = absorbing = 0
    while True:
        rounds += 1
        chain = [frozenset(dstar)]
        chain.append(exceptional(tstar, chain[0], engine))
        while chain[-1] != chain[-2]:
            chain.append(exceptional(tstar, chain[-1], engine))
        d_inf = chain[-1]
        if not d_inf:
            break
        absorbing += 1
        infinite |= d_inf
        dstar -= d_inf
        tstar |= {StrictGci(ax.lhs, BOT) for ax in d_inf}
    cells = tuple(chain[j - 1] - chain[j] for j in range(1, len(chain) - 1))
    return Ranking(
        frozenset(tstar),
        frozenset(dstar),
        cells,
        frozenset(infinite),
        rounds,
        absorbing,
        kb.tbox,
    )


def compute_ranking(kb: KnowledgeBase, engine: Engine | None = None) -> Ranking:
    """Partition the DBox by rank; memoized per knowledge base on the engine."""
    engine = engine or default_engine()
    return engine.memo(("ranking", kb), lambda: _compute_ranking(kb, engine))


@dataclass(frozen=True)
class RcDecision:
    """Outcome of one closure query with the information behind it."""

    entailed: bool
    rank: Rank | None
    via: str  # "classical", "strict-knowledge", "rank", "infinite"

    def __bool__(self) -> bool:
        return self.entailed


def _rank_search(ranking: Ranking, c: Concept, engine: Engine) -> tuple[Rank, TDeltaEncoding | None, bool]:
    """Walk the cells upwards until ``c`` stops being exceptional.

    Returns the rank, the encoding at that rank, and whether the last test
    found ``c`` still exceptional (then the rank is infinite).
    """
    i = 0
    remaining = ranking.cells_from(0)
    while True:
        enc = build_t_delta(ranking.tstar, remaining, engine.delta_names)
        exc = _exceptional_in(enc, [c], engine)[0]
        if not exc:
            return i, enc, False
        if not remaining:
            return INFINITE, enc, True
        remaining = remaining - ranking.cells[i]
        i += 1


def rank_of_concept(r: Ranking, c: Concept, engine: Engine | None = None) -> Rank:
    """Smallest ``i`` such that ``c`` is not exceptional for cells ``i..n``; infinite if none.

    Fresh delta atoms come from the engine's name source.
    """
    rank, _, _ = _rank_search(r, c, engine or default_engine())
    return rank


def rational_closure_decide(
    kb: KnowledgeBase,
    q: DefeasibleGci | StrictGci,
    engine: Engine | None = None,
) -> RcDecision:
    return rational_closure_decide_many(kb, [q], engine)[0]


def rational_closure_decide_many(
    kb: KnowledgeBase,
    queries: Sequence[DefeasibleGci | StrictGci],
    engine: Engine | None = None,
) -> list[RcDecision]:
    """Decide a batch of queries against one KB.

    Every query goes through exactly the tests it would get on its own (and
    is counted that way); the batch only shares saturations, and one fresh
    delta encoding per rank level.
    """
    engine = engine or default_engine()
    out: list[RcDecision | None] = [None] * len(queries)
    strict = [i for i, q in enumerate(queries) if isinstance(q, StrictGci)]
    open_ = [i for i, q in enumerate(queries) if not isinstance(q, StrictGci)]
    if strict:
        tstar = compute_ranking(kb, engine).tstar
        for i, ok in zip(strict, engine.entails_many(tstar, [queries[i] for i in strict])):
            out[i] = RcDecision(ok, None, "strict-knowledge")
    if open_:
        flags = engine.entails_many(kb.tbox, [StrictGci(queries[i].lhs, queries[i].rhs) for i in open_])
        for i in [i for i, f in zip(open_, flags) if f]:
            out[i] = RcDecision(True, None, "classical")
        open_ = [i for i, f in zip(open_, flags) if not f]
    if open_:
        ranking = compute_ranking(kb, engine)
        flags = engine.entails_many(ranking.tstar, [StrictGci(queries[i].lhs, queries[i].rhs) for i in open_])
        for i in [i for i, f in zip(open_, flags) if f]:
            out[i] = RcDecision(True, None, "strict-knowledge")
        open_ = [i for i, f in zip(open_, flags) if not f]
        level = 0
        remaining = ranking.cells_from(0)
        while open_:
            enc = build_t_delta(ranking.tstar, remaining, engine.delta_names)
            exc = _exceptional_in(enc, [queries[i].lhs for i in open_], engine)
            settled = [i for i, e in zip(open_, exc) if not e]
            open_ = [i for i, e in zip(open_, exc) if e]
            tests = [StrictGci(conj(queries[i].lhs, enc.delta), queries[i].rhs) for i in settled]
            for i, ok in zip(settled, engine.entails_many(enc.tbox, tests)):
                out[i] = RcDecision(ok, level, "rank")
            if not remaining:
                for i in open_:
                    out[i] = RcDecision(False, INFINITE, "infinite")
                break
            remaining = remaining - ranking.cells[level]
            level += 1
    return out  # type: ignore[return-value]


def rational_closure_entails_many(
    kb: KnowledgeBase,
    queries: Sequence[DefeasibleGci | StrictGci],
    engine: Engine | None = None,
) -> list[bool]:
    return [d.entailed for d in rational_closure_decide_many(kb, queries, engine)]


def rational_closure_entails(
    kb: KnowledgeBase,
    q: DefeasibleGci | StrictGci,
    engine: Engine | None = None,
) -> bool:
    return rational_closure_decide(kb, q, engine).entailed


def is_rank_satisfiable(kb: KnowledgeBase, engine: Engine | None = None) -> bool:
    engine = engine or default_engine()
    ranking = compute_ranking(kb, engine)
    return not engine.entails(ranking.tstar, StrictGci(TOP, BOT))
