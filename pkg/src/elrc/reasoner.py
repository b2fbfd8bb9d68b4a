"""One-call query answering over any supported knowledge base.

Picks the right pipeline for the input: plain EL-bottom goes straight to
the closure procedures, anything with nominals goes through the
nominal-safe encodings first.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .elcore import Engine
from .inet import prepare_inheritance
from .model import (
    Axiom,
    KnowledgeBase,
    StrictGci,
    axiom_has_any_nominal,
)
from .nominals import (
    NominalImageMap,
    classicalize,
    defeasibilize,
    encode_def_nominals,
    encode_defeasible,
    n_translate,
    strict_entails_nominal_safe,
    check_nominal_safe,
    unsatisfiable_individuals,
)
from .rc import (
    INFINITE,
    Rank,
    Ranking,
    compute_ranking,
    format_rank,
    is_rank_satisfiable,
    rank_of_concept,
    rational_closure_decide,
)

CLOSURES = ("rc", "inherit")


@dataclass(frozen=True)
class QueryVerdict:
    entailed: bool
    closure: str  # "rc", "inherit" or "classical"
    rank_of_lhs: Rank | None
    subsumption_tests: int
    elapsed: float  # seconds
    explanation: tuple[str, ...] = field(default=(), compare=False)

    def record(self) -> dict:
        """Stable field set for machine-readable output."""
        rank = None if self.rank_of_lhs is None else (
            "inf" if self.rank_of_lhs == INFINITE else int(self.rank_of_lhs)
        )
        return {
            "entailed": self.entailed,
            "closure": self.closure,
            "rank": rank,
            "tests": self.subsumption_tests,
            "ms": round(self.elapsed * 1000, 3),
        }


def _has_nominals(kb: KnowledgeBase, *axioms: Axiom) -> bool:
    return any(axiom_has_any_nominal(ax) for ax in list(kb.axioms()) + list(axioms))


def _explain_decision(via: str, rank: Rank | None, ranking: Ranking | None) -> list[str]:
    if via == "classical":
        return ["holds classically in the TBox"]
    if via == "strict-knowledge":
        return ["holds classically once infinite-rank axioms are made strict"]
    if via == "infinite":
        return ["left-hand side has infinite rank; only the classical answer applies"]
    n = len(ranking.cells) if ranking is not None else 0
    if rank is not None and rank < n:
        span = f"D{int(rank)}" if rank == n - 1 else f"D{int(rank)}..D{n - 1}"
        return [f"decided with the defeasible axioms in {span}"]
    return ["decided with no defeasible axioms (left-hand side above every rank)"]


def answer(
    kb: KnowledgeBase,
    q: Axiom,
    closure: str = "rc",
    engine: Engine | None = None,
) -> QueryVerdict:
    if closure not in CLOSURES:
        raise ValueError(f"unknown closure {closure!r}; use one of {', '.join(CLOSURES)}")
    engine = engine or Engine()
    before = engine.counter.value
    start = time.perf_counter()
    explanation: list[str] = []
    if isinstance(q, StrictGci):
        if _has_nominals(kb, q):
            ok = strict_entails_nominal_safe(kb, q, engine)
        else:
            ok = rational_closure_decide(kb, q, engine).entailed
        used, rank = "classical", None
        explanation.append("strict query: decided against the TBox plus infinite-rank axioms")
    else:
        enc = encode_defeasible(kb, q)
        used = closure
        if closure == "rc":
            target_kb, target_q = enc.kb, enc.query
        else:
            prep = prepare_inheritance(enc.kb, enc.query, engine)
            if prep is None:
                target_kb = None
            else:
                target_kb, target_q = prep.closure_kb, prep.query
                explanation.append(
                    f"extended DBox has {len(prep.d_in)} axioms ({len(prep.kb.dbox)} original)"
                )
        if target_kb is None:
            ok, rank = True, None
            explanation.append("knowledge base has no ranked model; every query holds")
        else:
            decision = rational_closure_decide(target_kb, target_q, engine)
            ranking = compute_ranking(target_kb, engine)
            rank = decision.rank
            if rank is None:
                rank = rank_of_concept(ranking, target_q.lhs, engine)
            ok = decision.entailed
            explanation += _explain_decision(decision.via, decision.rank, ranking)
    elapsed = time.perf_counter() - start
    return QueryVerdict(
        ok, used, rank, engine.counter.value - before, elapsed, tuple(explanation)
    )


@dataclass(frozen=True)
class RankingReport:
    ranking: Ranking
    images: NominalImageMap

    def decode(self, ax):
        return type(ax)(self.images.decode(ax.lhs), self.images.decode(ax.rhs))


def rank_kb(kb: KnowledgeBase, engine: Engine | None = None) -> RankingReport:
    """Ranking of ``kb`` with nominals read as defeasible nominals."""
    engine = engine or Engine()
    if _has_nominals(kb):
        check_nominal_safe(kb)
    m = NominalImageMap()
    ekb = encode_def_nominals(defeasibilize(kb), m)
    return RankingReport(compute_ranking(ekb, engine), m)


@dataclass(frozen=True)
class CheckReport:
    rank_satisfiable: bool
    unsatisfiable_individuals: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.rank_satisfiable and not self.unsatisfiable_individuals


def check_kb(kb: KnowledgeBase, engine: Engine | None = None) -> CheckReport:
    engine = engine or Engine()
    if _has_nominals(kb):
        check_nominal_safe(kb)
    nkb = n_translate(classicalize(kb), NominalImageMap())
    return CheckReport(is_rank_satisfiable(nkb, engine), tuple(unsatisfiable_individuals(kb, engine)))


def rank_text(r: Rank | None) -> str:
    return "-" if r is None else format_rank(r)


def encoded_for_structure(kb: KnowledgeBase) -> tuple[KnowledgeBase, NominalImageMap]:
    """Nominal-free view of ``kb`` for normalization and net building."""
    if _has_nominals(kb):
        check_nominal_safe(kb)
    m = NominalImageMap()
    return encode_def_nominals(defeasibilize(kb), m), m


__all__ = [
    "CLOSURES",
    "CheckReport",
    "QueryVerdict",
    "RankingReport",
    "answer",
    "check_kb",
    "encoded_for_structure",
    "rank_kb",
    "rank_text",
]
