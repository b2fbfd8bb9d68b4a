"""Nominal-safe ELO-bottom and defeasible nominals.

Classical nominals ``{a}`` are eliminated by replacing each with a fresh
atom ``N_a``; this is sound and complete only for nominal-safe input, so
the public entry points refuse anything else.  Defeasible nominals ``<a>``
are plain fresh atoms ``D_a`` as far as the closure procedures care.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TypeVar, Union

from .elcore import Engine, default_engine
from .inet import inheritance_closure_entails
from .model import (
    BOT,
    Atom,
    Axiom,
    Concept,
    DefeasibleGci,
    DefNominal,
    FreshNameSource,
    KnowledgeBase,
    Nominal,
    StrictGci,
    has_nominals,
    is_safe_axiom,
    map_axiom,
    map_concept,
    signature,
)
from .rc import Rank, compute_ranking, rank_of_concept, rational_closure_entails

X = TypeVar("X", Concept, StrictGci, DefeasibleGci, KnowledgeBase)
Translatable = Union[Concept, StrictGci, DefeasibleGci, KnowledgeBase]


class NotNominalSafe(ValueError):
    def __init__(self, axiom: Axiom, message: str | None = None):
        self.axiom = axiom
        super().__init__(message or f"not nominal-safe: {axiom}")


@dataclass
class NominalImageMap:
    """Individual -> fresh atom, separately for ``{a}`` and ``<a>``."""

    classical: dict[str, str] = field(default_factory=dict)
    defeasible: dict[str, str] = field(default_factory=dict)
    _nom: FreshNameSource = field(default_factory=lambda: FreshNameSource("nom"), repr=False)
    _dnom: FreshNameSource = field(default_factory=lambda: FreshNameSource("dnom"), repr=False)

    def n_atom(self, individual: str) -> Atom:
        name = self.classical.setdefault(individual, self._nom.for_individual(individual))
        return Atom(name)

    def d_atom(self, individual: str) -> Atom:
        name = self.defeasible.setdefault(individual, self._dnom.for_individual(individual))
        return Atom(name)

    def decode(self, c: Concept) -> Concept:
        """Map fresh nominal atoms back to ``{a}`` / ``<a>``."""
        inv_n = {v: k for k, v in self.classical.items()}
        inv_d = {v: k for k, v in self.defeasible.items()}

        def leaf(x: Concept) -> Concept:
            if isinstance(x, Atom):
                if x.name in inv_n:
                    return Nominal(inv_n[x.name])
                if x.name in inv_d:
                    return DefNominal(inv_d[x.name])
            return x

        return map_concept(c, leaf)


def _apply(x: X, fn) -> X:
    if isinstance(x, KnowledgeBase):
        return x.map(fn)
    if isinstance(x, (StrictGci, DefeasibleGci)):
        return map_axiom(x, fn)
    return map_concept(x, fn)


def n_translate(x: X, m: NominalImageMap) -> X:
    """Replace every ``{a}`` by its atom ``N_a``."""
    return _apply(x, lambda c: m.n_atom(c.individual) if isinstance(c, Nominal) else c)


def defeasibilize(x: X) -> X:
    return _apply(x, lambda c: DefNominal(c.individual) if isinstance(c, Nominal) else c)


def classicalize(x: X) -> X:
    return _apply(x, lambda c: Nominal(c.individual) if isinstance(c, DefNominal) else c)


def encode_def_nominals(kb: X, m: NominalImageMap) -> X:
    """Replace every ``<a>`` by its atom ``D_a``; classical nominals must already be gone."""
    def leaf(c: Concept) -> Concept:
        if isinstance(c, Nominal):
            raise ValueError(f"classical nominal {c} left in input; defeasibilize first")
        return m.d_atom(c.individual) if isinstance(c, DefNominal) else c

    return _apply(kb, leaf)


def check_nominal_safe(kb: KnowledgeBase, *queries: Axiom) -> None:
    for ax in list(kb.axioms()) + list(queries):
        if not is_safe_axiom(ax):
            raise NotNominalSafe(ax)


def strict_entails_unchecked(
    kb: KnowledgeBase,
    q: StrictGci,
    m: NominalImageMap | None = None,
    engine: Engine | None = None,
) -> bool:
    """The N_a reduction without the safeness gate.

    Only meaningful for nominal-safe input; it exists so the failure on
    unsafe input can be demonstrated.
    """
    engine = engine or default_engine()
    m = m or NominalImageMap()
    nkb = n_translate(classicalize(kb), m)
    ranking = compute_ranking(nkb, engine)
    return engine.entails(ranking.tstar, n_translate(classicalize(q), m))


def strict_entails_nominal_safe(
    kb: KnowledgeBase,
    q: StrictGci,
    engine: Engine | None = None,
) -> bool:
    check_nominal_safe(kb, q)
    return strict_entails_unchecked(kb, q, engine=engine)


@dataclass(frozen=True)
class EncodedQuery:
    kb: KnowledgeBase
    query: DefeasibleGci
    images: NominalImageMap


def encode_defeasible(kb: KnowledgeBase, q: DefeasibleGci) -> EncodedQuery:
    if has_nominals(q.lhs) or has_nominals(q.rhs):
        raise NotNominalSafe(q, f"{q}: write <a> instead of {{a}} in a defeasible query")
    check_nominal_safe(kb, q)
    m = NominalImageMap()
    return EncodedQuery(encode_def_nominals(defeasibilize(kb), m), encode_def_nominals(q, m), m)


def defeasible_entails_nominal_safe(
    kb: KnowledgeBase,
    q: DefeasibleGci,
    closure: str = "rc",
    engine: Engine | None = None,
) -> bool:
    enc = encode_defeasible(kb, q)
    if closure == "rc":
        return rational_closure_entails(enc.kb, enc.query, engine)
    if closure in ("inherit", "inheritance"):
        return inheritance_closure_entails(enc.kb, enc.query, engine)
    raise ValueError(f"unknown closure {closure!r}")


def rank_via_defeasible_atoms(kb: KnowledgeBase, c: Concept, engine: Engine | None = None) -> Rank:
    """Rank of ``c`` with every nominal read as ``<a>`` and encoded as ``D_a``."""
    m = NominalImageMap()
    ekb = encode_def_nominals(defeasibilize(kb), m)
    ec = encode_def_nominals(defeasibilize(c), m)
    return rank_of_concept(compute_ranking(ekb, engine), ec, engine)


def rank_via_classical_atoms(kb: KnowledgeBase, c: Concept, engine: Engine | None = None) -> Rank:
    """Rank of ``c`` with every nominal read as ``{a}`` and translated to ``N_a``."""
    m = NominalImageMap()
    nkb = n_translate(classicalize(kb), m)
    nc = n_translate(classicalize(c), m)
    return rank_of_concept(compute_ranking(nkb, engine), nc, engine)


def unsatisfiable_individuals(kb: KnowledgeBase, engine: Engine | None = None) -> list[str]:
    """Individuals ``a`` with ``N(T) |= N_a <= bot`` (the KB then has no model at all)."""
    engine = engine or default_engine()
    inds = sorted(signature(kb).individuals)
    if not inds:
        return []
    m = NominalImageMap()
    tbox = n_translate(classicalize(kb), m).tbox
    flags = engine.entails_many(tbox, [StrictGci(m.n_atom(a), BOT) for a in inds])
    return [a for a, f in zip(inds, flags) if f]
