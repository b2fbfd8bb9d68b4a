"""Defeasible reasoning for EL-bottom: rational closure, inheritance-based closure, nominals."""

from .elcore import Engine, entails
from .inet import build_net, inheritance_closure_entails
from .model import (
    BOT,
    TOP,
    Atom,
    Conj,
    DefeasibleGci,
    DefNominal,
    Exists,
    KnowledgeBase,
    Nominal,
    StrictGci,
)
from .nominals import (
    NotNominalSafe,
    defeasible_entails_nominal_safe,
    strict_entails_nominal_safe,
)
from .normalize import normalize_kb
from .parse import ParseError, load_kb, parse_axiom, parse_concept, parse_kb, serialize_kb
from .rc import INFINITE, compute_ranking, rank_of_concept, rational_closure_entails, rational_closure_entails_many
from .reasoner import answer

__all__ = [
    "BOT", "TOP", "Atom", "Conj", "DefeasibleGci", "DefNominal", "Engine", "Exists",
    "INFINITE", "KnowledgeBase", "Nominal", "NotNominalSafe", "ParseError", "StrictGci",
    "answer", "build_net", "compute_ranking", "defeasible_entails_nominal_safe", "entails",
    "inheritance_closure_entails", "load_kb", "normalize_kb", "parse_axiom", "parse_concept",
    "parse_kb", "rank_of_concept", "rational_closure_entails", "rational_closure_entails_many", "serialize_kb",
    "strict_entails_nominal_safe",
]
