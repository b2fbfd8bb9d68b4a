"""Concept and axiom syntax for EL-bottom with (defeasible) nominals.

Concepts are immutable, hashable values.  Conjunctions are n-ary; call
:func:`canonicalize` (or build knowledge bases through
:meth:`KnowledgeBase.of`) to get a flattened, sorted, duplicate-free form
so that structural equality is order independent.
"""

from __future__ import annotations

import functools
import itertools
import threading
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

RESERVED_PREFIX = "__rc."


class Concept:
    """Base class of all concept terms."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)

    def __lt__(self, other: Concept) -> bool:
        return render(self) < render(other)


@dataclass(frozen=True, slots=True)
class TopConcept(Concept):
    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True, slots=True)
class BotConcept(Concept):
    def __str__(self) -> str:
        return "bot"


TOP = TopConcept()
BOT = BotConcept()


@dataclass(frozen=True, slots=True)
class Atom(Concept):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Conj(Concept):
    operands: tuple[Concept, ...]
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.operands) < 2:
            raise ValueError("a conjunction needs at least two operands")
        object.__setattr__(self, "_hash", hash((Conj, self.operands)))

    def __hash__(self) -> int:  # compound terms are hashed constantly; keep it O(1)
        return self._hash

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Exists(Concept):
    role: str
    filler: Concept
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((Exists, self.role, self.filler)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Nominal(Concept):
    individual: str

    def __str__(self) -> str:
        return "{" + self.individual + "}"


@dataclass(frozen=True, slots=True)
class DefNominal(Concept):
    individual: str

    def __str__(self) -> str:
        return "<" + self.individual + ">"


@functools.lru_cache(maxsize=1 << 16)
def render(c: Concept) -> str:
    """Serialize a concept in the text syntax understood by :mod:`elrc.parse`."""
    if isinstance(c, Conj):
        return " & ".join(render(o) for o in c.operands)
    if isinstance(c, Exists):
        inner = render(c.filler)
        if isinstance(c.filler, Conj):
            inner = f"({inner})"
        return f"some {c.role}. {inner}"
    return str(c)


def conj(*operands: Concept) -> Concept:
    """Canonical conjunction of the given operands (a single operand is returned as is)."""
    if len(operands) == 1:
        return canonicalize(operands[0])
    return canonicalize(Conj(tuple(operands)))


@functools.lru_cache(maxsize=1 << 16)
def canonicalize(c: Concept) -> Concept:
    if isinstance(c, Conj):
        flat: set[Concept] = set()
        for op in c.operands:
            op = canonicalize(op)
            if isinstance(op, Conj):
                flat.update(op.operands)
            else:
                flat.add(op)
        ops = sorted(flat, key=render)
        if len(ops) == 1:
            return ops[0]
        return Conj(tuple(ops))
    if isinstance(c, Exists):
        return Exists(c.role, canonicalize(c.filler))
    return c


def subconcepts(c: Concept) -> Iterator[Concept]:
    """All subterms of ``c`` (including ``c``), pre-order."""
    yield c
    if isinstance(c, Conj):
        for op in c.operands:
            yield from subconcepts(op)
    elif isinstance(c, Exists):
        yield from subconcepts(c.filler)


def map_concept(c: Concept, fn) -> Concept:
    """Rebuild ``c`` bottom-up, replacing every leaf ``x`` by ``fn(x)``."""
    if isinstance(c, Conj):
        return canonicalize(Conj(tuple(map_concept(o, fn) for o in c.operands)))
    if isinstance(c, Exists):
        return Exists(c.role, map_concept(c.filler, fn))
    return fn(c)


@dataclass(frozen=True, slots=True)
class StrictGci:
    lhs: Concept
    rhs: Concept
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((StrictGci, self.lhs, self.rhs)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return f"{render(self.lhs)} <= {render(self.rhs)}"

    def __lt__(self, other: Axiom) -> bool:
        return axiom_key(self) < axiom_key(other)


@dataclass(frozen=True, slots=True)
class DefeasibleGci:
    lhs: Concept
    rhs: Concept
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((DefeasibleGci, self.lhs, self.rhs)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return f"{render(self.lhs)} <~ {render(self.rhs)}"

    def __lt__(self, other: Axiom) -> bool:
        return axiom_key(self) < axiom_key(other)


Axiom = Union[StrictGci, DefeasibleGci]


def axiom_key(ax: Axiom) -> str:
    return str(ax)


def canonical_axiom(ax: Axiom) -> Axiom:
    return type(ax)(canonicalize(ax.lhs), canonicalize(ax.rhs))


def map_axiom(ax: Axiom, fn) -> Axiom:
    return type(ax)(map_concept(ax.lhs, fn), map_concept(ax.rhs, fn))


@dataclass(frozen=True)
class KnowledgeBase:
    tbox: frozenset[StrictGci] = frozenset()
    dbox: frozenset[DefeasibleGci] = frozenset()

    @classmethod
    def of(
        cls,
        tbox: Iterable[StrictGci] = (),
        dbox: Iterable[DefeasibleGci] = (),
    ) -> KnowledgeBase:
        """Build a KB with every axiom canonicalized (and therefore deduplicated)."""
        return cls(
            frozenset(canonical_axiom(a) for a in tbox),
            frozenset(canonical_axiom(a) for a in dbox),
        )

    def sorted_tbox(self) -> list[StrictGci]:
        return sorted(self.tbox, key=axiom_key)

    def sorted_dbox(self) -> list[DefeasibleGci]:
        return sorted(self.dbox, key=axiom_key)

    def axioms(self) -> Iterator[Axiom]:
        yield from self.sorted_tbox()
        yield from self.sorted_dbox()

    def map(self, fn) -> KnowledgeBase:
        """Apply a leaf substitution to every axiom."""
        return KnowledgeBase.of(
            (map_axiom(a, fn) for a in self.tbox),
            (map_axiom(a, fn) for a in self.dbox),
        )

    def __len__(self) -> int:
        return len(self.tbox) + len(self.dbox)


@dataclass(frozen=True)
class Signature:
    atoms: frozenset[str] = frozenset()
    roles: frozenset[str] = frozenset()
    individuals: frozenset[str] = frozenset()


def concept_signature(concepts: Iterable[Concept]) -> Signature:
    atoms: set[str] = set()
    roles: set[str] = set()
    individuals: set[str] = set()
    for c in concepts:
        for s in subconcepts(c):
            if isinstance(s, Atom):
                atoms.add(s.name)
            elif isinstance(s, Exists):
                roles.add(s.role)
            elif isinstance(s, (Nominal, DefNominal)):
                individuals.add(s.individual)
    return Signature(frozenset(atoms), frozenset(roles), frozenset(individuals))


def axioms_signature(axioms: Iterable[Axiom]) -> Signature:
    return concept_signature(itertools.chain.from_iterable((a.lhs, a.rhs) for a in axioms))


def signature(kb: KnowledgeBase) -> Signature:
    return axioms_signature(kb.axioms())


def has_nominals(c: Concept) -> bool:
    return any(isinstance(s, Nominal) for s in subconcepts(c))


def has_def_nominals(c: Concept) -> bool:
    return any(isinstance(s, DefNominal) for s in subconcepts(c))


def axiom_has_any_nominal(ax: Axiom) -> bool:
    return any(
        isinstance(s, (Nominal, DefNominal))
        for side in (ax.lhs, ax.rhs)
        for s in subconcepts(side)
    )


# -- safeness ---------------------------------------------------------------


class DefeasibleNominalError(ValueError):
    pass


def _check_no_def_nominal(c: Concept) -> None:
    if has_def_nominals(c):
        raise DefeasibleNominalError(
            f"{render(c)}: map defeasible nominals to their {{}}-image before a safeness check"
        )


def is_safe_concept(c: Concept) -> bool:
    """True iff every nominal in ``c`` occurs only as the direct filler of an existential."""
    _check_no_def_nominal(c)

    def safe(x: Concept) -> bool:
        if isinstance(x, Nominal):
            return False
        if isinstance(x, Conj):
            return all(safe(o) for o in x.operands)
        if isinstance(x, Exists):
            return isinstance(x.filler, Nominal) or safe(x.filler)
        return True

    return safe(c)


def is_nsafe_concept(c: Concept) -> bool:
    return isinstance(c, Nominal) or is_safe_concept(c)


def classical_image(c: Concept) -> Concept:
    return map_concept(c, lambda x: Nominal(x.individual) if isinstance(x, DefNominal) else x)


def is_safe_axiom(ax: Axiom) -> bool:
    """Both strict and defeasible axioms: n-safe left side, safe right side."""
    return is_nsafe_concept(classical_image(ax.lhs)) and is_safe_concept(classical_image(ax.rhs))


def unsafe_axioms(kb: KnowledgeBase) -> list[Axiom]:
    return [ax for ax in kb.axioms() if not is_safe_axiom(ax)]


def is_nominal_safe_kb(kb: KnowledgeBase) -> bool:
    return not unsafe_axioms(kb)


# -- fresh names ------------------------------------------------------------

NAMESPACES = ("delta", "defn", "nom", "dnom", "core")


@dataclass
class FreshNameSource:
    """Generator of reserved-prefix atom names.

    ``avoid`` lists names already present in the input (for instance fresh
    atoms from an earlier normalization pass) that must not be re-emitted.
    """

    namespace: str
    counter: int = 0
    avoid: frozenset[str] = frozenset()
    _emitted: set[str] = field(default_factory=set, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.namespace not in NAMESPACES:
            raise ValueError(f"unknown namespace {self.namespace!r}")

    def fresh(self) -> str:
        with self._lock:
            while True:
                name = f"{RESERVED_PREFIX}{self.namespace}.{self.counter}"
                self.counter += 1
                if name not in self.avoid and name not in self._emitted:
                    self._emitted.add(name)
                    return name

    def for_individual(self, individual: str) -> str:
        """Deterministic image name for an individual (``nom``/``dnom`` namespaces)."""
        return f"{RESERVED_PREFIX}{self.namespace}.{individual}"


def fresh_atom(src: FreshNameSource) -> str:
    return src.fresh()


def is_reserved(name: str) -> bool:
    return name.startswith(RESERVED_PREFIX)
