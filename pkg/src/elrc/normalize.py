"""Normal form for EL-bottom TBoxes and knowledge bases.

A strict axiom is in normal form when it has one of the shapes

    A <= B        A & A2 <= B        some r. A <= B        A <= some r. A2

with ``A, A2`` atoms or ``top`` and ``B`` an atom, ``top`` or ``bot``.
Complex subterms are replaced by fresh atoms.  A fresh atom always names
one canonical concept and is shared by every rewrite that needs it, so the
result is a conservative extension of the input.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .model import (
    BOT,
    TOP,
    Atom,
    BotConcept,
    Concept,
    Conj,
    DefeasibleGci,
    Exists,
    FreshNameSource,
    KnowledgeBase,
    StrictGci,
    TopConcept,
    axioms_signature,
    canonicalize,
    conj,
    is_reserved,
    map_concept,
    render,
)


@dataclass
class NameMap:
    """Fresh atom name -> the concept it stands for."""

    definitions: dict[str, Concept] = field(default_factory=dict)

    def concept_of(self, name: str) -> Concept | None:
        return self.definitions.get(name)

    def expand(self, c: Concept) -> Concept:
        """Replace fresh atoms by their definitions, recursively."""

        def leaf(x: Concept) -> Concept:
            if isinstance(x, Atom) and x.name in self.definitions:
                return self.expand(self.definitions[x.name])
            return x

        return map_concept(c, leaf)

    def __len__(self) -> int:
        return len(self.definitions)


@dataclass(frozen=True)
class NormalTBox:
    axioms: frozenset[StrictGci]

    def __post_init__(self) -> None:
        for ax in self.axioms:
            if not is_normal(ax):
                raise ValueError(f"not in normal form: {ax}")

    def __iter__(self):
        return iter(sorted(self.axioms, key=str))

    def __len__(self) -> int:
        return len(self.axioms)


def is_basic(c: Concept) -> bool:
    return isinstance(c, (Atom, TopConcept))


def _basic_or_bot(c: Concept) -> bool:
    return is_basic(c) or isinstance(c, BotConcept)


def _normal_lhs(c: Concept) -> bool:
    if isinstance(c, Conj):
        return len(c.operands) == 2 and all(is_basic(o) for o in c.operands)
    if isinstance(c, Exists):
        return is_basic(c.filler)
    return is_basic(c)


def is_normal(ax: StrictGci) -> bool:
    if is_basic(ax.lhs):
        if isinstance(ax.rhs, Exists):
            return is_basic(ax.rhs.filler)
        return _basic_or_bot(ax.rhs)
    return _normal_lhs(ax.lhs) and _basic_or_bot(ax.rhs)


def simplify(c: Concept) -> Concept:
    """Drop ``top`` from conjunctions and collapse ``bot`` upwards through conjunctions and existentials."""
    if isinstance(c, Conj):
        ops = []
        for o in c.operands:
            o = simplify(o)
            if isinstance(o, BotConcept):
                return BOT
            if not isinstance(o, TopConcept):
                ops.append(o)
        if not ops:
            return TOP
        return conj(*ops)
    if isinstance(c, Exists):
        f = simplify(c.filler)
        return BOT if isinstance(f, BotConcept) else Exists(c.role, f)
    return c


class Normalizer:
    """Stateful rewriter; reuse one instance to share fresh names across calls."""

    def __init__(self, fresh: FreshNameSource | None = None, name_map: NameMap | None = None):
        self.fresh = fresh or FreshNameSource("defn")
        self.name_map = name_map or NameMap()
        self._names: dict[Concept, Atom] = {
            canonicalize(c): Atom(n) for n, c in self.name_map.definitions.items()
        }
        self._clean_cache: dict[Concept, Concept] = {}

    def _clean(self, c: Concept) -> Concept:
        out = self._clean_cache.get(c)
        if out is None:
            out = self._clean_cache[c] = simplify(canonicalize(c))
        return out

    def clean_axiom(self, ax: StrictGci) -> StrictGci:
        return StrictGci(self._clean(ax.lhs), self._clean(ax.rhs))

    def name(self, c: Concept) -> Atom:
        c = canonicalize(c)
        a = self._names.get(c)
        if a is None:
            a = Atom(self.fresh.fresh())
            self._names[c] = a
            self.name_map.definitions[a.name] = c
        return a

    def atomize(self, c: Concept) -> tuple[Concept, list[StrictGci]]:
        """Return a basic concept (atom, top or bot) equivalent to ``c`` plus the defining axioms it needs."""
        c = self._clean(c)
        if _basic_or_bot(c):
            return c, []
        a = self.name(c)
        return a, [StrictGci(a, c), StrictGci(c, a)]

    # rules that rewrite the left-hand side (applied first)
    def _lhs_step(self, ax: StrictGci) -> list[StrictGci] | None:
        lhs, rhs = ax.lhs, ax.rhs
        if isinstance(lhs, BotConcept):
            return []
        if isinstance(lhs, Conj):
            ops = list(lhs.operands)
            for i, o in enumerate(ops):
                if not is_basic(o):
                    a = self.name(o)
                    rest = ops[:i] + ops[i + 1:] + [a]
                    return [StrictGci(o, a), StrictGci(conj(*rest), rhs)]
            if len(ops) > 2:
                tail = conj(*ops[1:])
                a = self.name(tail)
                return [StrictGci(tail, a), StrictGci(conj(ops[0], a), rhs)]
            return None
        if isinstance(lhs, Exists) and not is_basic(lhs.filler):
            a = self.name(lhs.filler)
            return [StrictGci(lhs.filler, a), StrictGci(Exists(lhs.role, a), rhs)]
        return None

    # rules that rewrite the right-hand side
    def _rhs_step(self, ax: StrictGci) -> list[StrictGci] | None:
        lhs, rhs = ax.lhs, ax.rhs
        if not is_basic(lhs) and not _basic_or_bot(rhs):
            a = self.name(rhs)
            return [StrictGci(lhs, a), StrictGci(a, rhs)]
        if isinstance(rhs, Exists) and not is_basic(rhs.filler):
            a = self.name(rhs.filler)
            return [StrictGci(lhs, Exists(rhs.role, a)), StrictGci(a, rhs.filler)]
        if isinstance(rhs, Conj):
            return [StrictGci(lhs, o) for o in rhs.operands]
        return None

    def _any_step(self, ax: StrictGci) -> list[StrictGci] | None:
        out = self._lhs_step(ax)
        return out if out is not None else self._rhs_step(ax)

    def _exhaust(self, axioms: Iterable[StrictGci], step, order: str) -> list[StrictGci]:
        work = deque(axioms)
        seen: set[StrictGci] = set()
        done: list[StrictGci] = []
        pop = work.popleft if order == "fifo" else work.pop
        while work:
            ax = pop()
            ax = StrictGci(self._clean(ax.lhs), self._clean(ax.rhs))
            if ax in seen:
                continue
            seen.add(ax)
            out = step(ax)
            if out is None:
                done.append(ax)
            else:
                work.extend(out)
        return done

    def normalize(self, axioms: Iterable[StrictGci], order: str = "fifo") -> NormalTBox:
        if order not in ("fifo", "lifo"):
            raise ValueError(f"unknown order {order!r}")
        ordered = sorted(axioms, key=str)
        stage = self._exhaust(ordered, self._lhs_step, order)
        out = self._exhaust(stage, self._any_step, order)
        return NormalTBox(frozenset(out))


def _fresh_for(axioms) -> FreshNameSource:
    sig = axioms_signature(axioms)
    return FreshNameSource("defn", avoid=frozenset(a for a in sig.atoms if is_reserved(a)))


def normalize_tbox(t: Iterable[StrictGci], order: str = "fifo") -> tuple[NormalTBox, NameMap]:
    t = list(t)
    n = Normalizer(_fresh_for(t))
    return n.normalize(t, order), n.name_map


@dataclass(frozen=True)
class NormalizedKb:
    kb: KnowledgeBase
    names: NameMap
    queries: tuple[DefeasibleGci | StrictGci, ...] = ()


def normalize_kb_with_queries(
    kb: KnowledgeBase,
    queries: Iterable[DefeasibleGci | StrictGci] = (),
    order: str = "fifo",
) -> NormalizedKb:
    """Normalize ``kb`` and rewrite ``queries`` over the same fresh names.

    Every defeasible axiom (and query) becomes ``X <~ Y`` with ``X, Y``
    atoms, ``top`` or ``bot``; definitions ``A = C`` for the named sides go
    into the TBox before it is normalized.
    """
    queries = list(queries)
    n = Normalizer(_fresh_for(list(kb.axioms()) + queries))
    tbox = kb.sorted_tbox()
    # name the TBox's own complex subterms first so numbering follows the TBox
    stage = n._exhaust(tbox, n._lhs_step, order)
    extra: list[StrictGci] = []
    dbox: list[DefeasibleGci] = []
    for ax in kb.sorted_dbox():
        lhs, d1 = n.atomize(ax.lhs)
        rhs, d2 = n.atomize(ax.rhs)
        extra += d1 + d2
        dbox.append(DefeasibleGci(lhs, rhs))
    new_queries = []
    for q in queries:
        lhs, d1 = n.atomize(q.lhs)
        rhs, d2 = n.atomize(q.rhs)
        extra += d1 + d2
        new_queries.append(type(q)(lhs, rhs))
    normal = n.normalize(stage + extra, order)
    return NormalizedKb(KnowledgeBase.of(normal.axioms, dbox), n.name_map, tuple(new_queries))


def normalize_kb(kb: KnowledgeBase, order: str = "fifo") -> tuple[KnowledgeBase, NameMap]:
    r = normalize_kb_with_queries(kb, (), order)
    return r.kb, r.names


def describe_names(names: NameMap) -> list[str]:
    return [f"{n} == {render(c)}" for n, c in sorted(names.definitions.items())]
