"""Inheritance nets and the inheritance-based closure.

The net of a normalized knowledge base has a node per atom and per concept
appearing in a strict axiom, and four kinds of links: strict (``=>``),
incompatibility (``<!>``, symmetric), defeasible (``->``) and conjunction
(``C, D <=>& E``).  For a pair of nodes ``(C, D)`` only the defeasible links
lying on a route from ``C`` to ``D`` are used to decide ``C <~ D``; those
local verdicts are added to the DBox before the final rational-closure
query.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .elcore import Engine, default_engine
from .model import (
    BOT,
    TOP,
    Atom,
    BotConcept,
    Concept,
    Conj,
    DefeasibleGci,
    Exists,
    KnowledgeBase,
    StrictGci,
    TopConcept,
    conj,
    render,
)
from .normalize import NameMap, normalize_kb_with_queries
from .rc import rational_closure_entails

Link = tuple[Concept, Concept]
ConjLink = tuple[frozenset, Concept]


class InternalNetError(RuntimeError):
    pass


@dataclass(frozen=True)
class Net:
    nodes: frozenset[Concept]
    strict_pos: frozenset[Link]
    strict_neg: frozenset[frozenset]
    def_pos: frozenset[Link]
    conj: frozenset[ConjLink]
    def_origin: dict = field(default_factory=dict, hash=False, compare=False)
    def_neg: frozenset[Link] = frozenset()

    @cached_property
    def _adjacency(self) -> dict[Concept, set[Concept]]:
        adj: dict[Concept, set[Concept]] = {n: set() for n in self.nodes}
        for a, b in itertools.chain(self.strict_pos, self.def_pos, self.def_neg):
            adj[a].add(b)
        for pair in self.strict_neg:
            a, b = tuple(pair) if len(pair) == 2 else (next(iter(pair)),) * 2
            adj[a].add(b)
            adj[b].add(a)
        return adj

    @cached_property
    def _conj_by_operand(self) -> dict[Concept, list[ConjLink]]:
        out: dict[Concept, list[ConjLink]] = {}
        for link in self.conj:
            for op in link[0]:
                out.setdefault(op, []).append(link)
        return out

    def reachable(self, start: Concept) -> frozenset[Concept]:
        cache = self.__dict__.setdefault("_reach_cache", {})
        if start in cache:
            return cache[start]
        seen = {start}
        todo = [start]
        while todo:
            x = todo.pop()
            nxt = set(self._adjacency.get(x, ()))
            for ops, target in self._conj_by_operand.get(x, ()):
                if ops <= seen:
                    nxt.add(target)
            for y in nxt:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        result = frozenset(seen)
        cache[start] = result
        return result

    def sorted_nodes(self) -> list[Concept]:
        return sorted(self.nodes, key=render)


@dataclass(frozen=True)
class DeltaSet:
    links: frozenset[Link]
    axioms: frozenset[DefeasibleGci]


def _is_node_candidate(c: Concept) -> bool:
    return isinstance(c, (Atom, Exists))


def build_net(kb: KnowledgeBase, engine: Engine | None = None) -> Net:
    """Build the net of a normalized, nominal-free knowledge base."""
    engine = engine or default_engine()
    nodes: set[Concept] = set()
    strict_pos: set[Link] = set()
    strict_neg: set[frozenset] = set()
    def_pos: set[Link] = set()
    origin: dict[Link, DefeasibleGci] = {}

    def atoms_of(c: Concept) -> Iterable[Atom]:
        if isinstance(c, Atom):
            yield c
        elif isinstance(c, Conj):
            for o in c.operands:
                yield from atoms_of(o)
        elif isinstance(c, Exists):
            yield from atoms_of(c.filler)

    for ax in kb.axioms():
        for side in (ax.lhs, ax.rhs):
            nodes.update(atoms_of(side))
    for ax in kb.sorted_dbox():
        if not all(isinstance(s, (Atom, TopConcept, BotConcept)) for s in (ax.lhs, ax.rhs)):
            raise ValueError(f"defeasible axiom not normalized: {ax}")
        link = (ax.lhs, ax.rhs)
        nodes.update(link)
        def_pos.add(link)
        origin[link] = ax
    for ax in kb.sorted_tbox():
        if isinstance(ax.lhs, Conj) and isinstance(ax.rhs, BotConcept) and len(ax.lhs.operands) == 2:
            strict_neg.add(frozenset(ax.lhs.operands))
            continue
        nodes.update((ax.lhs, ax.rhs))
        strict_pos.add((ax.lhs, ax.rhs))

    # total classification over the nodes
    tbox = list(kb.tbox)
    cands = sorted((n for n in nodes if _is_node_candidate(n)), key=render)
    targets = sorted((n for n in nodes if not isinstance(n, TopConcept)), key=render)
    conj_links: set[ConjLink] = set()
    # each phase is one saturation; every query still counts as one test
    singles = [StrictGci(c, BOT) for c in cands]
    unsat = {c for c, u in zip(cands, engine.entails_many(tbox, singles)) if u}
    live = [c for c in cands if c not in unsat]
    pairs = [(c, d, conj(c, d)) for c, d in itertools.combinations(live, 2)]
    phase1 = [StrictGci(c, e) for c in live for e in targets if e != c]
    phase1 += [StrictGci(cd, BOT) for _, _, cd in pairs]
    answers = dict(zip(phase1, engine.entails_many(tbox, phase1)))
    for q, ok in answers.items():
        if ok and not isinstance(q.rhs, BotConcept):
            strict_pos.add((q.lhs, q.rhs))
    pairs = [p for p in pairs if not answers[StrictGci(p[2], BOT)]]
    phase2 = [StrictGci(cd, e) for c, d, cd in pairs for e in targets if e not in (c, d)]
    hits = [q for q, ok in zip(phase2, engine.entails_many(tbox, phase2)) if ok]
    phase3 = [StrictGci(q.rhs, q.lhs) for q in hits]
    ops_of = {cd: frozenset((c, d)) for c, d, cd in pairs}
    for q, ok in zip(phase3, engine.entails_many(tbox, phase3)):
        if ok:
            conj_links.add((ops_of[q.rhs], q.lhs))
    for ops, e in conj_links:
        for o in ops:
            strict_pos.add((e, o))
    strict_pos = {(a, b) for a, b in strict_pos if a != b}
    return Net(
        frozenset(nodes),
        frozenset(strict_pos),
        frozenset(strict_neg),
        frozenset(def_pos),
        frozenset(conj_links),
        origin,
    )


def reachable_from(net: Net, start: Concept) -> frozenset[Concept]:
    return net.reachable(start)


def delta_links(net: Net, c: Concept, d: Concept) -> DeltaSet:
    """Defeasible links ``E -> F`` with ``E`` reachable from ``c`` and ``d`` reachable from ``F``."""
    if net.def_neg:
        raise InternalNetError("negative defeasible links cannot arise from EL-bottom input")
    from_c = net.reachable(c)
    links = frozenset(
        (e, f) for e, f in net.def_pos if e in from_c and d in net.reachable(f)
    )
    return DeltaSet(links, frozenset(net.def_origin[l] for l in links))


def inheritance_dbox(nkb: KnowledgeBase, engine: Engine | None = None) -> frozenset[DefeasibleGci]:
    """The extended DBox of a normalized KB: the original axioms plus every locally supported ``C <~ D``."""
    engine = engine or default_engine()

    def compute() -> frozenset[DefeasibleGci]:
        net = build_net(nkb, engine)
        d_in = set(nkb.dbox)
        nodes = net.sorted_nodes()
        pairs = [(c, d) for c in nodes for d in nodes]
        # every local closure starts with the same classical shortcut; batch it
        classical = engine.entails_many(nkb.tbox, [StrictGci(c, d) for c, d in pairs])
        for (c, d), holds in zip(pairs, classical):
            if holds:
                d_in.add(DefeasibleGci(c, d))
                continue
            delta = delta_links(net, c, d)
            if not delta.axioms:
                continue  # empty local DBox: the closure is the classical answer
            local = KnowledgeBase(nkb.tbox, delta.axioms)
            if rational_closure_entails(local, DefeasibleGci(c, d), engine):
                d_in.add(DefeasibleGci(c, d))
        return frozenset(d_in)

    return engine.memo(("d_in", nkb), compute)


@dataclass(frozen=True)
class InheritancePrep:
    kb: KnowledgeBase
    names: NameMap
    query: DefeasibleGci
    d_in: frozenset[DefeasibleGci]

    @property
    def closure_kb(self) -> KnowledgeBase:
        return KnowledgeBase(self.kb.tbox, self.d_in)


def prepare_inheritance(kb: KnowledgeBase, q: DefeasibleGci, engine: Engine | None = None) -> InheritancePrep | None:
    """Normalize ``kb`` together with ``q`` and build the extended DBox.

    Returns ``None`` when the KB has no ranked model (every query holds).
    """
    engine = engine or default_engine()
    norm = normalize_kb_with_queries(kb, [q])
    nkb, (nq,) = norm.kb, norm.queries
    if rational_closure_entails(nkb, DefeasibleGci(TOP, BOT), engine):
        return None
    return InheritancePrep(nkb, norm.names, nq, inheritance_dbox(nkb, engine))


def inheritance_closure_entails(kb: KnowledgeBase, q: DefeasibleGci, engine: Engine | None = None) -> bool:
    engine = engine or default_engine()
    prep = prepare_inheritance(kb, q, engine)
    if prep is None:
        return True
    return rational_closure_entails(prep.closure_kb, prep.query, engine)


def _dot_id(c: Concept) -> str:
    return '"' + render(c).replace("\\", "\\\\").replace('"', '\\"') + '"'


def net_to_dot(net: Net, names: NameMap | None = None) -> str:
    """Graphviz text for the net; fresh atoms get their definitions as labels."""
    lines = ["digraph net {", "  rankdir=LR;"]
    for n in net.sorted_nodes():
        label = render(n)
        if names is not None and isinstance(n, Atom) and n.name in names.definitions:
            label = f"{n.name}\\n= {render(names.definitions[n.name])}"
        lines.append(f"  {_dot_id(n)} [label=\"{label}\"];")
    for a, b in sorted(net.strict_pos, key=lambda l: (render(l[0]), render(l[1]))):
        lines.append(f"  {_dot_id(a)} -> {_dot_id(b)} [style=bold];")
    for pair in sorted(net.strict_neg, key=lambda p: sorted(map(render, p))):
        a, b = sorted(pair, key=render) if len(pair) == 2 else (next(iter(pair)),) * 2
        lines.append(f"  {_dot_id(a)} -> {_dot_id(b)} [dir=both, style=bold, color=red, arrowhead=tee, arrowtail=tee];")
    for a, b in sorted(net.def_pos, key=lambda l: (render(l[0]), render(l[1]))):
        lines.append(f"  {_dot_id(a)} -> {_dot_id(b)} [style=dashed];")
    for i, (ops, e) in enumerate(sorted(net.conj, key=lambda l: (sorted(map(render, l[0])), render(l[1])))):
        j = f'"conj{i}"'
        lines.append(f"  {j} [shape=point];")
        for o in sorted(ops, key=render):
            lines.append(f"  {_dot_id(o)} -> {j} [arrowhead=none];")
        lines.append(f"  {j} -> {_dot_id(e)} [style=bold, dir=both];")
    lines.append("}")
    return "\n".join(lines) + "\n"
