"""Seeded random knowledge bases for property and acceptance tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from hypothesis import strategies as st

from elrc.model import (
    BOT,
    TOP,
    Atom,
    Concept,
    DefeasibleGci,
    DefNominal,
    Exists,
    KnowledgeBase,
    Nominal,
    StrictGci,
    conj,
)


@dataclass(frozen=True)
class Shape:
    atoms: int = 5
    roles: int = 1
    tbox: tuple[int, int] = (0, 6)
    dbox: tuple[int, int] = (1, 6)
    depth: int = 2
    individuals: int = 0

    def atom_names(self) -> list[str]:
        return [f"A{i}" for i in range(self.atoms)]

    def role_names(self) -> list[str]:
        return [f"r{i}" for i in range(self.roles)]


def random_concept(rng: random.Random, shape: Shape, depth: int | None = None) -> Concept:
    depth = shape.depth if depth is None else depth
    atoms = shape.atom_names()
    roll = rng.random()
    if depth <= 0 or roll < 0.5:
        return TOP if rng.random() < 0.05 else Atom(rng.choice(atoms))
    if roll < 0.75 or not shape.roles:
        return conj(random_concept(rng, shape, depth - 1), random_concept(rng, shape, depth - 1))
    return Exists(rng.choice(shape.role_names()), random_concept(rng, shape, depth - 1))


def random_strict(rng: random.Random, shape: Shape) -> StrictGci:
    atoms = shape.atom_names()
    roll = rng.random()
    if roll < 0.2 and len(atoms) > 1:
        a, b = rng.sample(atoms, 2)
        return StrictGci(conj(Atom(a), Atom(b)), BOT)
    if roll < 0.55:
        return StrictGci(Atom(rng.choice(atoms)), Atom(rng.choice(atoms)))
    return StrictGci(random_concept(rng, shape), random_concept(rng, shape))


def random_defeasible(rng: random.Random, shape: Shape) -> DefeasibleGci:
    atoms = shape.atom_names()
    if rng.random() < 0.5:
        return DefeasibleGci(Atom(rng.choice(atoms)), Atom(rng.choice(atoms)))
    return DefeasibleGci(random_concept(rng, shape), random_concept(rng, shape))


def random_kb(rng: random.Random, shape: Shape = Shape()) -> KnowledgeBase:
    nt = rng.randint(*shape.tbox)
    nd = rng.randint(*shape.dbox)
    return KnowledgeBase.of(
        [random_strict(rng, shape) for _ in range(nt)],
        [random_defeasible(rng, shape) for _ in range(nd)],
    )


def random_taxonomy_kb(rng: random.Random, shape: Shape = Shape()) -> KnowledgeBase:
    """Class tree plus clashing default properties, so exceptions nest several ranks deep.

    Classes are ``C*``, properties come in incompatible pairs ``P*``/``Q*``.
    """
    n_cls = max(2, shape.atoms)
    n_props = max(1, shape.atoms // 2)
    classes = [Atom(f"C{i}") for i in range(n_cls)]
    props = [(Atom(f"P{k}"), Atom(f"Q{k}")) for k in range(n_props)]
    roles = shape.role_names()
    tbox: list[StrictGci] = [StrictGci(conj(p, q), BOT) for p, q in props]
    for i in range(1, n_cls):
        tbox.append(StrictGci(classes[i], classes[rng.randrange(i)]))
    extra = rng.randint(*shape.tbox) - len(tbox)
    tbox += [random_strict(rng, shape) for _ in range(max(0, extra))]
    dbox: list[DefeasibleGci] = []
    target = rng.randint(*shape.dbox)
    while len(dbox) < target:
        c = rng.choice(classes)
        p = rng.choice(props)[rng.randrange(2)]
        if roles and rng.random() < 0.2:
            p = Exists(rng.choice(roles), p)
        if rng.random() < 0.15:
            c = conj(c, rng.choice(classes))
        dbox.append(DefeasibleGci(c, p))
    return KnowledgeBase.of(tbox[: max(shape.tbox[1], len(props))], dbox)


def kb_from_seed(seed: int, shape: Shape = Shape()) -> KnowledgeBase:
    return random_kb(random.Random(seed), shape)


def mixed_kb_from_seed(seed: int, shape: Shape = Shape()) -> KnowledgeBase:
    """Alternate between unstructured and taxonomy-shaped KBs."""
    rng = random.Random(seed)
    return random_taxonomy_kb(rng, shape) if seed % 2 else random_kb(rng, shape)


def random_safe_nominal_kb(rng: random.Random, shape: Shape) -> KnowledgeBase:
    """A nominal-safe KB: nominals only bare on a left side or as ``some r.{a}`` fillers.

    Nominals are written classically; the pipelines under test pick their reading.
    """
    inds = [f"i{k}" for k in range(max(1, shape.individuals))]
    roles = shape.role_names() or ["r0"]

    def safe_filler() -> Concept:
        return Exists(rng.choice(roles), Nominal(rng.choice(inds)))

    def with_nominals(c: Concept, allow_bare: bool) -> Concept:
        roll = rng.random()
        if allow_bare and roll < 0.3:
            return Nominal(rng.choice(inds))
        if roll < 0.55:
            return conj(c, safe_filler())
        return c

    kb = random_kb(rng, shape)
    tbox = [StrictGci(with_nominals(ax.lhs, True), with_nominals(ax.rhs, False)) for ax in kb.tbox]
    tbox += [StrictGci(Nominal(a), Atom(rng.choice(shape.atom_names()))) for a in inds]
    dbox = [DefeasibleGci(with_nominals(ax.lhs, True), with_nominals(ax.rhs, False)) for ax in kb.dbox]
    return KnowledgeBase.of(tbox, dbox)


def random_def_nominal_concept(rng: random.Random, shape: Shape) -> Concept:
    inds = [f"i{k}" for k in range(max(1, shape.individuals))]
    if rng.random() < 0.5:
        return DefNominal(rng.choice(inds))
    return random_concept(rng, shape)


SMALL = Shape(atoms=4, roles=1, tbox=(0, 5), dbox=(1, 5), depth=2)
TINY = Shape(atoms=3, roles=1, tbox=(0, 2), dbox=(1, 2), depth=1)
LARGE = Shape(atoms=8, roles=2, tbox=(0, 30), dbox=(1, 20), depth=2)
RANKING = Shape(atoms=6, roles=1, tbox=(0, 12), dbox=(1, 12), depth=2)
NOMINAL = Shape(atoms=4, roles=1, tbox=(0, 4), dbox=(1, 4), depth=1, individuals=2)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def kbs(shape: Shape = SMALL):
    """Hypothesis strategy drawing a KB through its seed, so failures shrink to one integer."""
    return seeds.map(lambda s: mixed_kb_from_seed(s, shape))
