"""Bounded ranked-model search, used to cross-check the syntactic procedures.

A ranked interpretation is a finite classical interpretation plus a height
per element, with heights forming contiguous layers ``0..n``.  Lower height
means more typical.  The search is exhaustive up to a domain size, so it
can refute (find a witness model) but cannot prove anything about larger
models.

Models are found with a SAT solver: one propositional variable per atom
membership, role pair and "height >= k" bit, with concept extensions
defined on top.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from pysat.formula import IDPool
from pysat.solvers import Solver

from .model import (
    Atom,
    BotConcept,
    Concept,
    Conj,
    DefeasibleGci,
    DefNominal,
    Exists,
    KnowledgeBase,
    Nominal,
    StrictGci,
    TopConcept,
    axioms_signature,
    concept_signature,
    subconcepts,
)

SOLVER = "m22"


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_domain: int = 3
    max_height: int | None = None  # default: domain size - 1
    max_search_space: int = 2**64

    def __post_init__(self) -> None:
        if self.max_domain < 1:
            raise ValueError("max_domain must be positive")
        if self.max_height is not None and self.max_height < 0:
            raise ValueError("max_height must be non-negative")

    def heights(self, n: int) -> int:
        top = n - 1
        return top if self.max_height is None else min(top, self.max_height)


@dataclass(frozen=True)
class RankedInterpretation:
    size: int
    atom_ext: dict[str, frozenset[int]]
    role_ext: dict[str, frozenset[tuple[int, int]]]
    height: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.height) != self.size:
            raise ValueError("one height per element")
        if self.size and set(self.height) != set(range(max(self.height) + 1)):
            raise ValueError("heights must form contiguous layers from 0")

    @property
    def domain(self) -> range:
        return range(self.size)

    def extension(self, c: Concept) -> frozenset[int]:
        if isinstance(c, TopConcept):
            return frozenset(self.domain)
        if isinstance(c, BotConcept):
            return frozenset()
        if isinstance(c, Atom):
            return self.atom_ext.get(c.name, frozenset())
        if isinstance(c, Conj):
            out = frozenset(self.domain)
            for o in c.operands:
                out &= self.extension(o)
            return out
        if isinstance(c, Exists):
            filler = self.extension(c.filler)
            pairs = self.role_ext.get(c.role, frozenset())
            return frozenset(x for x, y in pairs if y in filler)
        raise ValueError(f"nominal {c} must be encoded as an atom first")

    def minimal(self, ext: frozenset[int]) -> frozenset[int]:
        if not ext:
            return frozenset()
        h = min(self.height[x] for x in ext)
        return frozenset(x for x in ext if self.height[x] == h)

    def describe(self) -> str:
        parts = [f"domain={list(self.domain)} heights={list(self.height)}"]
        for a in sorted(self.atom_ext):
            parts.append(f"{a}={sorted(self.atom_ext[a])}")
        for r in sorted(self.role_ext):
            parts.append(f"{r}={sorted(self.role_ext[r])}")
        return " ".join(parts)


def satisfies(r: RankedInterpretation, ax: StrictGci | DefeasibleGci) -> bool:
    lhs = r.extension(ax.lhs)
    rhs = r.extension(ax.rhs)
    if isinstance(ax, StrictGci):
        return lhs <= rhs
    return r.minimal(lhs) <= rhs


def is_model(r: RankedInterpretation, kb: KnowledgeBase) -> bool:
    return all(satisfies(r, ax) for ax in kb.axioms())


def _check_nominal_free(concepts) -> None:
    for c in concepts:
        for s in subconcepts(c):
            if isinstance(s, (Nominal, DefNominal)):
                raise ValueError(f"nominal {s} must be encoded as an atom first")


class _Encoding:
    """CNF for "a ranked interpretation of size n satisfying the given axioms"."""

    def __init__(self, atoms: list[str], roles: list[str], n: int, heights: int):
        self.atoms, self.roles, self.n, self.h = atoms, roles, n, heights
        self.pool = IDPool()
        self.clauses: list[list[int]] = []
        self.true = self.pool.id("true")
        self.clauses.append([self.true])
        self._ext: dict[tuple[Concept, int], int] = {}
        self._lt: dict[tuple[int, int], int] = {}
        for i in range(n):
            for k in range(1, heights):
                self.clauses.append([-self.g(i, k + 1), self.g(i, k)])
        # every non-empty layer k >= 1 needs an element in layer k - 1
        for k in range(1, heights + 1):
            for i in range(n):
                self.clauses.append([-self.g(i, k)] + [self._exactly(j, k - 1) for j in range(n)])

    def primary(self) -> list[int]:
        out = [self.atom(a, i) for a in self.atoms for i in range(self.n)]
        out += [self.role(r, i, j) for r in self.roles for i in range(self.n) for j in range(self.n)]
        out += [self.g(i, k) for i in range(self.n) for k in range(1, self.h + 1)]
        return out

    def atom(self, a: str, i: int) -> int:
        return self.pool.id(("A", a, i))

    def role(self, r: str, i: int, j: int) -> int:
        return self.pool.id(("R", r, i, j))

    def g(self, i: int, k: int) -> int:
        """Element ``i`` has height at least ``k`` (``k >= 1``)."""
        return self.pool.id(("G", i, k))

    def _exactly(self, j: int, k: int) -> int:
        v = self.pool.id(("E", j, k))
        if k >= 1:
            self.clauses.append([-v, self.g(j, k)])
        if k + 1 <= self.h:
            self.clauses.append([-v, -self.g(j, k + 1)])
        return v

    def lt(self, j: int, i: int) -> int:
        """Implies height(j) < height(i)."""
        key = (j, i)
        if key not in self._lt:
            v = self.pool.id(("LT", j, i))
            ms = []
            for k in range(1, self.h + 1):
                m = self.pool.id(("M", j, i, k))
                self.clauses.append([-m, -self.g(j, k)])
                self.clauses.append([-m, self.g(i, k)])
                ms.append(m)
            self.clauses.append([-v] + ms)
            self._lt[key] = v
        return self._lt[key]

    def ext(self, c: Concept, i: int) -> int:
        key = (c, i)
        if key in self._ext:
            return self._ext[key]
        if isinstance(c, TopConcept):
            v = self.true
        elif isinstance(c, BotConcept):
            v = -self.true
        elif isinstance(c, Atom):
            v = self.atom(c.name, i)
        elif isinstance(c, Conj):
            ops = [self.ext(o, i) for o in c.operands]
            v = self.pool.id(("C", c, i))
            for o in ops:
                self.clauses.append([-v, o])
            self.clauses.append([v] + [-o for o in ops])
        elif isinstance(c, Exists):
            v = self.pool.id(("X", c, i))
            ps = []
            for j in range(self.n):
                p = self.pool.id(("P", c, i, j))
                rij, fj = self.role(c.role, i, j), self.ext(c.filler, j)
                self.clauses += [[-p, rij], [-p, fj], [p, -rij, -fj]]
                ps.append(p)
            self.clauses.append([-v] + ps)
            for p in ps:
                self.clauses.append([v, -p])
        else:
            raise ValueError(f"nominal {c} must be encoded as an atom first")
        self._ext[key] = v
        return v

    def add_axiom(self, ax: StrictGci | DefeasibleGci) -> None:
        for i in range(self.n):
            clause = [-self.ext(ax.lhs, i), self.ext(ax.rhs, i)]
            if isinstance(ax, DefeasibleGci):
                for j in range(self.n):
                    if j == i or self.h == 0:
                        continue
                    w = self.pool.id(("W", ax, i, j))
                    self.clauses.append([-w, self.ext(ax.lhs, j)])
                    self.clauses.append([-w, self.lt(j, i)])
                    clause.append(w)
            self.clauses.append(clause)

    def height0(self, i: int) -> list[int]:
        return [-self.g(i, 1)] if self.h >= 1 else []

    def decode(self, model: list[int]) -> RankedInterpretation:
        true = {v for v in model if v > 0}
        atom_ext = {a: frozenset(i for i in range(self.n) if self.atom(a, i) in true) for a in self.atoms}
        role_ext = {
            r: frozenset((i, j) for i in range(self.n) for j in range(self.n) if self.role(r, i, j) in true)
            for r in self.roles
        }
        heights = tuple(sum(1 for k in range(1, self.h + 1) if self.g(i, k) in true) for i in range(self.n))
        return RankedInterpretation(self.n, atom_ext, role_ext, heights)


def _search_space(n_atoms: int, n_roles: int, n: int, heights: int) -> int:
    return 2 ** (n_atoms * n + n_roles * n * n) * (heights + 1) ** n


def _signature(axioms, concepts=()):
    sig = axioms_signature(axioms)
    csig = concept_signature(concepts)
    return sorted(sig.atoms | csig.atoms), sorted(sig.roles | csig.roles)


def _check_budget(atoms, roles, budget: OracleBudget, classical: bool = False) -> None:
    total = 0
    for n in range(1, budget.max_domain + 1):
        total += _search_space(len(atoms), len(roles), n, 0 if classical else budget.heights(n))
    if total > budget.max_search_space:
        raise OracleBudgetExceeded(
            f"raw search space {total} exceeds cap {budget.max_search_space} "
            f"({len(atoms)} atoms, {len(roles)} roles, domain <= {budget.max_domain})"
        )


def _encode(kb_axioms, atoms, roles, n, heights) -> _Encoding:
    enc = _Encoding(atoms, roles, n, heights)
    for ax in kb_axioms:
        enc.add_axiom(ax)
    return enc


def enumerate_models(kb: KnowledgeBase, budget: OracleBudget = OracleBudget()) -> Iterator[RankedInterpretation]:
    """Every ranked model of ``kb`` with at most ``budget.max_domain`` elements.

    Interpretations are over the KB's own signature; isomorphic copies are
    all reported.
    """
    axioms = list(kb.axioms())
    _check_nominal_free(c for ax in axioms for c in (ax.lhs, ax.rhs))
    atoms, roles = _signature(axioms)
    _check_budget(atoms, roles, budget)
    for n in range(1, budget.max_domain + 1):
        enc = _encode(axioms, atoms, roles, n, budget.heights(n))
        primary = enc.primary()
        with Solver(name=SOLVER, bootstrap_with=enc.clauses) as s:
            while s.solve():
                model = s.get_model()
                yield enc.decode(model)
                true = set(v for v in model if v > 0)
                s.add_clause([-v if v in true else v for v in primary])


def enumerate_models_naive(kb: KnowledgeBase, budget: OracleBudget = OracleBudget()) -> Iterator[RankedInterpretation]:
    """Same contract as :func:`enumerate_models`, by brute force (tiny inputs only)."""
    axioms = list(kb.axioms())
    _check_nominal_free(c for ax in axioms for c in (ax.lhs, ax.rhs))
    atoms, roles = _signature(axioms)
    _check_budget(atoms, roles, budget)
    for n in range(1, budget.max_domain + 1):
        cells = list(range(n))
        pairs = [(i, j) for i in cells for j in cells]
        subsets = [frozenset(s) for k in range(n + 1) for s in itertools.combinations(cells, k)]
        pair_sets = [frozenset(s) for k in range(len(pairs) + 1) for s in itertools.combinations(pairs, k)]
        hmax = budget.heights(n)
        heights = [
            h for h in itertools.product(range(hmax + 1), repeat=n)
            if set(h) == set(range(max(h) + 1))
        ]
        for aext in itertools.product(subsets, repeat=len(atoms)):
            for rext in itertools.product(pair_sets, repeat=len(roles)):
                for h in heights:
                    r = RankedInterpretation(n, dict(zip(atoms, aext)), dict(zip(roles, rext)), h)
                    if is_model(r, kb):
                        yield r


def find_typical_witness(
    kb: KnowledgeBase,
    c: Concept,
    budget: OracleBudget = OracleBudget(),
) -> RankedInterpretation | None:
    """A bounded ranked model of ``kb`` with an element of ``c`` in layer 0, if one exists."""
    axioms = list(kb.axioms())
    _check_nominal_free([c] + [x for ax in axioms for x in (ax.lhs, ax.rhs)])
    atoms, roles = _signature(axioms, [c])
    _check_budget(atoms, roles, budget)
    for n in range(1, budget.max_domain + 1):
        enc = _encode(axioms, atoms, roles, n, budget.heights(n))
        assumptions = [enc.ext(c, 0)] + enc.height0(0)
        with Solver(name=SOLVER, bootstrap_with=enc.clauses) as s:
            if s.solve(assumptions=assumptions):
                return enc.decode(s.get_model())
    return None


def exceptional_bounded(kb: KnowledgeBase, c: Concept, budget: OracleBudget = OracleBudget()) -> bool:
    """True iff no bounded ranked model of ``kb`` puts an instance of ``c`` in layer 0."""
    return find_typical_witness(kb, c, budget) is None


def find_countermodel(
    tbox,
    q: StrictGci,
    budget: OracleBudget = OracleBudget(),
) -> RankedInterpretation | None:
    """A bounded classical model of ``tbox`` with an element in ``q.lhs`` but not in ``q.rhs``."""
    tbox = list(tbox)
    _check_nominal_free([q.lhs, q.rhs] + [x for ax in tbox for x in (ax.lhs, ax.rhs)])
    atoms, roles = _signature(tbox, [q.lhs, q.rhs])
    _check_budget(atoms, roles, budget, classical=True)
    for n in range(1, budget.max_domain + 1):
        enc = _encode(tbox, atoms, roles, n, 0)
        assumptions = [enc.ext(q.lhs, 0), -enc.ext(q.rhs, 0)]
        with Solver(name=SOLVER, bootstrap_with=enc.clauses) as s:
            if s.solve(assumptions=assumptions):
                return enc.decode(s.get_model())
    return None


def entails_bounded(tbox, q: StrictGci, budget: OracleBudget = OracleBudget()) -> bool:
    return find_countermodel(tbox, q, budget) is None
