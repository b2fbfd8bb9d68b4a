"""Classical EL-bottom subsumption by completion-rule saturation.

Every higher-level procedure in this package reduces to calls of
:meth:`Engine.entails`; the engine counts those calls so the number of
classical tests a procedure performs can be checked against its bound.
"""

from __future__ import annotations

import functools
import threading
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence, TypeVar

from .model import (
    Atom,
    BotConcept,
    Concept,
    Conj,
    DefNominal,
    Exists,
    FreshNameSource,
    Nominal,
    StrictGci,
    TopConcept,
    conj,
    subconcepts,
)
from .normalize import NormalTBox, Normalizer, is_normal

T = TypeVar("T")

TOP_ID = 0
BOT_ID = 1
_TOP_KEY = "top"
_BOT_KEY = "bot"


class NominalInCoreError(ValueError):
    """A nominal reached the classical core; translate it to an atom first."""


class TestCounter:
    """Thread-safe count of classical subsumption tests."""

    __test__ = False  # not a pytest class

    def __init__(self) -> None:
        self._value = 0
        self._lock = threading.Lock()

    def add(self, n: int = 1) -> None:
        with self._lock:
            self._value += n

    @property
    def value(self) -> int:
        return self._value

    def read_and_reset(self) -> int:
        with self._lock:
            v, self._value = self._value, 0
            return v


@dataclass(frozen=True)
class SaturationState:
    """Result of saturating a normal TBox.

    ``subs`` maps every atom name (and ``"top"``) to its derived subsumers,
    ``"top"``/``"bot"`` included; ``edges`` maps a role to derived
    ``(source, target)`` pairs.
    """

    subs: dict[str, frozenset[str]]
    edges: dict[str, frozenset[tuple[str, str]]]
    test_counter: TestCounter = field(default_factory=TestCounter, compare=False)

    def subsumes(self, sub: str, sup: str) -> bool:
        s = self.subs.get(sub, frozenset())
        return sup in s or _BOT_KEY in s


def _key(c: Concept) -> str:
    if isinstance(c, TopConcept):
        return _TOP_KEY
    if isinstance(c, BotConcept):
        return _BOT_KEY
    return c.name


class _Index:
    """Integer-interned view of a normal TBox, indexed by rule premise."""

    def __init__(self, tbox: Iterable[StrictGci]):
        self.ids: dict[str, int] = {_TOP_KEY: TOP_ID, _BOT_KEY: BOT_ID}
        self.names: list[str] = [_TOP_KEY, _BOT_KEY]
        self.told: dict[int, list[int]] = defaultdict(list)
        self.conj: dict[int, list[tuple[int, int]]] = defaultdict(list)
        self.ex_rhs: dict[int, list[tuple[str, int]]] = defaultdict(list)
        self.ex_lhs: dict[tuple[str, int], list[int]] = defaultdict(list)
        for ax in tbox:
            lhs, rhs = ax.lhs, ax.rhs
            if isinstance(rhs, Exists):
                self.ex_rhs[self.id(lhs)].append((rhs.role, self.id(rhs.filler)))
            elif isinstance(lhs, Conj):
                a1, a2 = (self.id(o) for o in lhs.operands)
                b = self.id(rhs)
                self.conj[a1].append((a2, b))
                self.conj[a2].append((a1, b))
            elif isinstance(lhs, Exists):
                self.ex_lhs[(lhs.role, self.id(lhs.filler))].append(self.id(rhs))
            else:
                self.told[self.id(lhs)].append(self.id(rhs))

    def id(self, c: Concept | str) -> int:
        k = c if isinstance(c, str) else _key(c)
        i = self.ids.get(k)
        if i is None:
            i = self.ids[k] = len(self.names)
            self.names.append(k)
        return i


class _Saturation:
    def __init__(self, index: _Index, order: str = "fifo"):
        if order not in ("fifo", "lifo"):
            raise ValueError(f"unknown order {order!r}")
        self.ix = index
        self.subs: dict[int, set[int]] = {}
        self.succ: dict[int, set[tuple[str, int]]] = defaultdict(set)
        self.pred: dict[int, set[tuple[int, str]]] = defaultdict(set)
        self.queue: deque = deque()
        self._pop = self.queue.popleft if order == "fifo" else self.queue.pop

    def activate(self, x: int) -> None:
        if x not in self.subs:
            self.subs[x] = set()
            self.queue.append((x, x))
            self.queue.append((x, TOP_ID))

    def _push(self, x: int, a: int) -> None:
        if a not in self.subs[x]:
            self.queue.append((x, a))

    def run(self) -> None:
        ix, subs, succ, pred = self.ix, self.subs, self.succ, self.pred
        while self.queue:
            item = self._pop()
            if len(item) == 2:
                x, a = item
                sx = subs[x]
                if a in sx:
                    continue
                sx.add(a)
                if a == BOT_ID:
                    for z, _ in pred[x]:
                        self._push(z, BOT_ID)
                for b in ix.told.get(a, ()):
                    self._push(x, b)
                for a2, b in ix.conj.get(a, ()):
                    if a2 in sx:
                        self._push(x, b)
                for r, b in ix.ex_rhs.get(a, ()):
                    if (r, b) not in succ[x]:
                        self.queue.append((x, r, b))
                for z, r in pred[x]:
                    for b in ix.ex_lhs.get((r, a), ()):
                        self._push(z, b)
            else:
                x, r, y = item
                if (r, y) in succ[x]:
                    continue
                succ[x].add((r, y))
                pred[y].add((x, r))
                self.activate(y)
                sy = subs[y]
                for a in list(sy):
                    for b in ix.ex_lhs.get((r, a), ()):
                        self._push(x, b)
                if BOT_ID in sy:
                    self._push(x, BOT_ID)

    def holds(self, x: int, b: int) -> bool:
        s = self.subs[x]
        return b in s or BOT_ID in s

    def state(self, counter: TestCounter) -> SaturationState:
        names = self.ix.names
        subs = {names[x]: frozenset(names[a] for a in s) for x, s in self.subs.items()}
        edges: dict[str, set[tuple[str, str]]] = defaultdict(set)
        for x, out in self.succ.items():
            for r, y in out:
                edges[r].add((names[x], names[y]))
        return SaturationState(subs, {r: frozenset(p) for r, p in edges.items()}, counter)


@functools.lru_cache(maxsize=1 << 16)
def _first_nominal(c: Concept) -> Concept | None:
    return next((s for s in subconcepts(c) if isinstance(s, (Nominal, DefNominal))), None)


def _check_nominal_free(concepts: Iterable[Concept]) -> None:
    for c in concepts:
        s = _first_nominal(c)
        if s is not None:
            raise NominalInCoreError(f"nominal {s} reached the classical core; translate it to an atom first")


def saturate(t: NormalTBox, order: str = "fifo", counter: TestCounter | None = None) -> SaturationState:
    """Saturate every atom of ``t`` (and ``top``)."""
    ix = _Index(t)
    sat = _Saturation(ix, order)
    for i in range(len(ix.names)):
        if i != BOT_ID:
            sat.activate(i)
    sat.run()
    return sat.state(counter or TestCounter())


class Engine:
    """Owner of a test counter, a delta-name source and memo tables.

    One engine is shared by the procedures that make up a single query so
    that their classical tests are counted together.
    """

    # cap on cached per-axiom normal forms; the delta axioms of rank tests never repeat
    NORMAL_CACHE_LIMIT = 200_000

    def __init__(self, order: str = "fifo"):
        self.order = order
        self.counter = TestCounter()
        self.delta_names = FreshNameSource("delta")
        self._memo: dict[Hashable, object] = {}
        self._memo_lock = threading.Lock()
        # names from the private "core" namespace never reach callers, so one
        # normalizer (and its per-axiom results) can serve every call
        self._normalizer = Normalizer(FreshNameSource("core"))
        self._normal: dict[StrictGci, tuple[StrictGci, ...]] = {}
        self._normal_lock = threading.Lock()

    def _normal_form(self, axioms: Iterable[StrictGci]) -> set[StrictGci]:
        out: set[StrictGci] = set()
        with self._normal_lock:
            if len(self._normal) > self.NORMAL_CACHE_LIMIT:
                self._normal.clear()
            for ax in axioms:
                out.update(self._normal_of(ax))
        return out

    def _normal_of(self, ax: StrictGci) -> tuple[StrictGci, ...]:
        n = self._normal.get(ax)
        if n is None:
            _check_nominal_free((ax.lhs, ax.rhs))
            clean = self._normalizer.clean_axiom(ax)
            parts = self._split(clean)
            if parts is None and clean == ax and is_normal(ax):
                n = (ax,)
            elif parts is None:
                n = tuple(self._normalizer.normalize([ax], self.order).axioms)
            else:
                n = tuple(set().union(*map(self._normal_of, parts)))
            self._normal[ax] = n
        return n

    def _split(self, ax: StrictGci) -> list[StrictGci] | None:
        """Name the complex parts of a conjunctive left side and of the right side.

        The definitions recur across calls and stay cached; only the small
        remainder is new.  Returns ``None`` when there is nothing to split.
        """
        lhs, rhs = ax.lhs, ax.rhs
        if not isinstance(lhs, Conj):
            return None
        parts: list[StrictGci] = []
        ops = []
        for o in lhs.operands:
            if isinstance(o, (Atom, TopConcept)):
                ops.append(o)
            else:
                a = self._normalizer.name(o)
                parts.append(StrictGci(o, a))
                ops.append(a)
        if not isinstance(rhs, (Atom, TopConcept, BotConcept)):
            a = self._normalizer.name(rhs)
            parts.append(StrictGci(a, rhs))
            rhs = a
        if not parts:
            return None
        return parts + [StrictGci(conj(*ops), rhs)]

    def entails(self, tbox: Iterable[StrictGci], q: StrictGci) -> bool:
        return self.entails_many(tbox, [q])[0]

    def entails_many(self, tbox: Iterable[StrictGci], queries: Sequence[StrictGci]) -> list[bool]:
        """Decide several strict queries over one saturation; each query counts as one test."""
        tbox = list(tbox)
        queries = list(queries)
        self.counter.add(len(queries))
        if not queries:
            return []
        _check_nominal_free(c for q in queries for c in (q.lhs, q.rhs))
        extra: list[StrictGci] = []
        sides: list[tuple[Concept, Concept]] = []
        with self._normal_lock:
            for q in queries:
                lhs, d1 = self._normalizer.atomize(q.lhs)
                rhs, d2 = self._normalizer.atomize(q.rhs)
                extra += d1 + d2
                sides.append((lhs, rhs))
        ix = _Index(self._normal_form(tbox + extra))
        sat = _Saturation(ix, self.order)
        pending = []
        for lhs, rhs in sides:
            if isinstance(lhs, BotConcept) or isinstance(rhs, TopConcept):
                pending.append(True)
                continue
            x = ix.id(lhs)
            sat.activate(x)
            pending.append((x, ix.id(rhs)))
        sat.run()
        return [p if p is True else sat.holds(*p) for p in pending]

    def read_and_reset_counter(self) -> int:
        return self.counter.read_and_reset()

    def memo(self, key: Hashable, compute: Callable[[], T]) -> T:
        with self._memo_lock:
            if key in self._memo:
                return self._memo[key]  # type: ignore[return-value]
        value = compute()
        with self._memo_lock:
            return self._memo.setdefault(key, value)  # type: ignore[return-value]

    def clear_memo(self) -> None:
        with self._memo_lock:
            self._memo.clear()


_default = Engine()


def default_engine() -> Engine:
    return _default


def entails(t: Iterable[StrictGci], q: StrictGci, engine: Engine | None = None) -> bool:
    return (engine or _default).entails(t, q)


def read_and_reset_counter(engine: Engine | SaturationState | None = None) -> int:
    if isinstance(engine, SaturationState):
        return engine.test_counter.read_and_reset()
    return (engine or _default).read_and_reset_counter()
