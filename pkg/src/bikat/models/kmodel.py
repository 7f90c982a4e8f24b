"""Finite relational interpretations of KAT terms.

Action interpretations are either explicit relation matrices (random models,
small spaces) or successor functions (compiled programs on larger structured
spaces).  `interp_kat` is the matrix route; `kat_post` is the worklist image
route that never materializes a matrix and scales to larger spaces.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from ..kat.guarded import eval_test
from ..kat.terms import (Alphabet, KAct, KatTerm, KPlus, KSeq, KStar, KTest,
                         TAnd, TestTerm, TNot, TOne, TOr, TPrim, TZero)
from .rel import Rel
from .space import StateSpace

REL_MATRIX_CAP = 8192


class ModelError(Exception):
    pass


class ActionSem:
    """Interpretation of one primitive action."""

    def succ(self, state: int) -> Iterable[int]:
        raise NotImplementedError

    def rel(self) -> Rel:
        raise NotImplementedError

    def pred(self, state: int) -> Iterable[int]:
        raise NotImplementedError


class RelAction(ActionSem):
    def __init__(self, r: Rel):
        self._rel = r
        self._conv: Rel | None = None

    def succ(self, state: int):
        return self._rel.succ(state)

    def rel(self) -> Rel:
        return self._rel

    def pred(self, state: int):
        if self._conv is None:
            self._conv = self._rel.converse()
        return self._conv.succ(state)


class FnAction(ActionSem):
    """Successor-function action; converse maps are built by one forward sweep."""

    def __init__(self, space: StateSpace, fn: Callable[[int], Iterable[int]]):
        self.space = space
        self.fn = fn
        self._rel: Rel | None = None
        self._preds: dict[int, list[int]] | None = None

    def succ(self, state: int):
        return self.fn(state)

    def rel(self) -> Rel:
        if self._rel is None:
            n = self.space.size
            if n > REL_MATRIX_CAP:
                raise ModelError(
                    f"relation matrix over {n} states exceeds cap {REL_MATRIX_CAP}")
            rows = [0] * n
            for s in range(n):
                for t in self.fn(s):
                    rows[s] |= 1 << t
            self._rel = Rel(n, tuple(rows))
        return self._rel

    def pred(self, state: int):
        if self._preds is None:
            preds: dict[int, list[int]] = {}
            for s in range(self.space.size):
                for t in self.fn(s):
                    preds.setdefault(t, []).append(s)
            self._preds = preds
        return self._preds.get(state, ())


class TestSem:
    """Interpretation of one primitive test: a subset of the state space."""

    def __init__(self, space: StateSpace, pred: Callable[[int], bool] | None = None,
                 mask: int | None = None):
        self.space = space
        self._pred = pred
        self._mask = mask

    def holds(self, state: int) -> bool:
        if self._mask is not None:
            return bool(self._mask >> state & 1)
        return self._pred(state)

    def mask(self) -> int:
        if self._mask is None:
            m = 0
            for s in range(self.space.size):
                if self._pred(s):
                    m |= 1 << s
            self._mask = m
        return self._mask


@dataclass
class KatModel:
    space: StateSpace
    acts: dict[str, ActionSem]
    tests: dict[str, TestSem]
    meta: dict = field(default_factory=dict)

    def act(self, name: str) -> ActionSem:
        try:
            return self.acts[name]
        except KeyError:
            raise ModelError(f"undeclared action {name!r}") from None

    def test(self, name: str) -> TestSem:
        try:
            return self.tests[name]
        except KeyError:
            raise ModelError(f"undeclared test {name!r}") from None


def havoc(space: StateSpace) -> Rel:
    """The full relation: top of the full relational model."""
    return Rel.full(space.size)


def test_mask(m: KatModel, t: TestTerm) -> int:
    full = (1 << m.space.size) - 1
    if isinstance(t, TZero):
        return 0
    if isinstance(t, TOne):
        return full
    if isinstance(t, TPrim):
        return m.test(t.name).mask()
    if isinstance(t, TNot):
        return full & ~test_mask(m, t.arg)
    if isinstance(t, TOr):
        out = 0
        for a in t.args:
            out |= test_mask(m, a)
        return out
    out = full
    for a in t.args:
        out &= test_mask(m, a)
    return out


def test_holds(m: KatModel, t: TestTerm, state: int) -> bool:
    if isinstance(t, TZero):
        return False
    if isinstance(t, TOne):
        return True
    if isinstance(t, TPrim):
        return m.test(t.name).holds(state)
    if isinstance(t, TNot):
        return not test_holds(m, t.arg, state)
    if isinstance(t, TOr):
        return any(test_holds(m, a, state) for a in t.args)
    return all(test_holds(m, a, state) for a in t.args)


def interp_kat(m: KatModel, t: KatTerm) -> Rel:
    """Compositional matrix interpretation; star is exact closure."""
    n = m.space.size
    if n > REL_MATRIX_CAP:
        raise ModelError(f"matrix interpretation over {n} states exceeds cap")
    if isinstance(t, KTest):
        return Rel.diag(n, test_mask(m, t.test))
    if isinstance(t, KAct):
        return m.act(t.name).rel()
    if isinstance(t, KPlus):
        out = Rel.empty(n)
        for a in t.args:
            out = out.union(interp_kat(m, a))
        return out
    if isinstance(t, KSeq):
        out = Rel.identity(n)
        for a in t.args:
            out = out.compose(interp_kat(m, a))
        return out
    return interp_kat(m, t.arg).star()


def kat_post(m: KatModel, t: KatTerm, states: frozenset[int] | set[int]) -> frozenset[int]:
    """Image of a state set under a term, by structural worklist evaluation."""
    cur = frozenset(states)
    if isinstance(t, KTest):
        return frozenset(s for s in cur if test_holds(m, t.test, s))
    if isinstance(t, KAct):
        sem = m.act(t.name)
        out: set[int] = set()
        for s in cur:
            out.update(sem.succ(s))
        return frozenset(out)
    if isinstance(t, KPlus):
        out = set()
        for a in t.args:
            out |= kat_post(m, a, cur)
        return frozenset(out)
    if isinstance(t, KSeq):
        for a in t.args:
            cur = kat_post(m, a, cur)
            if not cur:
                break
        return cur
    # star: worklist closure
    seen = set(cur)
    frontier = cur
    while frontier:
        nxt = kat_post(m, t.arg, frontier) - seen
        seen |= nxt
        frontier = nxt
    return frozenset(seen)


def kat_pre(m: KatModel, t: KatTerm, states: frozenset[int] | set[int]) -> frozenset[int]:
    """Preimage of a state set under a term (image under the converse)."""
    cur = frozenset(states)
    if isinstance(t, KTest):
        return frozenset(s for s in cur if test_holds(m, t.test, s))
    if isinstance(t, KAct):
        sem = m.act(t.name)
        out: set[int] = set()
        for s in cur:
            out.update(sem.pred(s))
        return frozenset(out)
    if isinstance(t, KPlus):
        out = set()
        for a in t.args:
            out |= kat_pre(m, a, cur)
        return frozenset(out)
    if isinstance(t, KSeq):
        for a in reversed(t.args):
            cur = kat_pre(m, a, cur)
            if not cur:
                break
        return cur
    seen = set(cur)
    frontier = cur
    while frontier:
        nxt = kat_pre(m, t.arg, frontier) - seen
        seen |= nxt
        frontier = nxt
    return frozenset(seen)


def random_kat_model(
    seed: int, size: int, alphabet: Alphabet, density: float = 0.3
) -> KatModel:
    """Reproducible pseudo-random interpretations at the given edge density."""
    rng = random.Random(seed)
    space = StateSpace.plain(size)
    acts: dict[str, ActionSem] = {}
    for a in alphabet.actions:
        pairs = [(i, j) for i in range(size) for j in range(size)
                 if rng.random() < density]
        acts[a] = RelAction(Rel.of_pairs(size, pairs))
    tests: dict[str, TestSem] = {}
    for p in alphabet.tests:
        mask = 0
        for i in range(size):
            if rng.random() < 0.5:
                mask |= 1 << i
        tests[p] = TestSem(space, mask=mask)
    return KatModel(space, acts, tests)
