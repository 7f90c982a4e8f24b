"""Judgment data and enumerable views of pair relations.

`PairSpec` turns a bitest into something the oracles can iterate: it analyses
conjunctions of one-sided conditions and expression-equality atoms so that,
on structured spaces, the right state is assembled from forced fields instead
of filtering the full pair space.  Anything outside that fragment falls back
to full-product filtering, which is refused above a size cap rather than
allowed to run forever.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..bi.terms import (BAnd, BEmbLTest, BEmbRTest, BiTestTerm, BNot, BOne,
                        BOr, BPrim, BZero)
from ..kat.terms import KatTerm
from ..models.bmodel import BiModel, BitestSem, bitest_holds
from ..models.imp import EArr, EConst, EVar, ImpEnv
from ..models.kmodel import kat_post, kat_pre, test_holds, test_mask
from ..models.rel import Rel

PAIR_ENUM_CAP = 4_000_000
FULL_PRODUCT_CAP = 1024


class EnumRefused(Exception):
    pass


import operator

_OPS = {"==": operator.eq, "!=": operator.ne, "<": operator.lt,
        "<=": operator.le, ">": operator.gt, ">=": operator.ge}


class ExprBitest(BitestSem):
    """Bitest comparing a left-state expression with a right-state one.
    Expression values are cached per state, so repeated membership tests cost
    two array lookups."""

    def __init__(self, env: ImpEnv, lexpr, op: str, rexpr):
        super().__init__(env.space, pred=self._holds)
        self.env = env
        self.lexpr = lexpr
        self.op = op
        self.rexpr = rexpr
        self._cmp = _OPS[op]
        self._lvals: list[int] | None = None
        self._rvals: list[int] | None = None

    def lvals(self) -> list[int]:
        if self._lvals is None:
            ev = self.env.eval
            self._lvals = [ev(self.lexpr, s) for s in range(self.env.space.size)]
        return self._lvals

    def rvals(self) -> list[int]:
        if self._rvals is None:
            ev = self.env.eval
            self._rvals = [ev(self.rexpr, s) for s in range(self.env.space.size)]
        return self._rvals

    def _holds(self, s: int, s2: int) -> bool:
        return self._cmp(self.lvals()[s], self.rvals()[s2])

    def forced_right_field(self):
        """(field, value_fn) when this atom pins one right field to a
        left-state value; None otherwise."""
        if self.op != "==":
            return None
        r = self.rexpr
        if isinstance(r, EVar):
            return (r.name, lambda s: self.lvals()[s])
        if isinstance(r, EArr) and isinstance(r.index, EConst):
            decl = self.env.space.array_decl(r.name)
            if decl is not None:
                return ((r.name, r.index.value % decl.length),
                        lambda s: self.lvals()[s])
        return None


def compile_pred(bm: BiModel, t: BiTestTerm):
    """Compile a bitest to a pair predicate closure; membership tests become
    array lookups and mask probes instead of term walks."""
    if isinstance(t, BZero):
        return lambda a, b: False
    if isinstance(t, BOne):
        return lambda a, b: True
    if isinstance(t, BPrim):
        sem = bm.bitest(t.name)
        if isinstance(sem, ExprBitest):
            lv, rv, cmp = sem.lvals(), sem.rvals(), sem._cmp
            return lambda a, b: cmp(lv[a], rv[b])
        return sem.holds
    if isinstance(t, BEmbLTest):
        mask = test_mask(bm.base, t.test)
        return lambda a, b: bool(mask >> a & 1)
    if isinstance(t, BEmbRTest):
        mask = test_mask(bm.base, t.test)
        return lambda a, b: bool(mask >> b & 1)
    if isinstance(t, BNot):
        inner = compile_pred(bm, t.arg)
        return lambda a, b: not inner(a, b)
    subs = [compile_pred(bm, x) for x in t.args]
    if isinstance(t, BOr):
        return lambda a, b: any(p(a, b) for p in subs)
    return lambda a, b: all(p(a, b) for p in subs)


def _single_right_field(space, expr):
    """The state field an expression reads, when it is one plain read."""
    if isinstance(expr, EVar) and space.has_field(expr.name):
        return expr.name
    if isinstance(expr, EArr) and isinstance(expr.index, EConst):
        decl = space.array_decl(expr.name)
        if decl is not None:
            return (expr.name, expr.index.value % decl.length)
    return None


@dataclass(frozen=True)
class RelSpec:
    pre: BiTestTerm
    post: BiTestTerm


@dataclass(frozen=True)
class Judgment:
    kind: str  # allall | fsim | bsim | existsforall | existsexists | incorrectness
    left: KatTerm
    right: KatTerm
    spec: RelSpec


@dataclass(frozen=True)
class Counterexample:
    condition: str
    states: tuple[int, ...]
    rendered: str = ""


class PostMap:
    """Per-state images of a term, computed on demand and memoized."""

    def __init__(self, model, term: KatTerm, backward: bool = False):
        self.model = model
        self.term = term
        self.backward = backward
        self._cache: dict[int, frozenset[int]] = {}

    def __getitem__(self, state: int) -> frozenset[int]:
        got = self._cache.get(state)
        if got is None:
            f = kat_pre if self.backward else kat_post
            got = f(self.model, self.term, frozenset((state,)))
            self._cache[state] = got
        return got


def post_map(model, term: KatTerm, backward: bool = False) -> PostMap:
    """Memoized per-state image maps, shared across oracle invocations."""
    cache = getattr(model, "_postmap_cache", None)
    if cache is None:
        cache = {}
        model._postmap_cache = cache
    key = (term, backward)
    got = cache.get(key)
    if got is None:
        got = PostMap(model, term, backward)
        cache[key] = got
    return got


class PairSpec:
    """Enumerable view of a bitest's pair relation in a model."""

    def __init__(self, bm: BiModel, term: BiTestTerm):
        self.bm = bm
        self.term = term
        self.n = bm.space.size
        self._pairs: list[tuple[int, int]] | None = None
        self._left_index: dict[int, list[int]] | None = None
        self._analysis = self._analyse()
        self._pred = None

    def holds(self, s: int, s2: int) -> bool:
        if self._pred is None:
            self._pred = compile_pred(self.bm, self.term)
        return self._pred(s, s2)

    # --- conjunction analysis -------------------------------------------

    def _analyse(self):
        """Split a conjunction into left filters, right filters, forced right
        fields, and residual pair filters.  Returns None if the term is not a
        conjunction of supported atoms over a structured space."""
        space = self.bm.space
        if not (space.vars or space.arrays):
            return None
        atoms = self.term.args if isinstance(self.term, BAnd) else (self.term,)
        left_f, right_f, pair_f, forced = [], [], [], {}
        constraints: list[tuple] = []  # (field, cmp, lvals): per-field ranges
        for a in atoms:
            if isinstance(a, BOne):
                continue
            if isinstance(a, BZero):
                return ([], [], [], None, [])  # empty relation
            if isinstance(a, BEmbLTest):
                left_f.append(a.test)
            elif isinstance(a, BEmbRTest):
                right_f.append(a.test)
            elif isinstance(a, BPrim):
                sem = self.bm.bitest(a.name)
                if not isinstance(sem, ExprBitest):
                    pair_f.append(a)
                    continue
                field = sem.forced_right_field()
                if field is not None and field[0] not in forced:
                    forced[field[0]] = field[1]
                    continue
                rfield = _single_right_field(space, sem.rexpr)
                if rfield is not None:
                    constraints.append((rfield, sem._cmp, sem.lvals()))
                else:
                    pair_f.append(a)
            elif isinstance(a, (BNot, BOr)):
                pair_f.append(a)
            else:
                return None
        return (left_f, right_f, pair_f, forced, constraints)

    def _masks(self):
        """(left mask, right mask) for the one-sided filter conjuncts."""
        if not hasattr(self, "_mask_cache"):
            left_f, right_f = self._analysis[0], self._analysis[1]
            lm = rm = (1 << self.n) - 1
            for t in left_f:
                lm &= test_mask(self.bm.base, t)
            for t in right_f:
                rm &= test_mask(self.bm.base, t)
            self._mask_cache = (lm, rm)
        return self._mask_cache

    def _pair_preds(self):
        if not hasattr(self, "_pair_pred_cache"):
            self._pair_pred_cache = [compile_pred(self.bm, p)
                                     for p in self._analysis[2]]
        return self._pair_pred_cache

    def _right_candidates(self, s: int) -> list[int]:
        """Right states paired with `s`: forced fields are pinned, compared
        fields enumerate restricted value sets, the rest enumerate freely."""
        left_f, right_f, pair_f, forced, constraints = self._analysis
        space = self.bm.space
        lm, rm = self._masks()
        if not lm >> s & 1:
            return []
        tmpl = 0
        for fname, fn in forced.items():
            v = fn(s)
            if v >= (1 << space.width_of(fname)):
                return []
            tmpl = space.set(tmpl, fname, v)
        by_field: dict = {}
        for (field, cmp, lvals) in constraints:
            lv = lvals[s]
            vals = [u for u in range(1 << space.width_of(field)) if cmp(lv, u)]
            if field in by_field:
                by_field[field] = [u for u in by_field[field] if u in set(vals)]
            else:
                by_field[field] = vals
            if not by_field[field]:
                return []
        for fname in list(by_field):
            if fname in forced:  # pinned value must satisfy the constraint
                if space.get(tmpl, fname) not in by_field[fname]:
                    return []
                del by_field[fname]
        all_fields = [v.name for v in space.vars] + [
            (a.name, i) for a in space.arrays for i in range(a.length)]
        free = [f for f in all_fields if f not in forced]
        free_ranges = [by_field.get(f, range(1 << space.width_of(f))) for f in free]
        preds = self._pair_preds()
        sets = space.set
        out = []
        for combo in itertools.product(*free_ranges):
            s2 = tmpl
            for fname, v in zip(free, combo):
                s2 = sets(s2, fname, v)
            if not rm >> s2 & 1:
                continue
            if all(p(s, s2) for p in preds):
                out.append(s2)
        return out

    def pairs(self) -> list[tuple[int, int]]:
        if self._pairs is not None:
            return self._pairs
        out: list[tuple[int, int]] = []
        n = self.n
        if self._analysis is not None:
            if self._analysis[3] is None:  # provably empty
                self._pairs = []
                return self._pairs
            space = self.bm.space
            constrained = set(self._analysis[3]) | {f for (f, _, _) in self._analysis[4]}
            free_bits = sum(space.width_of(f) for f in
                            ([v.name for v in space.vars]
                             + [(a.name, i) for a in space.arrays
                                for i in range(a.length)])
                            if f not in constrained)
            lm, _ = self._masks()
            estimated = lm.bit_count() << free_bits
            if estimated > PAIR_ENUM_CAP:
                raise EnumRefused(
                    f"pair enumeration of ~{estimated} pairs exceeds the cap "
                    f"{PAIR_ENUM_CAP}")
            for s in range(n):
                for s2 in self._right_candidates(s):
                    out.append((s, s2))
            self._pairs = out
            return out
        if n > FULL_PRODUCT_CAP:
            raise EnumRefused(
                f"cannot enumerate an unstructured pair relation over {n} states "
                f"(cap {FULL_PRODUCT_CAP}); express the relation as a conjunction "
                "of one-sided tests and expression equalities")
        for s in range(n):
            for s2 in range(n):
                if self.holds(s, s2):
                    out.append((s, s2))
        self._pairs = out
        return out

    def partners_left(self, s: int) -> list[int]:
        """All s2 with (s, s2) in the relation; computed per left state when
        the conjunction analysis applies, otherwise via the full pair index."""
        if self._analysis is not None:
            if self._analysis[3] is None:
                return []
            if self._left_index is None:
                self._left_index = {}
            got = self._left_index.get(s)
            if got is None:
                got = self._right_candidates(s)
                self._left_index[s] = got
            return got
        if self._left_index is None:
            idx: dict[int, list[int]] = {}
            for a, b in self.pairs():
                idx.setdefault(a, []).append(b)
            self._left_index = idx
        return self._left_index.get(s, [])

    def as_rel(self) -> Rel:
        return Rel.of_pairs(self.n, self.pairs())

    def is_empty(self) -> bool:
        return not self.pairs()

    def render_pair(self, s: int, s2: int) -> str:
        sp = self.bm.space
        return f"left={sp.state_str(s)} right={sp.state_str(s2)}"


def pair_spec(bm: BiModel, term: BiTestTerm) -> PairSpec:
    """Memoized PairSpec per model instance: premise specs recur across a
    proof tree, and enumeration work is the dominant cost."""
    cache = getattr(bm, "_pairspec_cache", None)
    if cache is None:
        cache = {}
        bm._pairspec_cache = cache
    got = cache.get(term)
    if got is None:
        got = PairSpec(bm, term)
        cache[term] = got
    return got
