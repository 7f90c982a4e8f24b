"""A small imperative language over fixed-width integers and arrays.

Arithmetic wraps at the problem width (unsigned, modulo 2^width); stores
additionally wrap at the target's declared width.  Array indices wrap at the
array length.  `x := any` is nondeterministic choice over the variable's
range.  Programs compile to KAT terms whose primitive actions are the
assignment statements and whose primitive tests are the branch conditions,
each bound to its exact interpretation; a direct set-valued interpreter
provides an independent semantics for cross-checking.  Loops that fail to
terminate from a state simply contribute no final state there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from ..kat.terms import KatTerm, kact, kplus, kseq, kstar, ktest, tnot, tprim
from .kmodel import FnAction, KatModel, TestSem
from .space import ArrayDecl, SpaceError, StateSpace, VarDecl


# --- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class EConst:
    value: int


@dataclass(frozen=True)
class EVar:
    name: str


@dataclass(frozen=True)
class EArr:
    name: str
    index: "Expr"


@dataclass(frozen=True)
class EBin:
    op: str  # + - * %
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class ECall:
    fn: str  # min, max, or a declared table function
    args: tuple["Expr", ...]


Expr = Union[EConst, EVar, EArr, EBin, ECall]


@dataclass(frozen=True)
class BCmp:
    op: str  # == != < <= > >=
    left: Expr
    right: Expr


@dataclass(frozen=True)
class BNotE:
    arg: "BoolExpr"


@dataclass(frozen=True)
class BAndE:
    args: tuple["BoolExpr", ...]


@dataclass(frozen=True)
class BOrE:
    args: tuple["BoolExpr", ...]


@dataclass(frozen=True)
class BConst:
    value: bool


BoolExpr = Union[BCmp, BNotE, BAndE, BOrE, BConst]


# --- statements ----------------------------------------------------------------

@dataclass(frozen=True)
class SSkip:
    pass


@dataclass(frozen=True)
class SAssign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class SHavoc:
    var: str


@dataclass(frozen=True)
class SArrAssign:
    name: str
    index: Expr
    value: Expr


@dataclass(frozen=True)
class SIf:
    cond: BoolExpr
    then: tuple["Stmt", ...]
    els: tuple["Stmt", ...]


@dataclass(frozen=True)
class SWhile:
    cond: BoolExpr
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class SAssume:
    cond: BoolExpr


Stmt = Union[SSkip, SAssign, SHavoc, SArrAssign, SIf, SWhile, SAssume]
Program = tuple[Stmt, ...]


# --- printing (canonical forms double as primitive symbol names) -------------

_PREC = {"+": 1, "-": 1, "*": 2, "%": 2}


def expr_str(e: Expr, prec: int = 0) -> str:
    if isinstance(e, EConst):
        return str(e.value)
    if isinstance(e, EVar):
        return e.name
    if isinstance(e, EArr):
        return f"{e.name}[{expr_str(e.index)}]"
    if isinstance(e, ECall):
        return f"{e.fn}({', '.join(expr_str(a) for a in e.args)})"
    p = _PREC[e.op]
    s = f"{expr_str(e.left, p)} {e.op} {expr_str(e.right, p + 1)}"
    return f"({s})" if p < prec else s


def bool_str(b: BoolExpr, prec: int = 0) -> str:
    if isinstance(b, BConst):
        return "true" if b.value else "false"
    if isinstance(b, BCmp):
        s = f"{expr_str(b.left)} {b.op} {expr_str(b.right)}"
        return f"({s})" if prec > 2 else s
    if isinstance(b, BNotE):
        return f"!{bool_str(b.arg, 3)}"
    if isinstance(b, BAndE):
        s = " && ".join(bool_str(a, 2) for a in b.args)
        return f"({s})" if prec > 1 else s
    s = " || ".join(bool_str(a, 1) for a in b.args)
    return f"({s})" if prec > 0 else s


def stmt_str(s: Stmt) -> str:
    if isinstance(s, SSkip):
        return "skip"
    if isinstance(s, SAssign):
        return f"{s.var} := {expr_str(s.expr)}"
    if isinstance(s, SHavoc):
        return f"{s.var} := any"
    if isinstance(s, SArrAssign):
        return f"{s.name}[{expr_str(s.index)}] := {expr_str(s.value)}"
    if isinstance(s, SAssume):
        return f"assume({bool_str(s.cond)})"
    if isinstance(s, SIf):
        els = f" else {{ {block_str(s.els)} }}" if s.els else ""
        return f"if ({bool_str(s.cond)}) {{ {block_str(s.then)} }}{els}"
    return f"while ({bool_str(s.cond)}) {{ {block_str(s.body)} }}"


def block_str(stmts: Iterable[Stmt]) -> str:
    return " ".join(stmt_str(s) + ";" for s in stmts)


# --- evaluation ----------------------------------------------------------------

class ImpEnv:
    """Shared evaluation context: state space, arithmetic width, function
    tables, and the registries binding compiled primitives to semantics."""

    def __init__(self, space: StateSpace, width: int,
                 ftables: dict[str, tuple[int, ...]] | None = None):
        self.space = space
        self.width = width
        self.mask = (1 << width) - 1
        self.ftables = dict(ftables or {})
        self.acts: dict[str, FnAction] = {}
        self.tests: dict[str, TestSem] = {}

    # expression / condition evaluation ---------------------------------

    def eval(self, e: Expr, state: int) -> int:
        if isinstance(e, EConst):
            return e.value & self.mask
        if isinstance(e, EVar):
            if not self.space.has_field(e.name):
                raise SpaceError(f"undeclared variable {e.name!r}")
            return self.space.get(state, e.name)
        if isinstance(e, EArr):
            decl = self.space.array_decl(e.name)
            if decl is None:
                raise SpaceError(f"undeclared array {e.name!r}")
            i = self.eval(e.index, state) % decl.length
            return self.space.get(state, (e.name, i))
        if isinstance(e, ECall):
            args = [self.eval(a, state) for a in e.args]
            if e.fn == "min":
                return min(args)
            if e.fn == "max":
                return max(args)
            table = self.ftables.get(e.fn)
            if table is None:
                raise SpaceError(f"unknown function {e.fn!r} (no table declared)")
            return table[args[0] % len(table)] & self.mask
        a, b = self.eval(e.left, state), self.eval(e.right, state)
        if e.op == "+":
            return (a + b) & self.mask
        if e.op == "-":
            return (a - b) & self.mask
        if e.op == "*":
            return (a * b) & self.mask
        return a % b if b else a  # x % 0 = x, keeping % total

    def holds(self, b: BoolExpr, state: int) -> bool:
        if isinstance(b, BConst):
            return b.value
        if isinstance(b, BCmp):
            x, y = self.eval(b.left, state), self.eval(b.right, state)
            return {"==": x == y, "!=": x != y, "<": x < y,
                    "<=": x <= y, ">": x > y, ">=": x >= y}[b.op]
        if isinstance(b, BNotE):
            return not self.holds(b.arg, state)
        if isinstance(b, BAndE):
            return all(self.holds(a, state) for a in b.args)
        return any(self.holds(a, state) for a in b.args)

    # direct set-valued interpreter --------------------------------------

    def step(self, s: Stmt, state: int) -> frozenset[int]:
        if isinstance(s, SSkip):
            return frozenset((state,))
        if isinstance(s, SAssign):
            return frozenset((self.space.set(state, s.var, self.eval(s.expr, state)),))
        if isinstance(s, SHavoc):
            w = self.space.width_of(s.var)
            return frozenset(self.space.set(state, s.var, v) for v in range(1 << w))
        if isinstance(s, SArrAssign):
            decl = self.space.array_decl(s.name)
            i = self.eval(s.index, state) % decl.length
            return frozenset(
                (self.space.set(state, (s.name, i), self.eval(s.value, state)),))
        if isinstance(s, SAssume):
            return frozenset((state,)) if self.holds(s.cond, state) else frozenset()
        if isinstance(s, SIf):
            branch = s.then if self.holds(s.cond, state) else s.els
            return self.run(branch, frozenset((state,)))
        # while: reach the loop head closure, exit where the guard fails
        head = {state}
        frontier = {state}
        while frontier:
            nxt: set[int] = set()
            for st in frontier:
                if self.holds(s.cond, st):
                    nxt |= self.run(s.body, frozenset((st,)))
            nxt -= head
            head |= nxt
            frontier = nxt
        return frozenset(st for st in head if not self.holds(s.cond, st))

    def run(self, stmts: Iterable[Stmt], states: frozenset[int]) -> frozenset[int]:
        cur = states
        for s in stmts:
            out: set[int] = set()
            for st in cur:
                out |= self.step(s, st)
            cur = frozenset(out)
            if not cur:
                break
        return cur

    # compilation to KAT --------------------------------------------------

    def compile_bool(self, b: BoolExpr):
        name = bool_str(b)
        if name not in self.tests:
            self.tests[name] = TestSem(self.space, pred=lambda st, bb=b: self.holds(bb, st))
        return tprim(name)

    def _register_act(self, s: Stmt) -> KatTerm:
        name = stmt_str(s)
        if name not in self.acts:
            self.acts[name] = FnAction(self.space, lambda st, ss=s: self.step(ss, st))
        return kact(name)

    def compile_stmt(self, s: Stmt) -> KatTerm:
        if isinstance(s, SSkip):
            return kseq()  # the unit
        if isinstance(s, (SAssign, SHavoc, SArrAssign)):
            return self._register_act(s)
        if isinstance(s, SAssume):
            return ktest(self.compile_bool(s.cond))
        if isinstance(s, SIf):
            e = self.compile_bool(s.cond)
            return kplus(kseq(ktest(e), self.compile_block(s.then)),
                         kseq(ktest(tnot(e)), self.compile_block(s.els)))
        e = self.compile_bool(s.cond)
        return kseq(kstar(kseq(ktest(e), self.compile_block(s.body))),
                    ktest(tnot(e)))

    def compile_block(self, stmts: Iterable[Stmt]) -> KatTerm:
        return kseq(*[self.compile_stmt(s) for s in stmts])

    def kat_model(self, meta: dict | None = None) -> KatModel:
        return KatModel(self.space, dict(self.acts), dict(self.tests), meta or {})


def compile_imp(program: Program, env: ImpEnv) -> KatTerm:
    """Translate a program to a KAT term, binding primitives in `env`:
    assignments become actions with their exact relational semantics,
    conditions become tests with their exact state subsets."""
    return env.compile_block(program)


def subst_expr(e: Expr, var: str, repl: Expr) -> Expr:
    if isinstance(e, EConst):
        return e
    if isinstance(e, EVar):
        return repl if e.name == var else e
    if isinstance(e, EArr):
        return EArr(e.name, subst_expr(e.index, var, repl))
    if isinstance(e, ECall):
        return ECall(e.fn, tuple(subst_expr(a, var, repl) for a in e.args))
    return EBin(e.op, subst_expr(e.left, var, repl), subst_expr(e.right, var, repl))


def subst_bool(b: BoolExpr, var: str, repl: Expr) -> BoolExpr:
    if isinstance(b, BConst):
        return b
    if isinstance(b, BCmp):
        return BCmp(b.op, subst_expr(b.left, var, repl), subst_expr(b.right, var, repl))
    if isinstance(b, BNotE):
        return BNotE(subst_bool(b.arg, var, repl))
    if isinstance(b, BAndE):
        return BAndE(tuple(subst_bool(a, var, repl) for a in b.args))
    return BOrE(tuple(subst_bool(a, var, repl) for a in b.args))
