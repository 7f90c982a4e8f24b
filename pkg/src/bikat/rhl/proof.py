"""Proof checker for the three relational rule systems.

Proof trees are explicit data: each node names a rule, carries the rule's
annotations (invariants, alignment selectors, variant, split points,
hypothesis names), and lists its premise subtrees.  The checker derives every
premise judgment from the node's conclusion per the rule schema, discharges
side conditions semantically (or against a named hypothesis), and at the root
re-verifies the conclusion with the judgment oracle.  A failing node reports
its path and reason.

Rule inventory:

  forall-forall: dSeq dIf dWh caWh rDisj rConseq SeqSk dAss dPrim dCall selfComp
  forward sim:   eSeq eIf eWh eWhL eWhR eHav enAss eDisj eConseq eAss ePrim eCall
  backward sim:  bSeq bIf bWh bnAss bConseq bDisj bPrim bCall

dPrim/ePrim/bPrim discharge a subjudgment directly by the oracle; dCall-
style leaves discharge against a declared relational hypothesis, the way
procedure-call specs are axiomatized.  bIf and bWh need no guard-agreement
side condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..bi.terms import (BAnd, BEmbLTest, BEmbRTest, BiTestTerm, BOne, BOr,
                        BPrim, band, bnot, bor, simplify_bitest)
from ..judge.core import (ExprBitest, Judgment, PairSpec, PostMap,
                          RelSpec, pair_spec, post_map)
from ..judge.oracles import JudgeResult, dispatch
from ..models.imp import (BoolExpr, EVar, ImpEnv, Program, SAssign, SHavoc,
                          SIf, SSkip, SWhile, Stmt, bool_str, expr_str,
                          stmt_str, subst_expr)
from ..models.bmodel import BiModel, bitest_holds
from ..models.kmodel import test_holds


@dataclass(frozen=True)
class RhlJudgment:
    kind: str  # "allall" | "fsim" | "bsim"
    left: Program
    right: Program
    pre: BiTestTerm
    post: BiTestTerm

    def describe(self) -> str:
        arrow = {"allall": "=>>", "fsim": "=E>", "bsim": "<E="}[self.kind]
        lp = " ".join(stmt_str(s) + ";" for s in self.left) or "skip"
        rp = " ".join(stmt_str(s) + ";" for s in self.right) or "skip"
        return f"{lp} | {rp} : {self.pre} {arrow} {self.post}"


@dataclass(frozen=True)
class RelHypothesis:
    """A declared relational spec, usable to discharge call-style leaves."""

    name: str
    judgment: RhlJudgment


@dataclass(frozen=True)
class ImplicationHypothesis:
    """A declared bitest implication, usable to discharge side conditions."""

    name: str
    lhs: BiTestTerm
    rhs: BiTestTerm


@dataclass(frozen=True)
class SideCondition:
    shape: str  # implication | domain-totality | variant-decrease
    description: str
    lhs: BiTestTerm | None = None
    rhs: BiTestTerm | None = None
    payload: tuple = ()
    discharge: str = "oracle"  # or "hypothesis:<name>"


@dataclass(frozen=True)
class ProofTree:
    rule: str
    ann: dict = field(default_factory=dict)
    premises: tuple["ProofTree", ...] = ()


@dataclass
class NodeReport:
    path: tuple[int, ...]
    rule: str
    judgment: str
    ok: bool
    message: str = ""


@dataclass
class ProofResult:
    accepted: bool
    reports: list[NodeReport]
    root_oracle: JudgeResult | None = None

    def first_failure(self) -> NodeReport | None:
        for r in self.reports:
            if not r.ok:
                return r
        return None


@dataclass
class RhlContext:
    env: ImpEnv
    bm: BiModel
    rel_hyps: dict[str, RelHypothesis] = field(default_factory=dict)
    impl_hyps: dict[str, ImplicationHypothesis] = field(default_factory=dict)

    def compile(self, prog: Program):
        return self.env.compile_block(prog)

    def oracle(self, rj: RhlJudgment) -> JudgeResult:
        j = Judgment(rj.kind, self.compile(rj.left), self.compile(rj.right),
                     RelSpec(rj.pre, rj.post))
        return dispatch(self.bm, j)

    def side_test(self, side: str, b: BoolExpr) -> BiTestTerm:
        prim = self.env.compile_bool(b)
        return BEmbLTest(prim) if side == "L" else BEmbRTest(prim)

    def guards_agree(self, e: BoolExpr, e2: BoolExpr) -> BiTestTerm:
        le, re = self.side_test("L", e), self.side_test("R", e2)
        return bor(band(le, re), band(bnot(le), bnot(re)))


def _bt_eq(a: BiTestTerm, b: BiTestTerm) -> bool:
    return simplify_bitest(a) == simplify_bitest(b)


def _strip_skips(p: Program) -> Program:
    return tuple(s for s in p if not isinstance(s, SSkip))


def _is_skip(p: Program) -> bool:
    return not _strip_skips(p)


def check_implication(ctx: RhlContext, lhs: BiTestTerm, rhs: BiTestTerm):
    """All pairs satisfying lhs satisfy rhs; counterexample pair otherwise."""
    from ..judge.core import compile_pred
    spec = pair_spec(ctx.bm, lhs)
    pred = compile_pred(ctx.bm, rhs)
    for (a, b) in spec.pairs():
        if not pred(a, b):
            return (a, b)
    return None


def discharge_side_condition(ctx: RhlContext, sc: SideCondition) -> tuple[bool, str]:
    if sc.discharge.startswith("hypothesis:"):
        name = sc.discharge.split(":", 1)[1]
        hyp = ctx.impl_hyps.get(name)
        if hyp is None:
            return False, f"unknown hypothesis {name!r}"
        if sc.shape != "implication":
            return False, f"hypothesis discharge only applies to implications, not {sc.shape}"
        if _bt_eq(hyp.lhs, sc.lhs) and _bt_eq(hyp.rhs, sc.rhs):
            return True, f"by hypothesis {name}"
        return False, f"hypothesis {name} states a different implication"

    if sc.shape == "implication":
        cex = check_implication(ctx, sc.lhs, sc.rhs)
        if cex is None:
            return True, "by oracle"
        sp = ctx.bm.space
        return False, (f"{sc.description}: fails at left={sp.state_str(cex[0])} "
                       f"right={sp.state_str(cex[1])}")

    if sc.shape == "domain-totality":
        post_spec, havoc_var = sc.payload
        sp = ctx.bm.space
        spec = pair_spec(ctx.bm, post_spec)
        if havoc_var is None:
            # full-state nondeterminism on the right: need a partner per left state
            lefts = {a for (a, _) in spec.pairs()}
            for s in range(sp.size):
                if s not in lefts:
                    return False, (f"{sc.description}: no partner for "
                                   f"left={sp.state_str(s)}")
            return True, "by oracle"
        width = sp.width_of(havoc_var)
        for s in range(sp.size):
            for s2 in range(sp.size):
                if not any(bitest_holds(ctx.bm, post_spec, s, sp.set(s2, havoc_var, v))
                           for v in range(1 << width)):
                    return False, (f"{sc.description}: no witnessing value of "
                                   f"{havoc_var} for left={sp.state_str(s)} "
                                   f"right={sp.state_str(s2)}")
        return True, "by oracle"

    if sc.shape == "variant-decrease":
        inv, guard2, body2, variant = sc.payload
        spec = pair_spec(ctx.bm, band(inv, guard2))
        post = post_map(ctx.bm.base, ctx.compile(body2))
        for (a, b) in spec.pairs():
            bound = ctx.env.eval(variant, b)
            if not any(bitest_holds(ctx.bm, inv, a, t2) and ctx.env.eval(variant, t2) < bound
                       for t2 in post[b]):
                sp = ctx.bm.space
                return False, (f"{sc.description}: no decreasing right iteration from "
                               f"left={sp.state_str(a)} right={sp.state_str(b)}")
        return True, "by oracle"

    return False, f"unknown side-condition shape {sc.shape!r}"


# --- rule schemas -----------------------------------------------------------

_FAMILY = {"d": "allall", "r": "allall", "s": "allall", "e": "fsim", "b": "bsim"}

_DIAGONAL_SEQ = {"dseq": "allall", "eseq": "fsim", "bseq": "bsim"}
_DIAGONAL_IF = {"dif": "allall", "eif": "fsim", "bif": "bsim"}
_DIAGONAL_WH = {"dwh": "allall", "ewh": "fsim", "bwh": "bsim"}
_CONSEQ = {"rconseq": "allall", "econseq": "fsim", "bconseq": "bsim"}
_DISJ = {"rdisj": "allall", "edisj": "fsim", "bdisj": "bsim"}
_PRIM = {"dprim": "allall", "eprim": "fsim", "bprim": "bsim"}
_CALL = {"dcall": "allall", "ecall": "fsim", "bcall": "bsim"}
_ASS = {"dass": "allall", "eass": "fsim"}
_NASS = {"enass": "fsim", "bnass": "bsim"}


class SchemaError(Exception):
    pass


def _expect_kind(rule: str, expected: str, rj: RhlJudgment):
    if rj.kind != expected:
        raise SchemaError(f"{rule} applies to {expected} judgments, not {rj.kind}")


def _single(p: Program, cls, what: str):
    p = _strip_skips(p)
    if len(p) != 1 or not isinstance(p[0], cls):
        raise SchemaError(f"expected a single {what}, found: "
                          + (" ".join(stmt_str(s) for s in p) or "skip"))
    return p[0]


def _split(p: Program, k: int, what: str) -> tuple[Program, Program]:
    if not 0 < k < len(p):
        raise SchemaError(f"{what} split index {k} out of range for {len(p)} statements")
    return p[:k], p[k:]


def premise_judgments(
    ctx: RhlContext, rule: str, ann: dict, rj: RhlJudgment
) -> tuple[list[RhlJudgment], list[SideCondition]]:
    """Instantiate the rule schema at this conclusion: the derived premise
    judgments, in order, plus the side conditions to discharge."""
    r = rule.lower()
    side_discharge = ann.get("side", "oracle")

    if r in _DIAGONAL_SEQ:
        _expect_kind(rule, _DIAGONAL_SEQ[r], rj)
        mid = ann["mid"]
        lk = int(ann.get("lsplit", 1))
        rk = int(ann.get("rsplit", 1))
        l1, l2 = _split(rj.left, lk, "left")
        r1, r2 = _split(rj.right, rk, "right")
        return ([RhlJudgment(rj.kind, l1, r1, rj.pre, mid),
                 RhlJudgment(rj.kind, l2, r2, mid, rj.post)], [])

    if r == "seqsk":
        _expect_kind(rule, "allall", rj)
        if not _is_skip(rj.right):
            raise SchemaError("SeqSk requires a skip right program")
        mid = ann["mid"]
        lk = int(ann.get("lsplit", 1))
        l1, l2 = _split(rj.left, lk, "left")
        return ([RhlJudgment(rj.kind, l1, (), rj.pre, mid),
                 RhlJudgment(rj.kind, l2, (), mid, rj.post)], [])

    if r in _DIAGONAL_IF:
        _expect_kind(rule, _DIAGONAL_IF[r], rj)
        si = _single(rj.left, SIf, "if statement")
        si2 = _single(rj.right, SIf, "if statement")
        le, re = ctx.side_test("L", si.cond), ctx.side_test("R", si2.cond)
        prems = [
            RhlJudgment(rj.kind, si.then, si2.then,
                        band(rj.pre, le, re), rj.post),
            RhlJudgment(rj.kind, si.els, si2.els,
                        band(rj.pre, bnot(le), bnot(re)), rj.post),
        ]
        sides = []
        if r != "bif":  # backward conditionals need no guard agreement
            sides.append(SideCondition(
                "implication",
                f"pre implies guard agreement ({bool_str(si.cond)} vs {bool_str(si2.cond)})",
                lhs=rj.pre, rhs=ctx.guards_agree(si.cond, si2.cond),
                discharge=side_discharge))
        return prems, sides

    if r in _DIAGONAL_WH:
        _expect_kind(rule, _DIAGONAL_WH[r], rj)
        w = _single(rj.left, SWhile, "while loop")
        w2 = _single(rj.right, SWhile, "while loop")
        inv = ann["inv"]
        le, re = ctx.side_test("L", w.cond), ctx.side_test("R", w2.cond)
        if not _bt_eq(rj.pre, inv):
            raise SchemaError(f"loop rule needs pre = invariant; pre is {rj.pre}, "
                              f"invariant is {inv}")
        want_post = band(inv, bnot(le), bnot(re))
        if not _bt_eq(rj.post, want_post):
            raise SchemaError(f"loop rule concludes post {want_post}, node says {rj.post}")
        prems = [RhlJudgment(rj.kind, w.body, w2.body, band(inv, le, re), inv)]
        sides = []
        if r != "bwh":  # backward loops need no guard agreement
            sides.append(SideCondition(
                "implication", "invariant implies guard agreement",
                lhs=inv, rhs=ctx.guards_agree(w.cond, w2.cond),
                discharge=side_discharge))
        return prems, sides

    if r == "cawh":
        _expect_kind(rule, "allall", rj)
        w = _single(rj.left, SWhile, "while loop")
        w2 = _single(rj.right, SWhile, "while loop")
        inv, q, rr = ann["inv"], ann["q"], ann["r"]
        le, re = ctx.side_test("L", w.cond), ctx.side_test("R", w2.cond)
        if not _bt_eq(rj.pre, inv):
            raise SchemaError("conditionally aligned loop rule needs pre = invariant")
        if not _bt_eq(rj.post, band(inv, bnot(le), bnot(re))):
            raise SchemaError("conditionally aligned loop rule concludes "
                              "invariant and both guards false")
        prems = [
            RhlJudgment("allall", w.body, w2.body,
                        band(inv, le, re, bnot(q), bnot(rr)), inv),
            RhlJudgment("allall", w.body, (), band(inv, q, le), inv),
            RhlJudgment("allall", (), w2.body, band(inv, rr, re), inv),
        ]
        sides = [SideCondition(
            "implication",
            "invariant implies guard agreement or an enabled one-sided selector",
            lhs=inv,
            rhs=bor(ctx.guards_agree(w.cond, w2.cond), band(q, le), band(rr, re)),
            discharge=side_discharge)]
        return prems, sides

    if r == "ewhl":
        _expect_kind(rule, "fsim", rj)
        w = _single(rj.left, SWhile, "while loop")
        w2 = _single(rj.right, SWhile, "while loop")
        inv = ann["inv"]
        le, re = ctx.side_test("L", w.cond), ctx.side_test("R", w2.cond)
        if not _bt_eq(rj.pre, inv) or not _bt_eq(rj.post, band(inv, bnot(le), bnot(re))):
            raise SchemaError("left-leading loop rule needs pre = invariant and "
                              "post = invariant with both guards false")
        prems = [
            RhlJudgment("fsim", w.body, w2.body, band(inv, le, re), inv),
            RhlJudgment("fsim", w.body, (), band(inv, le), inv),
        ]
        sides = [SideCondition(
            "implication", "invariant and right guard imply left guard",
            lhs=band(inv, re), rhs=le, discharge=side_discharge)]
        return prems, sides

    if r == "ewhr":
        _expect_kind(rule, "fsim", rj)
        w = _single(rj.left, SWhile, "while loop")
        w2 = _single(rj.right, SWhile, "while loop")
        inv, variant = ann["inv"], ann["variant"]
        le, re = ctx.side_test("L", w.cond), ctx.side_test("R", w2.cond)
        if not _bt_eq(rj.pre, inv) or not _bt_eq(rj.post, band(inv, bnot(le), bnot(re))):
            raise SchemaError("right-variant loop rule needs pre = invariant and "
                              "post = invariant with both guards false")
        prems = [RhlJudgment("fsim", w.body, w2.body, band(inv, le, re), inv)]
        sides = [
            SideCondition(
                "implication", "invariant implies left-done-or-right-enabled",
                lhs=inv, rhs=bor(bnot(le), re), discharge=side_discharge),
            SideCondition(
                "variant-decrease",
                f"right iterations decrease {expr_str(variant)} under the invariant",
                payload=(inv, re, w2.body, variant), discharge="oracle"),
        ]
        return prems, sides

    if r == "ehav":
        _expect_kind(rule, "fsim", rj)
        _expect_full_havoc(ctx, rj.left, "left")
        _expect_full_havoc(ctx, rj.right, "right")
        if not _bt_eq(rj.pre, BOne()):
            raise SchemaError("havoc rule needs precondition true")
        sides = [SideCondition(
            "domain-totality", "post relation is domain-total",
            payload=(rj.post, None), discharge="oracle")]
        return [], sides

    if r in _NASS:
        _expect_kind(rule, _NASS[r], rj)
        h = _single(rj.left, SHavoc, "nondeterministic assignment")
        h2 = _single(rj.right, SHavoc, "nondeterministic assignment")
        if r == "enass":
            if not _bt_eq(rj.pre, BOne()):
                raise SchemaError("nondeterministic assignment rule needs pre = true")
            rel = rj.post
        else:
            if not _bt_eq(rj.post, BOne()):
                raise SchemaError("backward nondeterministic assignment rule "
                                  "needs post = true")
            rel = rj.pre
        sides = [SideCondition(
            "domain-totality",
            f"relation is total in the right-hand {h2.var}",
            payload=(rel, h2.var), discharge="oracle")]
        return [], sides

    if r in _CONSEQ:
        _expect_kind(rule, _CONSEQ[r], rj)
        pre2, post2 = ann["pre"], ann["post"]
        prems = [RhlJudgment(rj.kind, rj.left, rj.right, pre2, post2)]
        if r == "bconseq":  # reversed: weaken the pre, strengthen the post
            sides = [
                SideCondition("implication", "premise pre implies conclusion pre",
                              lhs=pre2, rhs=rj.pre, discharge=side_discharge),
                SideCondition("implication", "conclusion post implies premise post",
                              lhs=rj.post, rhs=post2, discharge=side_discharge),
            ]
        else:
            sides = [
                SideCondition("implication", "conclusion pre implies premise pre",
                              lhs=rj.pre, rhs=pre2, discharge=side_discharge),
                SideCondition("implication", "premise post implies conclusion post",
                              lhs=post2, rhs=rj.post, discharge=side_discharge),
            ]
        return prems, sides

    if r in _DISJ:
        _expect_kind(rule, _DISJ[r], rj)
        a, b = ann["first"], ann["second"]
        if r == "bdisj":
            if not _bt_eq(rj.post, bor(a, b)):
                raise SchemaError("post must be the disjunction of the two cases")
            prems = [RhlJudgment(rj.kind, rj.left, rj.right, rj.pre, a),
                     RhlJudgment(rj.kind, rj.left, rj.right, rj.pre, b)]
        else:
            if not _bt_eq(rj.pre, bor(a, b)):
                raise SchemaError("pre must be the disjunction of the two cases")
            prems = [RhlJudgment(rj.kind, rj.left, rj.right, a, rj.post),
                     RhlJudgment(rj.kind, rj.left, rj.right, b, rj.post)]
        return prems, []

    if r in _ASS:
        _expect_kind(rule, _ASS[r], rj)
        a = _single(rj.left, SAssign, "assignment")
        a2 = _single(rj.right, SAssign, "assignment")
        want = substitute_bitest(ctx, rj.post, a.var, a.expr, a2.var, a2.expr)
        if not _bt_eq(rj.pre, want):
            raise SchemaError(
                f"assignment axiom needs pre = post with substitutions applied: {want}")
        return [], []

    if r in _PRIM:
        _expect_kind(rule, _PRIM[r], rj)
        return [], []

    if r in _CALL:
        _expect_kind(rule, _CALL[r], rj)
        name = ann["hyp"]
        hyp = ctx.rel_hyps.get(name)
        if hyp is None:
            raise SchemaError(f"unknown relational hypothesis {name!r}")
        want = hyp.judgment
        if (want.kind != rj.kind or _strip_skips(want.left) != _strip_skips(rj.left)
                or _strip_skips(want.right) != _strip_skips(rj.right)
                or not _bt_eq(want.pre, rj.pre) or not _bt_eq(want.post, rj.post)):
            raise SchemaError(
                f"conclusion does not match hypothesis {name}: {want.describe()}")
        return [], []

    if r == "selfcomp":
        _expect_kind(rule, "allall", rj)
        return [], []

    raise SchemaError(f"unknown rule {rule!r}")


def _expect_full_havoc(ctx: RhlContext, p: Program, side: str):
    p = _strip_skips(p)
    if not all(isinstance(s, SHavoc) for s in p):
        raise SchemaError(f"havoc rule: {side} program must be nondeterministic "
                          "assignments only")
    havocked = {s.var for s in p}
    declared = {v.name for v in ctx.env.space.vars}
    if havocked != declared or ctx.env.space.arrays:
        raise SchemaError(f"havoc rule: {side} program must assign every "
                          f"declared variable (got {sorted(havocked)}, "
                          f"declared {sorted(declared)})")


def substitute_bitest(ctx: RhlContext, t: BiTestTerm, lv: str, le, rv: str, re) -> BiTestTerm:
    """Substitute assignment expressions into an expression-level bitest:
    left variable in left expressions, right variable in right expressions.
    Only expression-agreement conjunctions are substitution-closed."""
    if isinstance(t, (BOne,)):
        return t
    if isinstance(t, BAnd):
        return band(*[substitute_bitest(ctx, a, lv, le, rv, re) for a in t.args])
    if isinstance(t, BPrim):
        sem = ctx.bm.bitest(t.name)
        if not isinstance(sem, ExprBitest):
            raise SchemaError(
                f"assignment axiom needs expression bitests; {t.name} is opaque")
        return rel_bitest_term(ctx, subst_expr(sem.lexpr, lv, le), sem.op,
                               subst_expr(sem.rexpr, rv, re))
    if isinstance(t, BEmbLTest) or isinstance(t, BEmbRTest):
        raise SchemaError("assignment axiom: one-sided tests are not "
                          "substitution-closed here; use expression bitests")
    raise SchemaError(f"assignment axiom cannot substitute into {t}")


def rel_bitest_term(ctx: RhlContext, lexpr, op: str, rexpr) -> BiTestTerm:
    """Register (or reuse) the expression bitest `lexpr op rexpr`."""
    name = f"{expr_str(lexpr)} {op} {expr_str(rexpr)}"
    if name not in ctx.bm.bitests:
        ctx.bm.bitests[name] = ExprBitest(ctx.env, lexpr, op, rexpr)
    return BPrim(name)


def check_proof(ctx: RhlContext, tree: ProofTree, conclusion: RhlJudgment,
                verify_root: bool = True) -> ProofResult:
    reports: list[NodeReport] = []

    def walk(node: ProofTree, rj: RhlJudgment, path: tuple[int, ...]) -> bool:
        rep = NodeReport(path, node.rule, rj.describe(), True)
        reports.append(rep)
        try:
            prems, sides = premise_judgments(ctx, node.rule, node.ann, rj)
        except SchemaError as e:
            rep.ok, rep.message = False, f"schema: {e}"
            return False
        except KeyError as e:
            rep.ok, rep.message = False, f"missing annotation {e}"
            return False
        for sc in sides:
            ok, msg = discharge_side_condition(ctx, sc)
            if not ok:
                rep.ok, rep.message = False, f"side condition failed: {msg}"
                return False
        r = node.rule.lower()
        if r in _PRIM or r in _ASS or r == "selfcomp":
            if r == "selfcomp":
                from .selfcomp import check_selfcomp
                res = check_selfcomp(ctx, rj)
            else:
                res = ctx.oracle(rj)
            if not res.holds:
                rep.ok = False
                rep.message = (f"oracle refutes the leaf judgment: "
                               f"{res.counterexample.rendered if res.counterexample else ''}")
                return False
            return True
        if len(node.premises) != len(prems):
            rep.ok, rep.message = False, (
                f"rule needs {len(prems)} premises, proof has {len(node.premises)}")
            return False
        for i, (sub, pj) in enumerate(zip(node.premises, prems)):
            if not walk(sub, pj, path + (i,)):
                return False
        return True

    ok = walk(tree, conclusion, ())
    result = ProofResult(ok, reports)
    if ok and verify_root:
        res = ctx.oracle(conclusion)
        result.root_oracle = res
        if not res.holds:
            result.accepted = False
            reports.append(NodeReport(
                (), "(root)", conclusion.describe(), False,
                "accepted by the rules but refuted by the oracle: "
                + (res.counterexample.rendered if res.counterexample else "")))
            return result
    result.accepted = ok
    return result
