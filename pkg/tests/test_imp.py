"""The imperative frontend: parsing, semantics, compilation agreement."""

import itertools
import random

import pytest

from bikat.models import (ImpEnv, SAssign, SHavoc, SIf, SSkip, SWhile,
                          interp_kat, kat_post, compile_imp)
from bikat.models.space import StateSpace, VarDecl, ArrayDecl
from bikat.problem import Cur, load_problem, parse_block, parse_stmts_text
from bikat.rhl import rename_program


def env_for(widths: dict[str, int], width: int = 3, arrays=(), ftables=None):
    space = StateSpace.structured(
        [VarDecl(n, w) for n, w in widths.items()],
        [ArrayDecl(n, l, w) for (n, l, w) in arrays])
    return ImpEnv(space, width, ftables)


class TestParsing:
    def test_statement_forms(self):
        prog = parse_stmts_text(
            "skip; x := 1; y := any; if (x == 1) { y := x; } else { skip; } "
            "while (y != 0) { y := y - 1; } assume(x <= y);")
        kinds = [type(s).__name__ for s in prog]
        assert kinds == ["SSkip", "SAssign", "SHavoc", "SIf", "SWhile", "SAssume"]

    def test_array_and_call_exprs(self):
        prog = parse_stmts_text("a[i] := f(i * 2 + 1); x := min(x, n);")
        assert type(prog[0]).__name__ == "SArrAssign"

    def test_precedence(self):
        env = env_for({"x": 3, "y": 3})
        prog = parse_stmts_text("x := 1 + 2 * 3;")
        st = next(iter(env.run(prog, frozenset((0,)))))
        assert env.space.get(st, "x") == 7


class TestEvaluation:
    def test_wraparound(self):
        env = env_for({"x": 3})
        s = env.space.set(0, "x", 0)
        (t,) = env.run(parse_stmts_text("x := x - 1;"), frozenset((s,)))
        assert env.space.get(t, "x") == 7

    def test_havoc_fanout(self):
        env = env_for({"x": 3})
        outs = env.run(parse_stmts_text("x := any;"), frozenset((0,)))
        assert len(outs) == 8

    def test_assume_filters(self):
        env = env_for({"x": 2})
        outs = env.run(parse_stmts_text("x := any; assume(x >= 2);"), frozenset((0,)))
        assert {env.space.get(s, "x") for s in outs} == {2, 3}

    def test_array_index_wraps(self):
        env = env_for({"i": 3}, arrays=[("a", 4, 2)])
        s0 = env.space.set(0, "i", 5)
        (t,) = env.run(parse_stmts_text("a[i] := 3;"), frozenset((s0,)))
        assert env.space.get(t, ("a", 1)) == 3  # 5 mod 4

    def test_nonterminating_loop_has_no_finals(self):
        env = env_for({"x": 2})
        outs = env.run(parse_stmts_text("x := 1; while (x == 1) { skip; }"),
                       frozenset((0,)))
        assert outs == frozenset()

    def test_ftable(self):
        env = env_for({"x": 3}, ftables={"f": (1, 0, 1, 0, 1, 0, 1, 0)})
        s0 = env.space.set(0, "x", 2)
        (t,) = env.run(parse_stmts_text("x := f(x);"), frozenset((s0,)))
        assert env.space.get(t, "x") == 1


class TestCompilation:
    def test_skip_is_unit(self):
        env = env_for({"x": 2})
        from bikat.kat.terms import K1
        assert compile_imp((SSkip(),), env) == K1

    def test_factorial_shape(self):
        env = env_for({"n": 3, "i": 3, "r": 3})
        prog = parse_stmts_text(
            "i := n; r := 1; while (i != 0) { r := r * i; i := i - 1; }")
        term = compile_imp(prog, env)
        assert len(env.acts) == 4  # i:=n, r:=1, r:=r*i, i:=i-1
        assert len(env.tests) == 1

    def test_compiled_term_agrees_with_interpreter_exhaustively(self):
        env = env_for({"x": 2, "y": 2, "z": 2}, width=2)
        progs = [
            "x := any; if (x <= y) { z := x; } else { z := y; }",
            "while (x != 0) { x := x - 1; y := y + 1; }",
            "z := 0; while (x != 0) { if (y == x) { z := z + 1; } x := x - 1; }",
            "assume(x != y); z := x * y;",
        ]
        for src in progs:
            prog = parse_stmts_text(src)
            term = compile_imp(prog, env)
            for s in range(env.space.size):
                direct = env.run(prog, frozenset((s,)))
                via_term = kat_post(env.kat_model(), term, frozenset((s,)))
                assert direct == via_term, (src, s)

    def test_matrix_and_walk_interpretation_agree(self):
        env = env_for({"x": 2, "y": 2}, width=2)
        prog = parse_stmts_text("x := any; while (x != 0) { x := x - 1; y := y + x; }")
        term = compile_imp(prog, env)
        m = env.kat_model()
        rel = interp_kat(m, term)
        for s in range(env.space.size):
            assert frozenset(rel.succ(s)) == kat_post(m, term, frozenset((s,)))

    def test_havoc_action_counts(self):
        env = env_for({"x": 3, "y": 3})
        prog = parse_stmts_text("x := any;")
        term = compile_imp(prog, env)
        m = env.kat_model()
        rel = interp_kat(m, term)
        assert all(len(list(rel.succ(s))) == 8 for s in range(m.space.size))


class TestRename:
    def test_rename_is_disjoint(self):
        prog = parse_stmts_text(
            "x := y + 1; if (x > 0) { a[x] := 1; } while (x != 0) { x := x - 1; }")
        renamed = rename_program(prog)
        from bikat.models import block_str
        s = block_str(renamed)
        assert "x_r" in s and "y_r" in s and "a_r" in s
        assert " x " not in s.replace("x_r", "")


class TestProblemFiles:
    def test_width_and_declarations(self):
        prob = load_problem(
            "width 2; vars x; var y:3; array a[2]:1;\n"
            "left { x := 0; } right { x := 1; }\n"
            "kind allall; pre { true } post { true }")
        assert prob.env.space.width_of("x") == 2
        assert prob.env.space.width_of("y") == 3
        assert prob.env.space.width_of(("a", 0)) == 1

    def test_ftable_seed_deterministic(self):
        p1 = load_problem("width 3; vars x; ftable f seed 5;\n"
                          "left { x := f(x); } right { x := f(x); }\n"
                          "kind allall; pre { [x == x] } post { [x == x] }")
        p2 = load_problem("width 3; vars x; ftable f seed 5;\n"
                          "left { x := f(x); } right { x := f(x); }\n"
                          "kind allall; pre { [x == x] } post { [x == x] }")
        assert p1.env.ftables["f"] == p2.env.ftables["f"]

    def test_bitest_forms(self):
        prob = load_problem(
            "width 2; vars x y;\nleft { skip; } right { skip; }\n"
            "kind allall;\npre { [x == x] & L[x <= 1] & !R[y > 0] }\n"
            "post { [x + 1 == y] | false }")
        from bikat.judge import PairSpec
        spec = PairSpec(prob.bm, prob.pre)
        for (a, b) in spec.pairs():
            assert prob.env.space.get(a, "x") == prob.env.space.get(b, "x")
            assert prob.env.space.get(a, "x") <= 1
            assert prob.env.space.get(b, "y") == 0
