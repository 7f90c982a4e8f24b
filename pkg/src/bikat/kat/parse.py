"""Parser for the textual KAT term grammar.

    term := sum
    sum  := seq ('+' seq)*
    seq  := star (';' star)*
    star := atom '*'*
    atom := '0' | '1' | ident | '!' atom | '(' term ')'

`;` binds tighter than `+`, postfix `*` tightest.  Identifiers must be
declared up front (`tests p q; actions a b;`); `!` applies to tests only.
"""

from __future__ import annotations

import re

from .terms import (Alphabet, KatTerm, KTest, TestTerm, kact, kplus, kseq,
                    kstar, ktest, tand, tnot, tor, tprim, T0, T1)


class ParseError(Exception):
    def __init__(self, msg: str, pos: int = -1):
        super().__init__(msg if pos < 0 else f"{msg} (at offset {pos})")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_']*)|([01()+;*!])|(\S))")


def tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    for m in _TOKEN.finditer(text):
        if m.group(1):
            out.append(("ident", m.group(1), m.start(1)))
        elif m.group(2):
            out.append(("sym", m.group(2), m.start(2)))
        else:
            raise ParseError(f"unexpected character {m.group(3)!r}", m.start(3))
    return out


class _P:
    def __init__(self, toks, alphabet: Alphabet):
        self.toks = toks
        self.i = 0
        self.alphabet = alphabet

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "", -1)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, val: str):
        kind, v, pos = self.take()
        if v != val:
            raise ParseError(f"expected {val!r}, found {v or 'end of input'!r}", pos)

    def term(self) -> KatTerm:
        parts = [self.seq()]
        while self.peek()[1] == "+":
            self.take()
            parts.append(self.seq())
        return kplus(*parts)

    def seq(self) -> KatTerm:
        parts = [self.star()]
        while self.peek()[1] == ";":
            self.take()
            parts.append(self.star())
        return kseq(*parts)

    def star(self) -> KatTerm:
        t = self.atom()
        while self.peek()[1] == "*":
            self.take()
            t = kstar(t)
        return t

    def atom(self) -> KatTerm:
        kind, v, pos = self.take()
        if v == "0":
            return ktest(T0)
        if v == "1":
            return ktest(T1)
        if v == "(":
            t = self.term()
            self.expect(")")
            return t
        if v == "!":
            inner = self.atom()
            return ktest(tnot(self._as_test(inner, pos)))
        if kind == "ident":
            if v in self.alphabet.tests:
                return ktest(tprim(v))
            if v in self.alphabet.actions:
                return kact(v)
            raise ParseError(f"undeclared identifier {v!r}", pos)
        raise ParseError(f"unexpected token {v!r}", pos)

    @staticmethod
    def _as_test(t: KatTerm, pos: int) -> TestTerm:
        if not isinstance(t, KTest):
            raise ParseError("'!' applies to tests only", pos)
        return t.test

    def test(self) -> TestTerm:
        t = self.term()
        return _test_of(t, self.i)


def _test_of(t: KatTerm, pos: int) -> TestTerm:
    if isinstance(t, KTest):
        return t.test
    from .terms import KPlus, KSeq
    if isinstance(t, KPlus):
        return tor(*[_test_of(a, pos) for a in t.args])
    if isinstance(t, KSeq):
        return tand(*[_test_of(a, pos) for a in t.args])
    raise ParseError("expected a test expression", pos)


def parse_term(text: str, alphabet: Alphabet) -> KatTerm:
    p = _P(tokenize(text), alphabet)
    t = p.term()
    if p.peek()[0] != "eof":
        raise ParseError(f"trailing input {p.peek()[1]!r}", p.peek()[2])
    return t


def parse_test(text: str, alphabet: Alphabet) -> TestTerm:
    p = _P(tokenize(text), alphabet)
    t = p.term()
    if p.peek()[0] != "eof":
        raise ParseError(f"trailing input {p.peek()[1]!r}", p.peek()[2])
    return _test_of(t, 0)


_DECL = re.compile(r"\b(tests|actions)\b([^;]*);")


def parse_declarations(text: str) -> tuple[Alphabet, str]:
    """Strip `tests ...;` / `actions ...;` headers, return alphabet and rest."""
    tests: list[str] = []
    actions: list[str] = []

    def grab(m: re.Match) -> str:
        names = m.group(2).split()
        (tests if m.group(1) == "tests" else actions).extend(names)
        return ""

    rest = _DECL.sub(grab, text)
    return Alphabet.make(tests, actions), rest
