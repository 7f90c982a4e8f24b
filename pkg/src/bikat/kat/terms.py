"""Term syntax for Kleene algebra with tests.

Tests and actions form two syntactic sorts.  Sums and sequences are n-ary
(flattened); `simplify` additionally sorts and dedupes sums so that terms
can be compared modulo associativity, commutativity and idempotence of +.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union


class KatError(Exception):
    pass


class CapExceeded(KatError):
    """A configured resource cap was exceeded; the operation refuses."""


# --- test terms -------------------------------------------------------------

@dataclass(frozen=True)
class TZero:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class TOne:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class TPrim:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class TNot:
    arg: "TestTerm"

    def __str__(self) -> str:
        return f"!{_paren_test(self.arg)}"


@dataclass(frozen=True)
class TOr:
    args: tuple["TestTerm", ...]

    def __str__(self) -> str:
        return " + ".join(_paren_test(a, in_sum=True) for a in self.args)


@dataclass(frozen=True)
class TAnd:
    args: tuple["TestTerm", ...]

    def __str__(self) -> str:
        return " ; ".join(_paren_test(a) for a in self.args)


TestTerm = Union[TZero, TOne, TPrim, TNot, TOr, TAnd]

T0 = TZero()
T1 = TOne()


def _paren_test(t: TestTerm, in_sum: bool = False) -> str:
    if isinstance(t, TOr):
        return f"({t})"
    if isinstance(t, TAnd) and not in_sum:
        return str(t)
    if isinstance(t, TAnd):
        return f"({t})"
    return str(t)


def tprim(name: str) -> TestTerm:
    return TPrim(name)


def tnot(t: TestTerm) -> TestTerm:
    if isinstance(t, TZero):
        return T1
    if isinstance(t, TOne):
        return T0
    if isinstance(t, TNot):
        return t.arg
    return TNot(t)


def tor(*ts: TestTerm) -> TestTerm:
    flat: list[TestTerm] = []
    for t in ts:
        if isinstance(t, TOr):
            flat.extend(t.args)
        elif isinstance(t, TOne):
            return T1
        elif not isinstance(t, TZero):
            flat.append(t)
    if not flat:
        return T0
    if len(flat) == 1:
        return flat[0]
    return TOr(tuple(flat))


def tand(*ts: TestTerm) -> TestTerm:
    flat: list[TestTerm] = []
    for t in ts:
        if isinstance(t, TAnd):
            flat.extend(t.args)
        elif isinstance(t, TZero):
            return T0
        elif not isinstance(t, TOne):
            flat.append(t)
    if not flat:
        return T1
    if len(flat) == 1:
        return flat[0]
    return TAnd(tuple(flat))


# --- KAT terms ---------------------------------------------------------------

@dataclass(frozen=True)
class KTest:
    test: TestTerm

    def __str__(self) -> str:
        if isinstance(self.test, (TPrim, TZero, TOne)):
            return str(self.test)
        return f"({self.test})" if isinstance(self.test, (TOr, TAnd)) else str(self.test)


@dataclass(frozen=True)
class KAct:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class KPlus:
    args: tuple["KatTerm", ...]

    def __str__(self) -> str:
        return " + ".join(_paren_kat(a, 0) for a in self.args)


@dataclass(frozen=True)
class KSeq:
    args: tuple["KatTerm", ...]

    def __str__(self) -> str:
        return " ; ".join(_paren_kat(a, 1) for a in self.args)


@dataclass(frozen=True)
class KStar:
    arg: "KatTerm"

    def __str__(self) -> str:
        return f"{_paren_kat(self.arg, 2)}*"


KatTerm = Union[KTest, KAct, KPlus, KSeq, KStar]

K0 = KTest(T0)
K1 = KTest(T1)


def _paren_kat(t: KatTerm, level: int) -> str:
    # level: 0 inside +, 1 inside ;, 2 under *
    mine = 0 if isinstance(t, KPlus) else 1 if isinstance(t, KSeq) else 2
    s = str(t)
    return f"({s})" if mine < max(level, 1) or (level == 2 and mine < 2) else s


def ktest(t: TestTerm) -> KatTerm:
    return KTest(t)


def kact(name: str) -> KatTerm:
    return KAct(name)


def is_zero(t: KatTerm) -> bool:
    return isinstance(t, KTest) and isinstance(t.test, TZero)


def is_one(t: KatTerm) -> bool:
    return isinstance(t, KTest) and isinstance(t.test, TOne)


def kplus(*ts: KatTerm) -> KatTerm:
    flat: list[KatTerm] = []
    for t in ts:
        if isinstance(t, KPlus):
            flat.extend(t.args)
        elif not is_zero(t):
            flat.append(t)
    if not flat:
        return K0
    if len(flat) == 1:
        return flat[0]
    return KPlus(tuple(flat))


def kseq(*ts: KatTerm) -> KatTerm:
    flat: list[KatTerm] = []
    for t in ts:
        if isinstance(t, KSeq):
            flat.extend(t.args)
        elif is_zero(t):
            return K0
        elif not is_one(t):
            flat.append(t)
    if not flat:
        return K1
    if len(flat) == 1:
        return flat[0]
    return KSeq(tuple(flat))


def kstar(t: KatTerm) -> KatTerm:
    if is_zero(t) or is_one(t):
        return K1
    if isinstance(t, KStar):
        return t
    return KStar(t)


# --- canonical ordering and simplification -----------------------------------

_TEST_RANK = {TZero: 0, TOne: 1, TPrim: 2, TNot: 3, TAnd: 4, TOr: 5}
_KAT_RANK = {KTest: 0, KAct: 1, KStar: 2, KSeq: 3, KPlus: 4}


def _test_key(t: TestTerm):
    r = _TEST_RANK[type(t)]
    if isinstance(t, TPrim):
        return (r, t.name)
    if isinstance(t, TNot):
        return (r, _test_key(t.arg))
    if isinstance(t, (TOr, TAnd)):
        return (r, tuple(_test_key(a) for a in t.args))
    return (r,)


def term_key(t: KatTerm):
    r = _KAT_RANK[type(t)]
    if isinstance(t, KTest):
        return (r, _test_key(t.test))
    if isinstance(t, KAct):
        return (r, t.name)
    if isinstance(t, KStar):
        return (r, term_key(t.arg))
    return (r, tuple(term_key(a) for a in t.args))


def simplify_test(t: TestTerm) -> TestTerm:
    """Boolean units, double negation, flat sorted deduped /\\ and \\/."""
    if isinstance(t, (TZero, TOne, TPrim)):
        return t
    if isinstance(t, TNot):
        return tnot(simplify_test(t.arg))
    args = [simplify_test(a) for a in t.args]
    mk = tor if isinstance(t, TOr) else tand
    flat = mk(*args)
    if not isinstance(flat, (TOr, TAnd)):
        return flat
    uniq = sorted(set(flat.args), key=_test_key)
    return type(flat)(tuple(uniq)) if len(uniq) > 1 else uniq[0]


@lru_cache(maxsize=200_000)
def simplify(t: KatTerm) -> KatTerm:
    """Canonical form: flattened, 0/1 units applied, sums sorted and deduped.

    Denotationally equal to the input in every KAT.
    """
    if isinstance(t, KTest):
        return KTest(simplify_test(t.test))
    if isinstance(t, KAct):
        return t
    if isinstance(t, KStar):
        return kstar(simplify(t.arg))
    if isinstance(t, KSeq):
        return kseq(*[simplify(a) for a in t.args])
    flat = kplus(*[simplify(a) for a in t.args])
    if not isinstance(flat, KPlus):
        return flat
    uniq = sorted(set(flat.args), key=term_key)
    return KPlus(tuple(uniq)) if len(uniq) > 1 else uniq[0]


# --- alphabets ---------------------------------------------------------------

TEST_CAP = 10
ACTION_CAP = 16


@dataclass(frozen=True)
class Alphabet:
    """Declared primitive tests and actions, in canonical order."""

    tests: tuple[str, ...]
    actions: tuple[str, ...]

    def __post_init__(self):
        if len(self.tests) > TEST_CAP:
            raise CapExceeded(
                f"{len(self.tests)} primitive tests exceed the cap of {TEST_CAP} "
                f"(atom count doubles per test)")
        if len(self.actions) > ACTION_CAP:
            raise CapExceeded(
                f"{len(self.actions)} actions exceed the cap of {ACTION_CAP}")

    @staticmethod
    def make(tests: Iterable[str], actions: Iterable[str]) -> "Alphabet":
        return Alphabet(tuple(sorted(set(tests))), tuple(sorted(set(actions))))

    def union(self, other: "Alphabet") -> "Alphabet":
        return Alphabet.make(self.tests + other.tests, self.actions + other.actions)


def test_prims(t: TestTerm) -> set[str]:
    if isinstance(t, TPrim):
        return {t.name}
    if isinstance(t, TNot):
        return test_prims(t.arg)
    if isinstance(t, (TOr, TAnd)):
        out: set[str] = set()
        for a in t.args:
            out |= test_prims(a)
        return out
    return set()


def term_alphabet(t: KatTerm) -> Alphabet:
    tests: set[str] = set()
    actions: set[str] = set()

    def walk(u: KatTerm) -> None:
        if isinstance(u, KTest):
            tests.update(test_prims(u.test))
        elif isinstance(u, KAct):
            actions.add(u.name)
        elif isinstance(u, KStar):
            walk(u.arg)
        else:
            for a in u.args:
                walk(a)

    walk(t)
    return Alphabet.make(tests, actions)


def terms_alphabet(ts: Iterable[KatTerm]) -> Alphabet:
    out = Alphabet.make((), ())
    for t in ts:
        out = out.union(term_alphabet(t))
    return out
