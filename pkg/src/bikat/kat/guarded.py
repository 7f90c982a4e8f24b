"""Guarded strings: the canonical observations of KAT terms.

An atom is a complete boolean valuation of the primitive tests, encoded as a
bitmask over `Alphabet.tests`.  A guarded string alternates atoms and actions,
beginning and ending with an atom; actions are encoded by their index in
`Alphabet.actions`.  Strings are plain tuples `(a0, x1, a1, ..., xk, ak)`.
"""

from __future__ import annotations

from typing import Iterable

from .terms import (Alphabet, CapExceeded, KAct, KatTerm, KPlus, KSeq, KStar,
                    KTest, TAnd, TestTerm, TNot, TOne, TOr, TPrim, TZero)

ATOM_CAP = 10
GS_LEN_CAP = 8


def atoms(alphabet: Alphabet) -> list[int]:
    """All 2^n test valuations, in increasing bitmask order."""
    n = len(alphabet.tests)
    if n > ATOM_CAP:
        raise CapExceeded(
            f"atom enumeration over {n} tests needs 2^{n} valuations; cap is 2^{ATOM_CAP}")
    return list(range(1 << n))


def eval_test(t: TestTerm, atom: int, alphabet: Alphabet) -> bool:
    if isinstance(t, TZero):
        return False
    if isinstance(t, TOne):
        return True
    if isinstance(t, TPrim):
        return bool(atom >> alphabet.tests.index(t.name) & 1)
    if isinstance(t, TNot):
        return not eval_test(t.arg, atom, alphabet)
    if isinstance(t, TOr):
        return any(eval_test(a, atom, alphabet) for a in t.args)
    return all(eval_test(a, atom, alphabet) for a in t.args)


def atom_str(atom: int, alphabet: Alphabet) -> str:
    if not alphabet.tests:
        return "<>"
    bits = [(p if atom >> i & 1 else f"!{p}") for i, p in enumerate(alphabet.tests)]
    return "<" + " ".join(bits) + ">"


def gs_str(gs: tuple, alphabet: Alphabet) -> str:
    parts = []
    for i, x in enumerate(gs):
        parts.append(atom_str(x, alphabet) if i % 2 == 0 else alphabet.actions[x])
    return " ".join(parts)


def gs_actions(gs: tuple) -> int:
    return len(gs) // 2


def _coalesce(x: tuple, y: tuple, max_len: int) -> tuple | None:
    if x[-1] != y[0]:
        return None
    joined = x + y[1:]
    if gs_actions(joined) > max_len:
        return None
    return joined


def enumerate_guarded_strings(
    t: KatTerm, max_len: int, alphabet: Alphabet
) -> set[tuple]:
    """Exactly the guarded strings of `t` with at most `max_len` actions.

    Computed by direct language unfolding; independent of the derivative
    construction, so it serves as an oracle for the decision procedure.
    """
    if max_len > GS_LEN_CAP:
        raise CapExceeded(f"guarded-string length {max_len} exceeds cap {GS_LEN_CAP}")
    alph_atoms = atoms(alphabet)

    def go(u: KatTerm) -> set[tuple]:
        if isinstance(u, KTest):
            return {(a,) for a in alph_atoms if eval_test(u.test, a, alphabet)}
        if isinstance(u, KAct):
            if max_len < 1:
                return set()
            i = alphabet.actions.index(u.name)
            return {(a, i, b) for a in alph_atoms for b in alph_atoms}
        if isinstance(u, KPlus):
            out: set[tuple] = set()
            for a in u.args:
                out |= go(a)
            return out
        if isinstance(u, KSeq):
            langs = [go(a) for a in u.args]
            acc = {(a,) for a in alph_atoms}
            for lang in langs:
                nxt: set[tuple] = set()
                for x in acc:
                    for y in lang:
                        j = _coalesce(x, y, max_len)
                        if j is not None:
                            nxt.add(j)
                acc = nxt
                if not acc:
                    break
            return acc
        # star: iterate coalesced catenation to a fixpoint (lengths bounded)
        base = go(u.arg)
        acc = {(a,) for a in alph_atoms}
        frontier = set(acc)
        while frontier:
            new: set[tuple] = set()
            for x in frontier:
                for y in base:
                    j = _coalesce(x, y, max_len)
                    if j is not None and j not in acc:
                        new.add(j)
            acc |= new
            frontier = new
        return acc

    return go(t)


def gs_diff(
    s_lang: Iterable[tuple], t_lang: Iterable[tuple]
) -> tuple | None:
    """Shortest string in exactly one of the two languages, or None."""
    s_set, t_set = set(s_lang), set(t_lang)
    sym = s_set ^ t_set
    if not sym:
        return None
    return min(sym, key=lambda g: (len(g), g))
