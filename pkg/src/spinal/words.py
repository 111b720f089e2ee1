"""Words over the generating set A ∪ B.

Letters are plain ints: a nontrivial element ``e`` of the root group is the
letter ``e``; a nontrivial element ``e`` of the level group is ``nA + e``.
A :class:`Word` is a tuple of letters plus the shift of omega it lives at.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, WeightUndefined

_SMALL = 512  # groups up to this order keep list-of-list tables


@dataclass(frozen=True)
class Word:
    letters: tuple = ()
    offset: int = 0

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "Word") -> "Word":
        if other.offset != self.offset:
            raise ValueError("cannot concatenate words living at different offsets")
        return Word(self.letters + other.letters, self.offset)

    def __pow__(self, k: int) -> "Word":
        return Word(self.letters * k, self.offset)

    def at(self, offset: int) -> "Word":
        return Word(self.letters, offset)


@dataclass(frozen=True)
class WeightScheme:
    """Triangular weights: A-letters weigh ``tau[0]``; a B-letter weighs
    ``tau[i]`` with ``i`` the first position where omega kills it."""

    r: int
    eta: float
    tau: tuple

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(float(t) for t in self.tau))


class Alphabet:
    """Letter encoding, products and names for one :class:`SpinalData`."""

    def __init__(self, data):
        GA, GB = data.root_group, data.level_group
        self.data = data
        self.nA, self.nB = GA.order, GB.order
        self.idA, self.idB = GA.identity, GB.identity
        self.mulA = GA.table
        self.mulB = GB.table if GB.order <= _SMALL else GB.mul
        self.invA = GA.inv.tolist()
        self.invB = GB.inv.tolist()
        self.size = self.nA + self.nB
        self.names = list(GA.names) + list(GB.names)
        self.a_letters = [e for e in range(self.nA) if e != self.idA]
        self.b_letters = [self.nA + e for e in range(self.nB) if e != self.idB]
        self.generators = self.a_letters + self.b_letters
        gen_names = [self.names[x] for x in self.generators]
        if len(set(gen_names)) != len(gen_names):
            raise ParseError("root and level group share a generator name")
        self.single_char = all(len(s) == 1 for s in gen_names)
        self._by_name = {self.names[x]: x for x in self.generators}
        self.inverse = [0] * self.size
        for e in range(self.nA):
            self.inverse[e] = self.invA[e]
        for e in range(self.nB):
            self.inverse[self.nA + e] = self.nA + self.invB[e]
        self.letter_order = [0] * self.size
        for x in self.generators:
            g = GA if x < self.nA else GB
            self.letter_order[x] = int(g.element_orders[x if x < self.nA else x - self.nA])

    def is_b(self, x: int) -> bool:
        return x >= self.nA

    def combine(self, x: int, y: int) -> int | None:
        """Product of two same-kind letters; None if it is the identity."""
        nA = self.nA
        if x < nA:
            z = self.mulA[x][y]
            return None if z == self.idA else z
        z = int(self.mulB[x - nA][y - nA])
        return None if z == self.idB else nA + z

    # -- text ----------------------------------------------------------
    def letter(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise ParseError(f"unknown generator {name!r}") from None

    def format(self, w: Word | Sequence[int]) -> str:
        letters = w.letters if isinstance(w, Word) else tuple(w)
        if not letters:
            return "1"
        sep = "" if self.single_char else "."
        return sep.join(self.names[x] for x in letters)

    def parse(self, text: str, offset: int = 0) -> Word:
        """Parse ``"abadac"``, ``"(abadac)^4"``, ``"a.b01.a2"`` or ``"b^-1"``."""
        tokens = self._tokenize(text)
        pos, letters = self._parse_seq(tokens, 0)
        if pos != len(tokens):
            raise ParseError(f"unexpected {tokens[pos]!r} in {text!r}")
        return Word(tuple(letters), offset)

    def _tokenize(self, text: str) -> list:
        out: list = []
        i = 0
        text = text.strip()
        if text in ("", "1", "e"):
            return out
        names = sorted(self._by_name, key=len, reverse=True)
        while i < len(text):
            ch = text[i]
            if ch.isspace() or ch in ".*":
                i += 1
                continue
            if ch in "()":
                out.append(ch)
                i += 1
                continue
            if ch == "^":
                m = re.match(r"\^\s*(-?\d+)", text[i:])
                if not m:
                    raise ParseError(f"bad exponent at {text[i:]!r}")
                out.append(("pow", int(m.group(1))))
                i += m.end()
                continue
            if self.single_char:
                out.append(self.letter(ch))
                i += 1
                continue
            # longest generator name that matches and ends at a separator
            for nm in names:
                if text.startswith(nm, i):
                    j = i + len(nm)
                    if j == len(text) or text[j] in ".*()^ \t":
                        out.append(self._by_name[nm])
                        i = j
                        break
            else:
                raise ParseError(f"cannot parse generator at {text[i:]!r}")
        return out

    def _parse_seq(self, toks, pos):
        letters: list = []
        while pos < len(toks) and toks[pos] != ")":
            t = toks[pos]
            if t == "(":
                pos, inner = self._parse_seq(toks, pos + 1)
                if pos >= len(toks) or toks[pos] != ")":
                    raise ParseError("unbalanced parentheses")
                pos += 1
                item = inner
            elif isinstance(t, tuple):
                raise ParseError("exponent without a base")
            else:
                item = [t]
                pos += 1
            if pos < len(toks) and isinstance(toks[pos], tuple):
                k = toks[pos][1]
                pos += 1
                if k < 0:
                    item = [self.inverse[x] for x in reversed(item)]
                    k = -k
                item = item * k
            letters.extend(item)
        return pos, letters


def reduce_letters(letters: Iterable[int], alpha: Alphabet) -> tuple[tuple, int]:
    """Reduced form by simple relations; also returns the number of merges."""
    stack: list = []
    merges = 0
    nA = alpha.nA
    for x in letters:
        if stack and (stack[-1] < nA) == (x < nA):
            merges += 1
            x = alpha.combine(stack.pop(), x)
            if x is None:
                continue
        stack.append(x)
    return tuple(stack), merges


def reduce(w: Word, data) -> Word:
    letters, _ = reduce_letters(w.letters, _alpha(data))
    return Word(letters, w.offset)


def is_reduced(w: Word, data) -> bool:
    alpha = _alpha(data)
    nA = alpha.nA
    ls = w.letters
    return all((ls[i] < nA) != (ls[i + 1] < nA) for i in range(len(ls) - 1))


def cyclic_conjugate(w: Word, data) -> Word:
    """A conjugate of ``w`` that has length <= 1 or the alternating form
    ``b1 a1 ... bk ak``."""
    alpha = _alpha(data)
    nA = alpha.nA
    letters, _ = reduce_letters(w.letters, alpha)
    while len(letters) > 1:
        first_b, last_b = letters[0] >= nA, letters[-1] >= nA
        if first_b == last_b:
            letters, _ = reduce_letters((letters[-1],) + letters[:-1], alpha)
        elif not first_b:
            letters = letters[1:] + letters[:1]
        else:
            break
    return Word(letters, w.offset)


def invert(w: Word, data) -> Word:
    inv = _alpha(data).inverse
    return Word(tuple(inv[x] for x in reversed(w.letters)), w.offset)


def tau_index(b_elem: int, offset: int, data, omega, r: int | None = None) -> int:
    """Smallest i >= 1 with omega_{offset+i}(b) = 1."""
    limit = r if r is not None else omega.n_classes + len(omega.period) + 1
    for i in range(1, limit + 1):
        if b_elem in data.epis[omega.at(offset + i)].kernel:
            return i
    raise WeightUndefined(
        f"{data.level_group.names[b_elem]} at offset {offset} is not killed within {limit} levels"
    )


def weight(w: Word, scheme: WeightScheme | None, data, omega) -> float:
    """Sum of letter weights; ``scheme=None`` gives word length."""
    if scheme is None:
        return float(len(w))
    nA = data.root_group.order
    total = 0.0
    cache: dict = {}
    for x in w.letters:
        if x < nA:
            total += scheme.tau[0]
        else:
            i = cache.get(x)
            if i is None:
                i = cache[x] = tau_index(x - nA, w.offset, data, omega, scheme.r)
            total += scheme.tau[i]
    return total


def ab_projections(w: Word, data) -> tuple[int, int]:
    """Images of the A-part in G_A^ab and of the B-part in G_B^ab."""
    (QA, pA), (QB, pB) = data.abelianizations
    nA = data.root_group.order
    a, b = QA.identity, QB.identity
    for x in w.letters:
        if x < nA:
            a = QA.multiply(a, int(pA[x]))
        else:
            b = QB.multiply(b, int(pB[x - nA]))
    return a, b


def b_count(w: Word, data) -> int:
    nA = data.root_group.order
    return sum(1 for x in w.letters if x >= nA)


def _alpha(data) -> Alphabet:
    return data if isinstance(data, Alphabet) else data.alphabet


def random_reduced_letters(rng: np.random.Generator, n: int, alpha: Alphabet) -> tuple:
    """Uniform-ish random reduced word of length exactly ``n``."""
    if n == 0:
        return ()
    a, b = alpha.a_letters, alpha.b_letters
    start_b = bool(rng.integers(2))
    out = []
    for i in range(n):
        pool = b if (i % 2 == 0) == start_b else a
        out.append(pool[int(rng.integers(len(pool)))])
    return tuple(out)
