"""The spinal group itself: tree action, sections, decompositions, the word
problem and finite-level fingerprints.

Conventions.  Vertices are tuples over ``0..q-1`` (point ``i`` of Y is
``i-1``).  A word ``x1 x2 ... xn`` is the automorphism ``x1 o x2 o ... o xn``
(the last letter acts first).  A B-letter ``b`` living at shift ``o`` moves
only vertices ``(q-1)^n 0 y ...``, where it applies ``omega_{o+n+1}(b)`` to
``y``.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ClosureLimitExceeded, NotAdmissible, NotLevelStabilizing, UnknownEpiId
from .finite_algebra import SpinalData
from .omega import OmegaSequence, is_admissible, minimal_homogeneity
from .words import Word, ab_projections, cyclic_conjugate, invert, reduce_letters

# hash() of an element uses the level-L permutation with q^L at most this
_HASH_VERTICES = 1024


def halving_steps(m: int) -> int:
    """Number of steps m -> floor((m+1)/2) until m <= 1."""
    h = 0
    while m > 1:
        m = (m + 1) // 2
        h += 1
    return h


class SpinalGroup:
    def __init__(self, data: SpinalData, omega: OmegaSequence, check_admissible: bool = True):
        for e in omega.epi_ids():
            if e not in data.epis:
                raise UnknownEpiId(f"omega uses unknown epimorphism id {e!r}")
        if check_admissible and not is_admissible(omega, data):
            raise NotAdmissible(f"omega {omega} is not admissible for this data")
        self.data = data
        self.omega = omega
        self.alpha = data.alphabet
        self.q = data.q
        self.nA = self.alpha.nA
        self.permA = data.action.images  # permA[x][y]
        self.n_classes = omega.n_classes
        self.next_class = [omega.offset_class(c + 1) for c in range(self.n_classes)]
        # bA[c][x]: A-letter that B-letter x (at class c) applies below vertex 0, or None
        self.bA: list[list] = []
        for c in range(self.n_classes):
            epi = data.epis[omega.at(c + 1)]
            row = [None] * self.alpha.size
            for x in self.alpha.b_letters:
                img = epi(x - self.nA)
                row[x] = None if img == self.alpha.idA else img
            self.bA.append(row)
        self._id_memo: dict = {}
        self._gen_perm_cache: dict = {}
        self._witness_depth: int | None = None

    # -- basics --------------------------------------------------------
    def cls(self, offset: int) -> int:
        return self.omega.offset_class(offset)

    def word(self, text: str, offset: int = 0) -> Word:
        return self.alpha.parse(text, offset)

    def element(self, w: Word | str, offset: int = 0) -> "GroupElement":
        if isinstance(w, str):
            w = self.word(w, offset)
        return GroupElement(self, w)

    def identity(self, offset: int = 0) -> "GroupElement":
        return GroupElement(self, Word((), offset))

    def generators(self, offset: int = 0) -> list["GroupElement"]:
        return [GroupElement(self, Word((x,), offset)) for x in self.alpha.generators]

    def format(self, w) -> str:
        if isinstance(w, GroupElement):
            w = w.word
        return self.alpha.format(w)

    def reduce(self, letters: Iterable[int]) -> tuple:
        return reduce_letters(letters, self.alpha)[0]

    def root_perm_letters(self, letters: Sequence[int]) -> int:
        mul = self.alpha.mulA
        acc = self.alpha.idA
        nA = self.nA
        for x in letters:
            if x < nA:
                acc = mul[acc][x]
        return acc

    @property
    def homogeneity(self) -> int | None:
        if not hasattr(self, "_hom"):
            self._hom = minimal_homogeneity(self.omega, self.data, max(self.q + 1, 4 * self.n_classes + 4))
        return self._hom

    # -- tree action ---------------------------------------------------
    def act_letters(self, letters: Sequence[int], offset: int, v: Sequence[int]) -> tuple:
        v = list(v)
        if not v:
            return ()
        nA, q, permA = self.nA, self.q, self.permA
        for x in reversed(letters):
            if x < nA:
                v[0] = permA[x][v[0]]
                continue
            n = 0
            while n < len(v) and v[n] == q - 1:
                n += 1
            if n + 1 < len(v) and v[n] == 0:
                a = self.bA[self.cls(offset + n)][x]
                if a is not None:
                    v[n + 1] = permA[a][v[n + 1]]
        return tuple(v)

    def raw_sections(self, letters: Sequence[int], c: int):
        """Unreduced sections of a word at every vertex of level 1.

        Returns ``(images, pieces)``: ``images[i]`` is where the word sends
        vertex ``i`` and ``pieces[i]`` the section at ``i`` (a letter list
        living at the next class)."""
        q, nA, permA, bA = self.q, self.nA, self.permA, self.bA[c]
        cur = list(range(q))
        pieces: list[list] = [[] for _ in range(q)]
        for x in reversed(letters):
            if x < nA:
                p = permA[x]
                cur = [p[v] for v in cur]
                continue
            for i in range(q):
                v = cur[i]
                if v == 0:
                    a = bA[x]
                    if a is not None:
                        pieces[i].append(a)
                elif v == q - 1:
                    pieces[i].append(x)
        for p in pieces:
            p.reverse()
        return cur, pieces

    def sections(self, letters: Sequence[int], c: int) -> list[tuple]:
        _, pieces = self.raw_sections(letters, c)
        return [self.reduce(p) for p in pieces]

    # -- word problem --------------------------------------------------
    def is_identity_letters(self, letters: Sequence[int], c: int) -> bool:
        letters = cyclic_conjugate(Word(tuple(letters)), self.alpha).letters
        return self._is_id(letters, c)

    def _is_id(self, letters: tuple, c: int) -> bool:
        if not letters:
            return True
        if len(letters) == 1:
            return False
        key = (c, letters)
        hit = self._id_memo.get(key)
        if hit is not None:
            return hit
        if self.root_perm_letters(letters) != self.alpha.idA:
            res = False
        else:
            nc = self.next_class[c]
            res = True
            for s in self.sections(letters, c):
                s = cyclic_conjugate(Word(s), self.alpha).letters
                if not self._is_id(s, nc):
                    res = False
                    break
        self._id_memo[key] = res
        return res

    def is_identity(self, g) -> bool:
        w = g.word if isinstance(g, GroupElement) else g
        return self.is_identity_letters(w.letters, self.cls(w.offset))

    def equals(self, g, h) -> bool:
        wg = g.word if isinstance(g, GroupElement) else g
        wh = h.word if isinstance(h, GroupElement) else h
        if wg.offset != wh.offset:
            raise ValueError("elements live at different offsets")
        return self.is_identity(wg + invert(wh, self.alpha))

    # -- fingerprints ----------------------------------------------------
    @property
    def witness_depth(self) -> int:
        """Max over generators of the level at which they first move a vertex."""
        if self._witness_depth is None:
            G = 1
            for c in range(self.n_classes):
                for x in self.alpha.b_letters:
                    j, cc = 1, c
                    while self.bA[cc][x] is None:
                        cc = self.next_class[cc]
                        j += 1
                        if j > self.n_classes + 1:
                            raise NotAdmissible("a B-letter acts trivially on the whole tree")
                    G = max(G, j + 1)
            self._witness_depth = G
        return self._witness_depth

    def certified_level(self, m: int) -> int:
        """Level at which every nontrivial element of length <= m moves a vertex."""
        return halving_steps(max(m, 1)) + self.witness_depth

    def hash_level(self) -> int:
        return max(1, int(math.floor(math.log(_HASH_VERTICES) / math.log(self.q) + 1e-9)))

    def generator_perms(self, c: int, L: int) -> dict:
        key = (c, L)
        hit = self._gen_perm_cache.get(key)
        if hit is not None:
            return hit
        q = self.q
        N = q**L
        digits = np.array(np.unravel_index(np.arange(N), (q,) * L)).T  # most significant first
        weights = q ** np.arange(L - 1, -1, -1)
        permA = np.asarray(self.permA)
        out = {}
        for x in self.alpha.a_letters:
            d = digits.copy()
            d[:, 0] = permA[x][d[:, 0]]
            out[x] = d @ weights
        for x in self.alpha.b_letters:
            d = digits.copy()
            spine = np.ones(N, dtype=bool)
            cc = c
            for n in range(L - 1):
                a = self.bA[cc][x]
                mask = spine & (digits[:, n] == 0)
                if a is not None and mask.any():
                    d[mask, n + 1] = permA[a][digits[mask, n + 1]]
                spine &= digits[:, n] == q - 1
                cc = self.next_class[cc]
            out[x] = d @ weights
        self._gen_perm_cache[key] = out
        return out

    def level_perm(self, w: Word, L: int) -> np.ndarray:
        gp = self.generator_perms(self.cls(w.offset), L)
        P = np.arange(self.q**L)
        for x in w.letters:
            P = P[gp[x]]
        return P

    def fingerprint(self, g, L: int | None = None) -> np.ndarray:
        w = g.word if isinstance(g, GroupElement) else g
        if L is None:
            L = self.certified_level(2 * max(len(w), 1))
        return self.level_perm(w, L)

    # -- sections and decompositions -----------------------------------
    def psi(self, g):
        """``(h, sections)`` with ``h`` the root element making ``h*g`` fix level 1."""
        w = g.word if isinstance(g, GroupElement) else g
        rp = self.root_perm_letters(w.letters)
        h = int(self.data.root_group.inv[rp])
        secs = self.sections(w.letters, self.cls(w.offset))
        return h, [Word(s, w.offset + 1) for s in secs]

    def section(self, g, path: Sequence[int]) -> Word:
        """Reduced section at the vertex ``path`` (0-indexed letters)."""
        w = g.word if isinstance(g, GroupElement) else g
        letters, off = w.letters, w.offset
        for i in path:
            _, pieces = self.raw_sections(letters, self.cls(off))
            letters = self.reduce(pieces[i])
            off += 1
        return Word(letters, off)

    def stabilizes_level(self, w: Word, r: int) -> bool:
        """Is ``w`` in the stabilizer of level ``r``?"""
        frontier = [w.letters]
        off = w.offset
        for _ in range(r):
            nxt = []
            c = self.cls(off)
            for ls in frontier:
                if self.root_perm_letters(ls) != self.alpha.idA:
                    return False
                nxt.extend(self.sections(ls, c))
            frontier = nxt
            off += 1
        return True

    def depth_decomposition(self, F: Word, r: int) -> "DecompositionTree":
        return DecompositionTree.build(self, F, r)

    # -- subgroups and abelianization ------------------------------------
    def subgroup_closure(self, gens: Sequence["GroupElement"], limit: int = 10_000) -> list["GroupElement"]:
        if not gens:
            return [self.identity()]
        off = gens[0].word.offset
        L = self.hash_level()
        buckets: dict = {}
        elems: list = []

        def add(g: "GroupElement") -> bool:
            key = g.digest(L)
            for h in buckets.get(key, ()):
                if self.equals(g, h):
                    return False
            buckets.setdefault(key, []).append(g)
            elems.append(g)
            if len(elems) > limit:
                raise ClosureLimitExceeded(f"subgroup has more than {limit} elements")
            return True

        add(self.identity(off))
        frontier = [elems[0]]
        while frontier:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = g * s
                    if add(h):
                        nxt.append(h)
            frontier = nxt
        return elems

    def chi(self, g) -> tuple[int, int]:
        w = g.word if isinstance(g, GroupElement) else g
        return ab_projections(w, self.data)

    def in_commutator(self, g) -> bool:
        (QA, _), (QB, _) = self.data.abelianizations
        a, b = self.chi(g)
        return a == QA.identity and b == QB.identity


class GroupElement:
    """An element of a :class:`SpinalGroup`, held as a reduced word.

    Equality is equality in the group (decided by the word problem), not
    equality of words."""

    __slots__ = ("group", "word", "_digests")

    def __init__(self, group: SpinalGroup, word: Word, reduced: bool = False):
        self.group = group
        self.word = word if reduced else Word(group.reduce(word.letters), word.offset)
        self._digests: dict = {}

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.group, self.word + other.word)

    def __pow__(self, k: int) -> "GroupElement":
        if k < 0:
            return self.inverse() ** (-k)
        return GroupElement(self.group, self.word**k)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.group, invert(self.word, self.group.alpha), reduced=True)

    def __len__(self) -> int:
        return len(self.word)

    def is_identity(self) -> bool:
        return self.group.is_identity(self.word)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        if self.word == other.word:
            return True
        return self.group.equals(self, other)

    def digest(self, L: int) -> bytes:
        d = self._digests.get(L)
        if d is None:
            P = self.group.level_perm(self.word, L).astype(np.int32)
            d = self._digests[L] = hashlib.blake2b(P.tobytes(), digest_size=16).digest()
        return d

    def __hash__(self) -> int:
        return hash(self.digest(self.group.hash_level()))

    def act(self, v: Sequence[int]) -> tuple:
        return self.group.act_letters(self.word.letters, self.word.offset, v)

    def root_permutation(self) -> int:
        return self.group.root_perm_letters(self.word.letters)

    def __str__(self) -> str:
        return self.group.format(self.word)

    def __repr__(self) -> str:
        return f"GroupElement({self})"


@dataclass
class DecompositionTree:
    """Iterated reduced sections of a word down to depth ``r`` with the
    per-level counts used by the shortening arguments.

    ``levels[l]`` lists the ``q**l`` words on level ``l`` in lexicographic
    vertex order.  Kernel indices ``j`` refer to ``omega_{o+j}`` where ``o``
    is the root offset.
    """

    root: Word
    r: int
    levels: list
    length: list = field(default_factory=list)  # |L_l|
    a_count: list = field(default_factory=list)  # |L_l|_A
    b_count: list = field(default_factory=list)  # |L_l|_B
    k_count: list = field(default_factory=list)  # k_count[l][j] = |L_l|_{K_j}, j = 1..r
    xi: list = field(default_factory=list)  # xi[l], l = 1..r (xi[0] unused)
    nu: list = field(default_factory=list)  # nu[l], l = 1..r (nu[0] unused)
    plus: list = field(default_factory=list)  # |L_l|^+, l = 0..r

    @classmethod
    def build(cls, G: SpinalGroup, F: Word, r: int) -> "DecompositionTree":
        F = Word(G.reduce(F.letters), F.offset)
        nA = G.nA
        kernels = [None] + [G.data.epis[G.omega.at(F.offset + j)].kernel for j in range(1, r + 1)]
        levels = [[F.letters]]
        nu = [0]
        for ell in range(r):
            c = G.cls(F.offset + ell)
            nxt = []
            merges = 0
            for idx, ls in enumerate(levels[-1]):
                if G.root_perm_letters(ls) != G.alpha.idA:
                    path = tuple(int(d) + 1 for d in np.unravel_index(idx, (G.q,) * ell)) if ell else ()
                    raise NotLevelStabilizing(
                        f"node {''.join(map(str, path)) or 'root'} at level {ell} moves level 1", path
                    )
                _, pieces = G.raw_sections(ls, c)
                for p in pieces:
                    red, m = reduce_letters(p, G.alpha)
                    merges += m
                    nxt.append(red)
            levels.append(nxt)
            nu.append(merges)
        t = cls(F, r, [[Word(ls, F.offset + ell) for ls in lev] for ell, lev in enumerate(levels)])
        t.nu = nu
        for ell, lev in enumerate(levels):
            bs = [x - nA for ls in lev for x in ls if x >= nA]
            t.length.append(sum(len(ls) for ls in lev))
            t.b_count.append(len(bs))
            t.a_count.append(t.length[-1] - len(bs))
            t.k_count.append([None] + [sum(1 for b in bs if b in kernels[j]) for j in range(1, r + 1)])
            union: set = set()
            for j in range(1, ell + 1):
                union |= kernels[j]
            t.plus.append(sum(1 for b in bs if b not in union))
        t.xi = [0]
        for ell in range(1, r + 1):
            prior: set = set()
            for j in range(1, ell):
                prior |= kernels[j]
            bs = [x - nA for ls in levels[ell - 1] for x in ls if x >= nA]
            t.xi.append(sum(1 for b in bs if b in kernels[ell] and b not in prior))
        return t

    def level_length(self, ell: int) -> int:
        return self.length[ell]

    def bound_L(self, q: int) -> int:
        """Right-hand side of the level-length estimate
        ``n + 1 + q + ... + q^(r-1) - sum xi - sum nu``."""
        n = len(self.root)
        return n + 1 + sum(q**i for i in range(1, self.r)) - sum(self.xi[1:]) - sum(self.nu[1:])
