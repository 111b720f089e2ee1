"""Balls in the Cayley graph, portraits, the shortening estimates and the
substitution used for the growth lower bound."""
from __future__ import annotations

import hashlib
import heapq
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import SpinalGroup
from .errors import BudgetExceeded, InvalidCutoff, PreconditionViolated, ValidationError
from .omega import is_complete
from .words import Word, WeightScheme, invert, random_reduced_letters, reduce_letters, weight

BALL_FORMAT_VERSION = 1
# enumerate_ball keys elements by the certified-level permutation while q^L stays below this
_MAX_CERT_VERTICES = 1 << 16


def _digest(P: np.ndarray) -> bytes:
    return hashlib.blake2b(P.astype(np.int32).tobytes(), digest_size=16).digest()


@dataclass
class BallCache:
    spec_hash: str
    mode: str  # "length" or "tau:<r>"
    radius: int
    gamma: list  # gamma[m] = |B(m)|
    spheres: list  # spheres[m] = representative words (formatted) of weight/length class m
    offset: int = 0
    orders: dict = field(default_factory=dict)  # word -> order

    def sphere_words(self, G: SpinalGroup) -> list[list[Word]]:
        return [[G.word(s, self.offset) for s in sph] for sph in self.spheres]

    def sphere_sizes(self) -> list[int]:
        return [len(s) for s in self.spheres]

    def to_json(self) -> str:
        d = {
            "version": BALL_FORMAT_VERSION,
            "spec_hash": self.spec_hash,
            "mode": self.mode,
            "radius": self.radius,
            "offset": self.offset,
            "gamma": self.gamma,
            "spheres": self.spheres,
            "orders": self.orders,
        }
        return json.dumps(d, sort_keys=True)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path, spec_hash: str | None = None) -> "BallCache":
        d = json.loads(Path(path).read_text())
        if d.get("version") != BALL_FORMAT_VERSION:
            raise ValidationError(f"ball cache version {d.get('version')} not supported")
        if spec_hash is not None and d["spec_hash"] != spec_hash:
            raise ValidationError("ball cache belongs to a different group specification")
        return cls(d["spec_hash"], d["mode"], d["radius"], d["gamma"], d["spheres"], d["offset"], d["orders"])


class _Registry:
    """Canonical element registry keyed by level-L permutation digests.

    When ``certified`` the digest decides equality; otherwise colliding
    digests are resolved with the word problem."""

    def __init__(self, G: SpinalGroup, offset: int, certified: bool):
        self.G, self.offset, self.certified = G, offset, certified
        self.buckets: dict = {}

    def find(self, key: bytes, letters: tuple):
        bucket = self.buckets.get(key)
        if not bucket:
            return None
        if self.certified:
            return bucket[0]
        w = Word(letters, self.offset)
        for other in bucket:
            if self.G.equals(w, Word(other, self.offset)):
                return other
        return None

    def add(self, key: bytes, letters: tuple) -> None:
        self.buckets.setdefault(key, []).append(letters)


def enumerate_ball(G: SpinalGroup, n: int, offset: int = 0, budget: int = 2_000_000, threads: int = 1,
                   spec_hash: str = "") -> BallCache:
    """Exact ball of radius ``n`` for word length: breadth-first search by
    right multiplication with generators, one shortlex-minimal
    representative per element."""
    if n < 0:
        raise ValidationError("radius must be non-negative")
    L = G.certified_level(2 * max(n, 1))
    certified = G.q**L <= _MAX_CERT_VERTICES
    if not certified:
        L = max(1, int(math.log(_MAX_CERT_VERTICES) / math.log(G.q)))
    gp = G.generator_perms(G.cls(offset), L)
    gens = G.alpha.generators
    reg = _Registry(G, offset, certified)
    ident = np.arange(G.q**L)
    reg.add(_digest(ident), ())
    spheres: list[list[tuple]] = [[()]]
    frontier = [((), ident)]
    total = 1

    def expand(item):
        letters, P = item
        out = []
        for x in gens:
            red, _ = reduce_letters(letters + (x,), G.alpha)
            if len(red) <= len(letters):
                continue
            Q = P[gp[x]]
            out.append((red, Q, _digest(Q)))
        return out

    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for m in range(1, n + 1):
            chunks = list(pool.map(expand, frontier)) if pool else [expand(it) for it in frontier]
            # deterministic merge: candidates ordered by word, so the first hit is shortlex-minimal
            cands = sorted((c for ch in chunks for c in ch), key=lambda t: t[0])
            new: dict = {}
            order: list = []
            for red, Q, key in cands:
                if reg.find(key, red) is not None:
                    continue
                if key in new and certified:
                    continue
                if not certified and any(G.equals(Word(red, offset), Word(o, offset)) for o, _ in new.get(key, [])):
                    continue
                new.setdefault(key, []).append((red, Q))
                order.append((red, Q, key))
            for red, Q, key in order:
                reg.add(key, red)
            total += len(order)
            if total > budget:
                raise BudgetExceeded(f"ball of radius {m} exceeds {budget} elements")
            spheres.append([red for red, _, _ in order])
            frontier = [(red, Q) for red, Q, _ in order]
    finally:
        if pool:
            pool.shutdown()
    gamma = list(np.cumsum([len(s) for s in spheres]).tolist())
    return BallCache(spec_hash, "length", n, gamma,
                     [[G.format(Word(s)) for s in sph] for sph in spheres], offset)


def enumerate_weight_ball(G: SpinalGroup, n: float, scheme: WeightScheme, offset: int = 0,
                          budget: int = 2_000_000, spec_hash: str = "") -> BallCache:
    """Ball for the triangular weight, by Dijkstra over right multiplication.
    ``gamma[m]`` counts elements of weight <= m for m = 0..floor(n)."""
    costs = {x: weight(Word((x,), offset), scheme, G.data, G.omega) for x in G.alpha.generators}
    max_len = int(n / min(costs.values())) + 1
    L = G.certified_level(2 * max_len)
    certified = G.q**L <= _MAX_CERT_VERTICES
    if not certified:
        L = max(1, int(math.log(_MAX_CERT_VERTICES) / math.log(G.q)))
    gp = G.generator_perms(G.cls(offset), L)
    reg = _Registry(G, offset, certified)
    ident = np.arange(G.q**L)
    heap = [(0.0, (), 0)]
    perms = {(): ident}
    done: list = []
    tick = 1
    eps = 1e-9
    while heap:
        wt, letters, _ = heapq.heappop(heap)
        P = perms.pop(letters, None)
        if P is None:
            continue
        key = _digest(P)
        if reg.find(key, letters) is not None:
            continue
        reg.add(key, letters)
        done.append((wt, letters))
        if len(done) > budget:
            raise BudgetExceeded(f"weight ball exceeds {budget} elements")
        for x, cx in costs.items():
            red, _ = reduce_letters(letters + (x,), G.alpha)
            if len(red) <= len(letters):
                continue
            w2 = wt + cx
            if w2 > n + eps:
                continue
            if red not in perms:
                perms[red] = P[gp[x]]
                heapq.heappush(heap, (w2, red, tick))
                tick += 1
    radius = int(math.floor(n + eps))
    spheres = [[] for _ in range(radius + 1)]
    for wt, letters in done:
        spheres[min(radius, max(0, math.ceil(wt - eps)))].append(G.format(Word(letters)))
    gamma = list(np.cumsum([len(s) for s in spheres]).tolist())
    return BallCache(spec_hash, f"tau:{scheme.r}", radius, gamma, spheres, offset)


def reduced_words(G: SpinalGroup, n: int):
    """All reduced words of length <= n, shortest first."""
    alpha = G.alpha
    layer = [()]
    yield ()
    for _ in range(n):
        nxt = []
        for ls in layer:
            for x in alpha.generators:
                if ls and (ls[-1] < alpha.nA) == (x < alpha.nA):
                    continue
                nxt.append(ls + (x,))
        yield from nxt
        layer = nxt


def naive_ball_counts(G: SpinalGroup, n: int, offset: int = 0, method: str = "auto") -> list[int]:
    """gamma(m), m <= n, by brute force over every reduced word.

    ``pairwise`` compares each word with the class representatives found so
    far using the word problem; ``action`` compares level-L vertex
    permutations obtained letter by letter from the vertex action."""
    if method == "auto":
        method = "pairwise" if len(G.alpha.generators) <= 4 else "action"
    by_len: dict = {}
    if method == "pairwise":
        reps: list = []
        for ls in reduced_words(G, n):
            w = Word(ls, offset)
            if any(G.equals(w, Word(r, offset)) for r in reps):
                continue
            reps.append(ls)
            by_len[len(ls)] = by_len.get(len(ls), 0) + 1
    else:
        L = G.certified_level(2 * max(n, 1))
        q = G.q
        verts = list(np.ndindex(*(q,) * L))
        weights = q ** np.arange(L - 1, -1, -1)
        gen = {}
        for x in G.alpha.generators:
            imgs = [G.act_letters((x,), offset, v) for v in verts]
            gen[x] = np.asarray(imgs) @ weights
        alpha = G.alpha
        best: dict = {}  # element digest -> shortest word length

        def dfs(last_b, depth: int, P: np.ndarray) -> None:
            key = _digest(P)
            if best.get(key, n + 1) > depth:
                best[key] = depth
            if depth == n:
                return
            for x in alpha.generators:
                if last_b is not None and last_b == (x >= alpha.nA):
                    continue
                dfs(x >= alpha.nA, depth + 1, P[gen[x]])

        dfs(None, 0, np.arange(q**L))
        for m in best.values():
            by_len[m] = by_len.get(m, 0) + 1
    out, acc = [], 0
    for m in range(n + 1):
        acc += by_len.get(m, 0)
        out.append(acc)
    return out


# -- portraits ------------------------------------------------------------------

@dataclass
class PortraitNode:
    word: Word
    weight: float
    h: int | None = None  # root element for interior nodes
    children: list = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class Portrait:
    root: PortraitNode
    K: float
    zeta: float
    leaves: int
    depth: int


def portrait_constants(q: int, scheme: WeightScheme, zeta: float | None = None) -> dict:
    eta, t0 = scheme.eta, scheme.tau[0]
    if zeta is None:
        zeta = (1 + eta) / 2
    alpha = math.log(q) / (math.log(q) - math.log(eta))
    K_zeta = eta * t0 / (zeta - eta)
    kappa = eta * t0 / (q - eta)
    return {"zeta": zeta, "alpha": alpha, "K_zeta": K_zeta, "kappa": kappa,
            "K": max(q ** (1 / alpha) + kappa, K_zeta)}


def portrait(G: SpinalGroup, g, scheme: WeightScheme, K: float | None = None, zeta: float | None = None,
             max_depth: int = 200) -> Portrait:
    """Portrait over word weights: leaves carry words of weight <= K,
    interior nodes the root element h with h*g fixing level 1."""
    const = portrait_constants(G.q, scheme, zeta)
    zeta = const["zeta"]
    if not scheme.eta < zeta < 1:
        raise InvalidCutoff(f"zeta must lie in ({scheme.eta:.6f}, 1)")
    if K is None:
        K = const["K"]
    if K < const["K_zeta"] - 1e-12:
        raise InvalidCutoff(f"K={K} is below K_zeta={const['K_zeta']:.6f}")
    w0 = g.word if hasattr(g, "word") else g
    stats = {"leaves": 0, "depth": 0}

    def build(w: Word, depth: int) -> PortraitNode:
        wt = weight(w, scheme, G.data, G.omega)
        node = PortraitNode(w, wt)
        if wt <= K:
            stats["leaves"] += 1
            stats["depth"] = max(stats["depth"], depth)
            return node
        if depth >= max_depth:
            raise BudgetExceeded("portrait deeper than the configured limit")
        h, secs = G.psi(w)
        node.h = h
        node.children = [build(s, depth + 1) for s in secs]
        return node

    root = build(Word(G.reduce(w0.letters), w0.offset), 0)
    return Portrait(root, K, zeta, stats["leaves"], stats["depth"])


def portrait_action(G: SpinalGroup, node: PortraitNode, v: Sequence[int]) -> tuple:
    """Vertex action of the element a portrait encodes."""
    if not v:
        return ()
    if node.is_leaf:
        return G.act_letters(node.word.letters, node.word.offset, v)
    i = v[0]
    rest = portrait_action(G, node.children[i], v[1:])
    hinv = int(G.data.root_group.inv[node.h])
    return (G.permA[hinv][i],) + rest


def portrait_matches(G: SpinalGroup, p: Portrait, level: int) -> bool:
    """Compare the portrait's action with the element on all vertices of a level."""
    for v in np.ndindex(*(G.q,) * level):
        if portrait_action(G, p.root, v) != G.act_letters(p.root.word.letters, p.root.word.offset, v):
            return False
    return True


def leaf_bound(q: int, scheme: WeightScheme, w: float, K: float) -> float:
    c = portrait_constants(q, scheme)
    return 1.0 if w <= K else 1 + (w - c["kappa"]) ** c["alpha"]


# -- shortening estimates -----------------------------------------------------------

@dataclass
class ShorteningReport:
    variant: str
    n: int
    level_length: int
    bound: float
    passed: bool
    bound_L: int
    passed_L: bool
    xi: list
    nu: list
    plus: list


def check_shortening(G: SpinalGroup, F: Word, r: int, variant: str = "34") -> ShorteningReport:
    """Level-r length of ``F`` against the 3/4 (``"34"``) or 2/3 (``"23"``) estimate."""
    om, data = G.omega, G.data
    o = F.offset
    if not is_complete(om.terms(o + 1, r), data):
        raise PreconditionViolated(f"omega_{o + 1}..omega_{o + r} is not complete")
    if variant == "23":
        if G.q != 2:
            raise PreconditionViolated("the 2/3 estimate needs q = 2")
        ids = om.terms(o + 1, r)
        ok = any(is_complete([ids[i], ids[j], ids[k]], data)
                 for i in range(r) for j in range(i + 1, r) for k in range(j + 1, r))
        if not ok:
            raise PreconditionViolated("no three kernels among the first r cover G_B")
    elif variant != "34":
        raise ValidationError(f"unknown shortening variant {variant!r}")
    t = G.depth_decomposition(F, r)
    n, q = len(t.root), G.q
    Lr = t.length[r]
    if variant == "34":
        bound = 0.75 * n + q**r
        passed = Lr <= bound
    else:
        bound = 2 * n / 3 + 2 / 3 + 3 * q**r
        passed = Lr < bound
    bL = t.bound_L(q)
    return ShorteningReport(variant, n, Lr, bound, passed, bL, Lr <= bL, t.xi, t.nu, t.plus)


def random_stabilizer_word(G: SpinalGroup, rng: np.random.Generator, max_len: int, r: int,
                           offset: int = 0, tries: int = 100_000) -> Word:
    """Random reduced word of length <= max_len fixing level ``r`` (rejection sampling)."""
    for _ in range(tries):
        n = int(rng.integers(0, max_len + 1))
        w = Word(random_reduced_letters(rng, n, G.alpha), offset)
        if G.stabilizes_level(w, r):
            return w
    raise BudgetExceeded("no level stabilizing word found")


# -- growth lower bound substitution ---------------------------------------------------

@dataclass
class LambdaSetup:
    h: int
    nu: dict  # A-letter -> B-letter
    conj: list  # a_1..a_q with a_i(q) = i


def lambda_setup(G: SpinalGroup, offset: int = 0) -> LambdaSetup:
    q, GA = G.q, G.data.root_group
    hs = [x for x in range(GA.order) if G.permA[x][0] == q - 1]
    if not hs:
        raise PreconditionViolated("no root element sends 1 to q")
    h = hs[0]
    epi = G.data.epis[G.omega.at(offset + 1)]
    nu = {}
    for a in G.alpha.a_letters:
        pre = [b for b in range(G.data.level_group.order) if epi(b) == a]
        nu[a] = G.nA + pre[0]
    conj = []
    for i in range(q):
        if i == q - 1:
            conj.append(GA.identity)
        else:
            conj.append(next(x for x in range(GA.order) if G.permA[x][q - 1] == i))
    return LambdaSetup(h, nu, conj)


def lambda_word(G: SpinalGroup, F: Word, setup: LambdaSetup) -> list:
    """Letters of lambda(F) living one shift above ``F``."""
    GA = G.data.root_group
    hinv = int(GA.inv[setup.h])
    out = []
    for x in F.letters:
        if x < G.nA:
            out += [setup.h, setup.nu[x], hinv]
        else:
            out.append(x)
    return [x for x in out if x != GA.identity]


def lambda_compose(G: SpinalGroup, Fs: Sequence[Word], setup: LambdaSetup | None = None) -> Word:
    """F = lambda(F_1)^(a_1) ... lambda(F_(q-1))^(a_(q-1)) lambda(F_q), a word one
    shift above the F_i whose i-th section contains F_i."""
    q = G.q
    if len(Fs) != q:
        raise PreconditionViolated(f"need {q} words")
    off = Fs[0].offset - 1
    if off < 0 or any(F.offset != off + 1 for F in Fs):
        raise PreconditionViolated("all F_i must live at the same positive shift")
    if setup is None:
        setup = lambda_setup(G, off)
    GA = G.data.root_group
    if G.permA[setup.h][q - 1] == 0:
        for F in Fs:
            outside = sum(1 for x in F.letters if x < G.nA and not _in_cyclic(GA, setup.h, x))
            if outside > q:
                raise PreconditionViolated("too many A-letters outside <h>")
    letters: list = []
    for i, F in enumerate(Fs):
        lam = lambda_word(G, F, setup)
        a = setup.conj[i]
        if a == GA.identity:
            letters += lam
        else:
            letters += [a] + lam + [int(GA.inv[a])]
    red, _ = reduce_letters(letters, G.alpha)
    return Word(red, off)


def _in_cyclic(GA, h: int, x: int) -> bool:
    y = h
    while True:
        if y == x:
            return True
        if y == GA.identity:
            return x == GA.identity
        y = GA.multiply(y, h)
