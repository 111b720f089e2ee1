"""Element orders, period growth tables, period shadows, period sequences
and the construction of short words of large order."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .core import GroupElement, SpinalGroup
from .errors import (
    ColumnMatchFailed,
    HypothesesViolated,
    LengthBlowup,
    PreconditionViolated,
    RecursionLimit,
    WeightUndefined,
)
from .words import Word, WeightScheme, cyclic_conjugate, reduce_letters, weight


@dataclass
class OrderResult:
    order: int
    trace: list = field(default_factory=list)  # (offset, word, s) per expanded node
    q_power: bool = False


def _is_power_of(n: int, q: int) -> bool:
    while n % q == 0 and n > 1:
        n //= q
    return n == 1


def _cyc(G: SpinalGroup, letters) -> tuple:
    return cyclic_conjugate(Word(tuple(letters)), G.alpha).letters


class OrderSolver:
    """Order recursion: raise to the order ``s`` of the root permutation,
    take the level-1 sections of the power and combine their orders with
    ``s * lcm(...)``.  Results are memoized per (offset class, word)."""

    def __init__(self, G: SpinalGroup, max_depth: int = 64, max_length: int = 10_000):
        self.G = G
        self.max_depth = max_depth
        self.max_length = max_length
        self.memo: dict = {}
        self._active: set = set()

    def order_of(self, letters: Sequence[int], c: int, trace: list | None = None, offset: int = 0) -> int:
        return self._order(_cyc(self.G, letters), c, 0, trace, offset)

    def _order(self, letters: tuple, c: int, depth: int, trace, offset: int) -> int:
        G = self.G
        if not letters:
            return 1
        if len(letters) == 1:
            return G.alpha.letter_order[letters[0]]
        key = (c, letters)
        hit = self.memo.get(key)
        if hit is not None and trace is None:
            return hit
        if key in self._active:
            raise RecursionLimit(f"order recursion revisits {G.format(letters)}; element may have infinite order")
        if depth >= self.max_depth:
            raise RecursionLimit(f"order recursion deeper than {self.max_depth}")
        rp = G.root_perm_letters(letters)
        s = G.data.root_group.element_order(rp)
        power = reduce_letters(letters * s, G.alpha)[0] if s > 1 else letters
        if len(power) > self.max_length:
            raise LengthBlowup(f"intermediate word longer than {self.max_length}")
        if trace is not None:
            trace.append((offset, G.format(letters), s))
        self._active.add(key)
        try:
            nc = G.next_class[c]
            m = 1
            for sec in G.sections(power, c):
                m = math.lcm(m, self._order(_cyc(G, sec), nc, depth + 1, trace, offset + 1))
        finally:
            self._active.discard(key)
        res = s * m
        self.memo[key] = res
        return res


def _solver(G: SpinalGroup, max_depth=64, max_length=10_000) -> OrderSolver:
    sv = getattr(G, "_order_solver", None)
    if sv is None or sv.max_depth != max_depth or sv.max_length != max_length:
        sv = OrderSolver(G, max_depth, max_length)
        G._order_solver = sv
    return sv


def _word(g) -> Word:
    return g.word if isinstance(g, GroupElement) else g


def element_order(G: SpinalGroup, g, max_depth: int = 64, max_length: int = 10_000, with_trace=False) -> OrderResult:
    w = _word(g)
    trace: list | None = [] if with_trace else None
    n = _solver(G, max_depth, max_length).order_of(w.letters, G.cls(w.offset), trace, w.offset)
    return OrderResult(n, trace or [], _is_power_of(n, G.q))


def order(G: SpinalGroup, g) -> int:
    return element_order(G, g).order


def period_table(G: SpinalGroup, ball) -> list[int]:
    """pi(m) for m = 0..radius from a length-mode ball."""
    out = []
    best = 1
    for sphere in ball.sphere_words(G):
        for w in sphere:
            best = max(best, order(G, w))
        out.append(best)
    return out


# -- period shadow ---------------------------------------------------------

_WEIGHT_EPS = 1e-9  # tau_0 + tau_r = 1 exactly; compare leaf weights with slack


@dataclass
class ShadowNode:
    word: Word
    weight: float
    s: int = 1
    children: list = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class PeriodShadow:
    root: ShadowNode
    depth: int
    leaves: int


def _check_shadow_pre(G: SpinalGroup, scheme: WeightScheme):
    if not G.data.regular_root:
        raise PreconditionViolated("period shadows need a regular root action")
    hom = G.homogeneity
    if hom is None or hom > scheme.r:
        raise PreconditionViolated(f"omega is not {scheme.r}-homogeneous")


def period_shadow(G: SpinalGroup, g, scheme: WeightScheme, max_depth: int = 200) -> PeriodShadow:
    _check_shadow_pre(G, scheme)
    w = _word(g)
    stats = {"depth": 0, "leaves": 0}

    def build(letters: tuple, off: int, depth: int) -> ShadowNode:
        letters = _cyc(G, letters)
        node = ShadowNode(Word(letters, off), weight(Word(letters, off), scheme, G.data, G.omega))
        if node.weight <= 1 + _WEIGHT_EPS:
            stats["leaves"] += 1
            stats["depth"] = max(stats["depth"], depth)
            return node
        if depth >= max_depth:
            raise RecursionLimit("period shadow deeper than the configured limit")
        s = G.data.root_group.element_order(G.root_perm_letters(letters))
        node.s = s
        power = reduce_letters(letters * s, G.alpha)[0]
        for sec in G.sections(power, G.cls(off)):
            node.children.append(build(sec, off + 1, depth + 1))
        return node

    root = build(w.letters, w.offset, 0)
    return PeriodShadow(root, stats["depth"], stats["leaves"])


def light_words(G: SpinalGroup, scheme: WeightScheme):
    """All reduced words of weight <= 1 at every offset class."""
    alpha = G.alpha
    for c in range(G.n_classes):
        costs = {}
        for x in alpha.generators:
            try:
                costs[x] = weight(Word((x,), c), scheme, G.data, G.omega)
            except WeightUndefined:
                continue
        stack = [((), 0.0)]
        while stack:
            ls, wt = stack.pop()
            yield Word(ls, c)
            for x, cx in costs.items():
                if ls and (ls[-1] < alpha.nA) == (x < alpha.nA):
                    continue
                if wt + cx <= 1 + _WEIGHT_EPS:
                    stack.append((ls + (x,), wt + cx))


def shadow_constant(G: SpinalGroup, scheme: WeightScheme) -> int:
    """lcm of the orders of all elements of weight <= 1."""
    C = 1
    for w in light_words(G, scheme):
        C = math.lcm(C, order(G, w))
    return C


def shadow_certificate(G: SpinalGroup, g, scheme: WeightScheme, C: int | None = None) -> dict:
    if C is None:
        C = shadow_constant(G, scheme)
    sh = period_shadow(G, g, scheme)
    w = _word(g)
    cw = _cyc(G, w.letters)
    wt = weight(Word(cw, w.offset), scheme, G.data, G.omega)
    bound = max(0, math.ceil(math.log(wt) / -math.log(scheme.eta))) if wt > 1 else 0
    pi = order(G, w)
    return {
        "order": pi,
        "C": C,
        "depth": sh.depth,
        "weight": wt,
        "depth_bound": bound,
        "divides": (C * G.q**sh.depth) % pi == 0,
        "depth_ok": sh.depth <= bound,
    }


# -- period sequence (prime degree) ---------------------------------------------

@dataclass
class PeriodSequence:
    words: list  # F, F_1, F_11, ... (cyclically reduced, with offsets)
    t: int

    @property
    def final(self) -> Word:
        return self.words[-1]


def _check_prime_cyclic(G: SpinalGroup):
    q = G.q
    if q < 2 or any(q % p == 0 for p in range(2, math.isqrt(q) + 1)):
        raise PreconditionViolated("period sequences need prime degree")
    if G.data.root_group.order != q:
        raise PreconditionViolated("period sequences need a cyclic root group of order q")


def period_sequence(G: SpinalGroup, g, max_steps: int = 10_000) -> PeriodSequence:
    """F, F_1, F_11, ... : raise to the p-th power and keep the first section
    until the word has length 1 or fixes level 1.  pi(g) = p^t pi(last)."""
    _check_prime_cyclic(G)
    w = _word(g)
    letters, off = _cyc(G, w.letters), w.offset
    words = [Word(letters, off)]
    t = 0
    while len(letters) > 1 and G.root_perm_letters(letters) != G.alpha.idA:
        if t >= max_steps:
            raise RecursionLimit("period sequence does not terminate")
        power = reduce_letters(letters * G.q, G.alpha)[0]
        letters = _cyc(G, G.sections(power, G.cls(off))[0])
        off += 1
        t += 1
        words.append(Word(letters, off))
    return PeriodSequence(words, t)


def order_from_sequence(G: SpinalGroup, seq: PeriodSequence) -> int:
    return G.q**seq.t * order(G, seq.final)


# -- chi-trace check for Grigorchuk 2-groups ---------------------------------------

def chi_trace_violations(G: SpinalGroup, g, max_nodes: int = 100_000) -> list[str]:
    """Walk the order recursion of ``g`` and report every step whose
    abelianized images do not follow the allowed transitions.

    Allowed: squaring (a, b) at shift o gives children (omega_{o+1}(b), b);
    a squared child (1, b), b != 1, splits into {(1, b), (omega_{o+1}(b), 1)};
    a squared child (1, 1) splits into two (1, 1) or two
    (omega_{o+1}(bb), bb) with bb the nontrivial element killed by omega_o;
    any other level-1 split has children multiplying to (omega_{o+1}(b), b).
    """
    data = G.data
    if G.q != 2 or data.level_group.order != 4 or not data.level_group.is_abelian():
        raise PreconditionViolated("the chi-trace graph is stated for Grigorchuk 2-groups")
    QA_id = data.root_group.identity
    GB = data.level_group
    nA = G.nA
    bad: list[str] = []

    def chi(letters) -> tuple[int, int]:
        a, b = QA_id, GB.identity
        for x in letters:
            if x < nA:
                a = data.root_group.multiply(a, x)
            else:
                b = GB.multiply(b, x - nA)
        return a, b

    def epi(off: int):
        return data.epis[G.omega.at(off)]

    def mul(u, v):
        return data.root_group.multiply(u[0], v[0]), GB.multiply(u[1], v[1])

    seen: set = set()
    stack = [(_cyc(G, _word(g).letters), _word(g).offset, False)]
    while stack:
        letters, off, squared = stack.pop()
        key = (G.cls(off), letters, squared)
        if key in seen or len(letters) <= 1:
            continue
        seen.add(key)
        if len(seen) > max_nodes:
            raise RecursionLimit("chi-trace walk too large")
        a, b = chi(letters)
        e1 = epi(off + 1)
        target = (e1(b), b)
        if a != QA_id:
            power = reduce_letters(letters * 2, G.alpha)[0]
            kids = [_cyc(G, s) for s in G.sections(power, G.cls(off))]
            got = [chi(k) for k in kids]
            if any(x != target for x in got):
                bad.append(f"square at {G.format(letters)}@{off}: {got} != {target}")
            stack.extend((k, off + 1, True) for k in kids)
            continue
        kids = [_cyc(G, s) for s in G.sections(letters, G.cls(off))]
        got = [chi(k) for k in kids]
        if squared and b != GB.identity:
            allowed = sorted([(QA_id, b), (e1(b), GB.identity)])
            if sorted(got) != allowed:
                bad.append(f"split at {G.format(letters)}@{off}: {got} not {allowed}")
        elif squared and off >= 1:
            bb = [x for x in epi(off).kernel if x != GB.identity][0]
            ok = got[0] == got[1] and got[0] in ((QA_id, GB.identity), (e1(bb), bb))
            if not ok:
                bad.append(f"split at {G.format(letters)}@{off}: {got} not both (1,1) or (w(bb),bb)")
        elif mul(got[0], got[1]) != target:
            bad.append(f"split at {G.format(letters)}@{off}: {got} do not multiply to {target}")
        stack.extend((k, off + 1, False) for k in kids)
    return bad


# -- short words of large order ---------------------------------------------------

@dataclass
class LowerBoundSetup:
    a: int  # A-letter of order 2 with a(1) = q
    index_set: list  # I (1-indexed positions) up to the scan horizon
    r: int  # largest gap in I


def lysionok_hypotheses(G: SpinalGroup, horizon: int | None = None) -> LowerBoundSetup:
    om, data = G.omega, G.data
    GA = data.root_group
    q = G.q
    cands = [x for x in G.alpha.a_letters if GA.element_order(x) == 2 and G.permA[x][0] == q - 1]
    if not cands:
        raise HypothesesViolated("no root element of order 2 sends 1 to q")
    a = cands[0]
    if horizon is None:
        horizon = len(om.prefix) + 3 * len(om.period) + 1
    I = [1] + [i for i in range(2, horizon + 1) if om.at(i) == om.at(1) and om.at(i - 1) != om.at(i)]
    tail = [i for i in I if i > len(om.prefix) + 1]
    if len(tail) < 2:
        raise HypothesesViolated("omega_1 does not recur after a different letter; I is finite")
    r = max(j - i for i, j in zip(I, I[1:]))
    nB = data.level_group.order

    def k_a(j):
        e = data.epis[om.at(j)]
        return {x for x in range(nB) if e(x) == a}

    K1 = data.epis[om.at(1)].kernel
    K1a = k_a(1)
    for j in range(2, horizon + 1):
        if not (K1a & k_a(j)):
            raise HypothesesViolated(f"K_(1,a) and K_({j},a) are disjoint")
    for j in I[1:]:
        if not (K1 & k_a(j - 1)):
            raise HypothesesViolated(f"K_1 and K_({j - 1},a) are disjoint")
    return LowerBoundSetup(a, I, r)


def lysionok_step(G: SpinalGroup, g: Word, base: int, a: int | None = None) -> Word:
    """One doubling step: from ``g = a b1 a b2 ... a bk`` at shift ``base+s``
    build ``g'`` at shift ``base`` whose square has ``g`` among its level-s
    sections."""
    data, om, nA = G.data, G.omega, G.nA
    if a is None:
        a = lysionok_hypotheses(G).a
    s = g.offset - base
    if s < 1:
        raise PreconditionViolated("seed must live strictly below the target shift")
    k = len(g) // 2
    if len(g) % 2 or k % 2 == 0 or any(g.letters[2 * i] != a for i in range(k)):
        raise HypothesesViolated("seed must be a b1 a b2 ... a bk with k odd")
    bs = [g.letters[2 * i + 1] - nA for i in range(k)]
    e_seed = data.epis[om.at(base + s + 1)]
    in_kernel = [b for b in bs if b in e_seed.kernel]
    if len(in_kernel) != 1 or any(e_seed(b) != a for b in bs if b not in e_seed.kernel):
        raise HypothesesViolated("seed letters must lie in K_(s+1,a) except one in K_(s+1)")
    if om.at(base + s + 1) != om.at(base + 1):
        raise HypothesesViolated("omega_(s+1) must equal omega_1 relative to the target shift")
    nB = data.level_group.order

    def k_a(j):  # relative to base
        e = data.epis[om.at(base + j)]
        return frozenset(x for x in range(nB) if e(x) == a)

    # word-set: list of "a" or (frozenset, is_seed)
    ws: list = []
    for b in bs:
        ws += ["a", (frozenset([b]), True)]
    for i in range(s, 0, -1):
        Ka = k_a(i)
        out: list = []
        for item in ws:
            if item == "a":
                out += ["a", (Ka, False), "a"]
            else:
                out.append(item)
        ws = out
    K1 = data.epis[om.at(base + 1)].kernel
    pos = [i for i, it in enumerate(ws) if it != "a" and it[1] and next(iter(it[0])) in K1]
    if len(pos) != 1:
        raise HypothesesViolated("expected exactly one seed letter killed by omega_1")
    p = pos[0]
    bi = next(iter(ws[p][0]))
    K1a = sorted(k_a(1))
    GB = data.level_group
    split = None
    for x1 in K1a:
        x2 = GB.multiply(int(GB.inv[x1]), bi)
        if x2 in K1a:
            split = (x1, x2)
            break
    if split is None:
        raise HypothesesViolated("the killed seed letter is not a product of two K_(1,a) letters")
    K1_star = frozenset(x for x in K1 if x != GB.identity)
    ws[p:p + 1] = [(frozenset([split[0]]), False), "a", (K1_star, False), "a", (frozenset([split[1]]), False)]
    half = len(ws) // 2
    if len(ws) % 2:
        raise ColumnMatchFailed("word-set has odd length")
    line1, line2 = ws[:half], ws[half:]
    out_letters = []
    for col, (u, v) in enumerate(zip(line1, line2)):
        if u == "a" or v == "a":
            if u != v:
                raise ColumnMatchFailed(f"column {col} pairs a with a set")
            out_letters.append(a)
            continue
        common = sorted(u[0] & v[0])
        if not common:
            raise ColumnMatchFailed(f"column {col} has no common element")
        out_letters.append(nA + common[0])
    return Word(tuple(out_letters), base)


@dataclass
class LowerBoundStep:
    word: Word
    seed_offset: int
    order: int | None = None


def lysionok_build(G: SpinalGroup, x: int, with_orders: bool = True) -> list[LowerBoundStep]:
    """Seed ``a b`` below the x-th element of I and apply x steps down to shift 0."""
    setup = lysionok_hypotheses(G, horizon=None)
    om = G.omega
    I = list(setup.index_set)
    while len(I) < x + 1:
        nxt = I[-1] + 1
        while not (om.at(nxt) == om.at(1) and om.at(nxt - 1) != om.at(nxt)):
            nxt += 1
        I.append(nxt)
    top = I[x]
    K = G.data.epis[om.at(top)].kernel
    b = min(e for e in K if e != G.data.level_group.identity)
    w = Word((setup.a, G.nA + b), top - 1)
    steps = [LowerBoundStep(w, top - 1, order(G, w) if with_orders else None)]
    for j in range(x, 0, -1):
        w = lysionok_step(G, w, I[j - 1] - 1, setup.a)
        steps.append(LowerBoundStep(w, I[j - 1] - 1, order(G, w) if with_orders else None))
    return steps


def lysionok_length_bound(r: int, x: int) -> float:
    return 2 * (2 ** ((r - 1) * (x + 1)) - 1) / (2 ** (r - 1) - 1)
