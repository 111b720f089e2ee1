"""Finite groups given by multiplication tables, permutation actions,
epimorphisms and the checks a spinal group needs on (G_A, G_B, Epi(G_B, G_A)).

Element ``i`` of a :class:`FiniteGroup` is the row/column index ``i`` of its
table; ``mul[x, y]`` is the product ``x*y``.  Actions are left actions:
``perm[x*y] == perm[x] o perm[y]`` (apply ``y`` first).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateName,
    KernelIntersectionNontrivial,
    KernelsDoNotCover,
    NoIdentity,
    NoInverse,
    NotAssociative,
    NotFaithful,
    NotHomomorphism,
    NotSurjective,
    NotTransitive,
    ValidationError,
)

# above this order associativity is checked with Light's test on a generating set
_EXHAUSTIVE_ASSOC_MAX = 128


class FiniteGroup:
    """A finite group stored as a validated Cayley table."""

    def __init__(self, table, names: Sequence[str], name: str = "G"):
        mul = np.asarray(table, dtype=np.int64)
        n = len(names)
        if mul.ndim != 2 or mul.shape != (n, n):
            raise ValidationError(f"{name}: table must be {n}x{n}, got {mul.shape}")
        if n == 0:
            raise NoIdentity(f"{name}: empty table")
        if mul.min() < 0 or mul.max() >= n:
            raise ValidationError(f"{name}: table entries out of range")
        if len(set(names)) != n:
            dup = sorted({s for s in names if list(names).count(s) > 1})
            raise DuplicateName(f"{name}: duplicate element names {dup}")
        self.name = name
        self.names = tuple(str(s) for s in names)
        self.mul = mul
        self.mul.setflags(write=False)
        self.order = n
        self.identity = self._find_identity()
        self.inv = self._find_inverses()
        self._check_associative()
        self._index = {s: i for i, s in enumerate(self.names)}

    def _find_identity(self) -> int:
        ar = np.arange(self.order)
        for e in range(self.order):
            if np.array_equal(self.mul[e], ar) and np.array_equal(self.mul[:, e], ar):
                return e
        raise NoIdentity(f"{self.name}: no two-sided identity")

    def _find_inverses(self) -> np.ndarray:
        inv = np.full(self.order, -1, dtype=np.int64)
        rows, cols = np.nonzero(self.mul == self.identity)
        for x, y in zip(rows.tolist(), cols.tolist()):
            if self.mul[y, x] == self.identity and inv[x] < 0:
                inv[x] = y
        missing = np.nonzero(inv < 0)[0]
        if len(missing):
            raise NoInverse(f"{self.name}: element {self.names[missing[0]]} has no inverse")
        inv.setflags(write=False)
        return inv

    def _check_associative(self) -> None:
        T = self.mul
        if self.order <= _EXHAUSTIVE_ASSOC_MAX:
            # (xy)z vs x(yz) for all triples
            lhs = T[T[:, :, None], np.arange(self.order)[None, None, :]]
            rhs = T[np.arange(self.order)[:, None, None], T[None, :, :]]
            if not np.array_equal(lhs, rhs):
                raise NotAssociative(f"{self.name}: table is not associative")
            return
        # Light's test: (x g) y == x (g y) for g in a generating set suffices
        for g in self._generating_set():
            if not np.array_equal(T[T[:, g], :], T[:, T[g, :]]):
                raise NotAssociative(f"{self.name}: table is not associative")

    def _generating_set(self) -> list[int]:
        gens: list[int] = []
        span: set = {self.identity}
        for g in range(self.order):
            if len(span) == self.order:
                break
            if g not in span:
                gens.append(g)
                span = set(subgroup_generated(self, gens).tolist())
        return gens

    # -- lookups -------------------------------------------------------
    @cached_property
    def table(self):
        """Nested-list view of ``mul``; only built for small groups."""
        return self.mul.tolist()

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"{self.name}: unknown element {name!r}") from None

    def multiply(self, x: int, y: int) -> int:
        return int(self.mul[x, y])

    def product(self, elements) -> int:
        acc = self.identity
        for e in elements:
            acc = int(self.mul[acc, e])
        return acc

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = int(self.mul[y, x])
            k += 1
        return k

    @cached_property
    def element_orders(self) -> np.ndarray:
        return np.array([self.element_order(x) for x in range(self.order)])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"


def build_group(table, names: Sequence[str], name: str = "G") -> FiniteGroup:
    return FiniteGroup(table, names, name)


def group_from_permutations(perms: Sequence[Sequence[int]], names: Sequence[str], name="G_A") -> FiniteGroup:
    """Group whose elements are the given (1-indexed) permutations, composed right to left."""
    P = np.asarray(perms, dtype=np.int64) - 1
    keys = {tuple(p): i for i, p in enumerate(P.tolist())}
    if len(keys) != len(P):
        raise ValidationError(f"{name}: repeated permutation")
    n = len(P)
    table = np.empty((n, n), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            comp = tuple(P[x][P[y]].tolist())
            if comp not in keys:
                raise ValidationError(f"{name}: permutations not closed under composition")
            table[x, y] = keys[comp]
    return FiniteGroup(table, names, name)


@dataclass(frozen=True, eq=False)
class PermutationAction:
    group: FiniteGroup
    q: int
    perm: np.ndarray  # perm[x, y] = image of point y (0-indexed) under x

    @cached_property
    def images(self) -> list[list[int]]:
        return self.perm.tolist()

    @cached_property
    def regular(self) -> bool:
        return all(_is_regular_perm(p) for p in self.images)

    def cycle_type(self, x: int) -> list[int]:
        return _cycle_lengths(self.images[x])


def _cycle_lengths(p: Sequence[int]) -> list[int]:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        n, j = 0, i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            n += 1
        out.append(n)
    return sorted(out)


def _is_regular_perm(p: Sequence[int]) -> bool:
    return len(set(_cycle_lengths(p))) == 1


def validate_action(group: FiniteGroup, perms) -> PermutationAction:
    """Check that ``perms`` (1-indexed images, one row per element) is a
    faithful transitive action of ``group``."""
    P = np.asarray(perms, dtype=np.int64) - 1
    if P.ndim != 2 or P.shape[0] != group.order:
        raise NotHomomorphism("need exactly one permutation per group element")
    q = P.shape[1]
    if P.min() < 0 or P.max() >= q or any(len(set(row)) != q for row in P.tolist()):
        raise NotHomomorphism("rows are not permutations of 1..q")
    # perm[x*y] = perm[x][perm[y]]
    lhs = P[group.mul]
    rhs = P[np.arange(group.order)[:, None, None], P[None, :, :]]
    if not np.array_equal(lhs, rhs):
        raise NotHomomorphism("action does not respect the group law")
    ident = np.arange(q)
    fixers = [x for x in range(group.order) if np.array_equal(P[x], ident)]
    if fixers != [group.identity]:
        raise NotFaithful(f"elements {[group.names[x] for x in fixers]} act trivially")
    orbit = {0}
    frontier = [0]
    while frontier:
        y = frontier.pop()
        for x in range(group.order):
            z = int(P[x, y])
            if z not in orbit:
                orbit.add(z)
                frontier.append(z)
    if len(orbit) != q:
        raise NotTransitive(f"orbit of point 1 has size {len(orbit)} < {q}")
    P.setflags(write=False)
    return PermutationAction(group, q, P)


@dataclass(frozen=True, eq=False)
class Epimorphism:
    id: str
    src: FiniteGroup
    dst: FiniteGroup
    map: np.ndarray
    kernel: frozenset = field(default=frozenset())

    @cached_property
    def images(self) -> list[int]:
        return self.map.tolist()

    def __call__(self, x: int) -> int:
        return int(self.map[x])

    def kills(self, x: int) -> bool:
        return x in self.kernel


def build_epimorphism(src: FiniteGroup, dst: FiniteGroup, mapping, id: str = "") -> Epimorphism:
    """``mapping`` is a sequence of dst indices, or a dict name -> name
    (unlisted source elements are rejected)."""
    if isinstance(mapping, Mapping):
        m = np.full(src.order, -1, dtype=np.int64)
        for k, v in mapping.items():
            m[src.index(k)] = dst.index(v)
        if (m < 0).any():
            missing = [src.names[i] for i in np.nonzero(m < 0)[0]]
            raise NotHomomorphism(f"epimorphism {id!r}: no image for {missing}")
    else:
        m = np.asarray(mapping, dtype=np.int64)
    if m.shape != (src.order,) or m.min() < 0 or m.max() >= dst.order:
        raise NotHomomorphism(f"epimorphism {id!r}: map is not total on {src.name}")
    if not np.array_equal(m[src.mul], dst.mul[m[:, None], m[None, :]]):
        raise NotHomomorphism(f"epimorphism {id!r} is not a homomorphism")
    if len(np.unique(m)) != dst.order:
        raise NotSurjective(f"epimorphism {id!r} is not surjective")
    m.setflags(write=False)
    kernel = frozenset(np.nonzero(m == dst.identity)[0].tolist())
    return Epimorphism(str(id), src, dst, m, kernel)


@dataclass(eq=False)
class SpinalData:
    action: PermutationAction
    level_group: FiniteGroup
    epis: dict  # id -> Epimorphism, insertion ordered

    @property
    def root_group(self) -> FiniteGroup:
        return self.action.group

    @property
    def q(self) -> int:
        return self.action.q

    @property
    def regular_root(self) -> bool:
        return self.action.regular

    @property
    def prime_degree(self) -> bool:
        q = self.q
        return q >= 2 and all(q % p for p in range(2, math.isqrt(q) + 1))

    def epi(self, eid: str) -> Epimorphism:
        from .errors import UnknownEpiId

        try:
            return self.epis[eid]
        except KeyError:
            raise UnknownEpiId(f"unknown epimorphism id {eid!r}") from None

    @cached_property
    def alphabet(self):
        from .words import Alphabet

        return Alphabet(self)

    @cached_property
    def abelianizations(self):
        return abelianize(self.root_group), abelianize(self.level_group)


@dataclass
class ValidationReport:
    checks: dict  # required axioms
    properties: dict = field(default_factory=dict)  # informational (regular action, prime degree)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        out = [f"{k}: {'ok' if v else 'FAIL'}" for k, v in self.checks.items()]
        return out + [f"{k}: {'yes' if v else 'no'}" for k, v in self.properties.items()]


def validate_spinal_data(data: SpinalData, raise_on_error: bool = True) -> ValidationReport:
    GB = data.level_group
    if not data.epis:
        raise ValidationError("need at least one epimorphism")
    union: set = set()
    inter = set(range(GB.order))
    for e in data.epis.values():
        if e.src is not GB or e.dst is not data.root_group:
            raise ValidationError(f"epimorphism {e.id!r} has the wrong domain or codomain")
        union |= e.kernel
        inter &= e.kernel
    checks = {
        "kernels_cover": len(union) == GB.order,
        "kernel_intersection_trivial": inter == {GB.identity},
        # trivial intersection + surjective factors = subdirect product of copies of G_A
        "subdirect_product": inter == {GB.identity}
        and all(len(e.kernel) * data.root_group.order == GB.order for e in data.epis.values()),
        "root_action_faithful_transitive": True,
    }
    props = {"regular_root": data.regular_root, "prime_degree": data.prime_degree}
    if raise_on_error:
        if not checks["kernels_cover"]:
            missing = sorted(set(range(GB.order)) - union)
            raise KernelsDoNotCover(f"no kernel contains {[GB.names[x] for x in missing][:5]}")
        if not checks["kernel_intersection_trivial"]:
            raise KernelIntersectionNontrivial(
                f"kernels share {[GB.names[x] for x in sorted(inter - {GB.identity})][:5]}"
            )
    return ValidationReport(checks, props)


# -- abelianization ------------------------------------------------------

def subgroup_generated(group: FiniteGroup, gens) -> np.ndarray:
    """Sorted element indices of the subgroup generated by ``gens``."""
    gens = np.unique(np.asarray(list(gens), dtype=np.int64))
    member = np.zeros(group.order, dtype=bool)
    member[group.identity] = True
    frontier = np.array([group.identity])
    while len(frontier):
        prod = np.unique(group.mul[np.ix_(frontier, gens)].ravel()) if len(gens) else frontier[:0]
        new = prod[~member[prod]]
        member[new] = True
        frontier = new
    return np.nonzero(member)[0]


def commutator_subgroup(group: FiniteGroup) -> np.ndarray:
    T, inv = group.mul, group.inv
    x = np.arange(group.order)
    comms = T[T[x[:, None], x[None, :]], T[inv[x][:, None], inv[x][None, :]]]
    return subgroup_generated(group, np.unique(comms))


def abelianize(group: FiniteGroup):
    """Return ``(G^ab, projection)`` with ``projection[x]`` the class of ``x``."""
    N = commutator_subgroup(group)
    proj = np.full(group.order, -1, dtype=np.int64)
    reps = []
    for x in range(group.order):
        if proj[x] >= 0:
            continue
        coset = group.mul[x, N]
        proj[coset] = len(reps)
        reps.append(x)
    k = len(reps)
    table = np.empty((k, k), dtype=np.int64)
    for i, x in enumerate(reps):
        table[i] = proj[group.mul[x, reps]]
    names = [group.names[x] for x in reps]
    quotient = FiniteGroup(table, names, name=f"{group.name}^ab")
    proj.setflags(write=False)
    return quotient, proj
