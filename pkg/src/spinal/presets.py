"""Ready-made spinal data: Grigorchuk p-groups and Holt's non-abelian example."""
from __future__ import annotations

import itertools

import numpy as np

from .errors import ValidationError
from .finite_algebra import (
    SpinalData,
    build_epimorphism,
    build_group,
    validate_action,
    validate_spinal_data,
)
from .omega import OmegaSequence


def cyclic_root(p: int):
    """Z/p acting on Y by rotation; element k sends y to y+k."""
    names = ["1", "a"] + [f"a{k}" for k in range(2, p)]
    table = [[(i + j) % p for j in range(p)] for i in range(p)]
    G = build_group(table, names, "G_A")
    perms = [[(y + k) % p + 1 for y in range(p)] for k in range(p)]
    return G, validate_action(G, perms)


def elementary_abelian(p: int, d: int, names=None, name="G_B"):
    """(Z/p)^d with element index sum v_i p^i (first coordinate least significant)."""
    n = p**d
    vecs = np.array(list(itertools.product(range(p), repeat=d)))[:, ::-1]  # row k = digits of k
    weights = p ** np.arange(d)
    table = ((vecs[:, None, :] + vecs[None, :, :]) % p) @ weights
    if names is None:
        names = ["1"] + ["b" + "".join(map(str, v)) for v in vecs[1:].tolist()]
    return build_group(table, names, name), vecs


def functional_epi(GB, vecs, GA, p: int, coeffs, eid: str):
    """Epimorphism v -> a^(sum u_i v_i)."""
    coeffs = np.asarray(coeffs) % p
    if not coeffs.any():
        raise ValidationError(f"functional {eid!r} is zero, not surjective")
    images = (vecs @ coeffs) % p  # cyclic_root orders elements by power of a
    return build_epimorphism(GB, GA, images.tolist(), eid)


def grigorchuk_functionals(p: int) -> list[tuple[int, int]]:
    """The p+1 functionals [1,0], [1,1], ..., [1,p-1], [0,1]."""
    return [(1, k) for k in range(p)] + [(0, 1)]


def grigorchuk2(omega: str | OmegaSequence = "012") -> tuple[SpinalData, OmegaSequence]:
    """Grigorchuk 2-groups; epi 0, 1, 2 kills d, c, b respectively."""
    GA, act = cyclic_root(2)
    GB, vecs = elementary_abelian(2, 2, names=["1", "b", "c", "d"])
    epis = {}
    for eid, f in (("0", (1, 1)), ("1", (1, 0)), ("2", (0, 1))):
        epis[eid] = functional_epi(GB, vecs, GA, 2, f, eid)
    data = SpinalData(act, GB, epis)
    validate_spinal_data(data)
    om = omega if isinstance(omega, OmegaSequence) else OmegaSequence.parse(omega)
    return data, om


def grigorchukP(p: int, period=None, prefix=()) -> tuple[SpinalData, OmegaSequence]:
    """Grigorchuk p-group.  Epimorphism id ``str(k)`` is the k-th functional
    of :func:`grigorchuk_functionals`; ``period``/``prefix`` are lists of
    ``[u, v]`` functionals or strings of ids.  Default period: all p+1."""
    if p < 2 or any(p % k == 0 for k in range(2, p)):
        raise ValidationError(f"p={p} is not prime")
    if p > 10:
        raise ValidationError("single-character epimorphism ids support p <= 9")
    GA, act = cyclic_root(p)
    GB, vecs = elementary_abelian(p, 2)
    funcs = grigorchuk_functionals(p)
    epis = {str(k): functional_epi(GB, vecs, GA, p, f, str(k)) for k, f in enumerate(funcs)}
    data = SpinalData(act, GB, epis)
    validate_spinal_data(data)

    def ids(seq):
        if isinstance(seq, str):
            return tuple(seq)
        out = []
        for f in seq:
            if isinstance(f, str):
                out.append(f)
                continue
            u, v = (int(f[0]) % p, int(f[1]) % p)
            # normalize to the listed representative (scalar multiples share a kernel)
            for k, g in enumerate(funcs):
                if (u * g[1] - v * g[0]) % p == 0:
                    out.append(str(k))
                    break
            else:
                raise ValidationError(f"functional {f} is zero")
        return tuple(out)

    if period is None:
        period = [str(k) for k in range(p + 1)]
    return data, OmegaSequence(ids(prefix), ids(period))


# -- Holt's example ----------------------------------------------------------
# level group (Z/3)^6 x| <x12, x34>; x encoded by bits (x12 = 1, x34 = 2, x56 = 3)
_HOLT_SIGNS = {
    0: np.array([1, 1, 1, 1, 1, 1]),
    1: np.array([1, 1, -1, -1, -1, -1]),
    2: np.array([-1, -1, 1, 1, -1, -1]),
    3: np.array([-1, -1, -1, -1, 1, 1]),
}
_X_NAMES = {0: "", 1: "x12", 2: "x34", 3: "x56"}
# (functional on (Z/3)^6, the x lying in the kernel), row by row
HOLT_EPIS = {
    "0": ((0, 1, 0, 0, 0, 0), 1),
    "1": ((0, 0, 0, 1, 0, 0), 2),
    "2": ((0, 0, 0, 0, 0, 1), 3),
    "3": ((1, 0, 0, 0, 0, 0), 1),
    "4": ((0, 0, 1, 0, 0, 0), 2),
    "5": ((0, 0, 0, 0, 1, 0), 3),
    "6": ((1, -1, 0, 0, 0, 0), 1),
    "7": ((0, 0, 1, -1, 0, 0), 2),
    "8": ((0, 0, 0, 0, 1, -1), 3),
    "9": ((1, 1, 0, 0, 0, 0), 1),
    "A": ((0, 0, 1, 1, 0, 0), 2),
    "B": ((0, 0, 0, 0, 1, 1), 3),
}


def s3_root():
    """S_3 as affine maps y -> t + (-1)^e y of Z/3; index t + 3e."""
    names = ["1", "r", "r2", "s", "rs", "r2s"]
    table = np.empty((6, 6), dtype=np.int64)
    for i in range(6):
        t1, e1 = i % 3, i // 3
        for j in range(6):
            t2, e2 = j % 3, j // 3
            table[i, j] = (t1 + (-1) ** e1 * t2) % 3 + 3 * (e1 ^ e2)
    G = build_group(table, names, "G_A")
    perms = [[(i % 3 + (-1) ** (i // 3) * y) % 3 + 1 for y in range(3)] for i in range(6)]
    return G, validate_action(G, perms)


def holt_level_group():
    vecs = np.array(list(itertools.product(range(3), repeat=6)))[:, ::-1]  # row k = digits of k
    w = 3 ** np.arange(6)
    n = 729 * 4
    idx = np.arange(n)
    v, x = vecs[idx % 729], idx // 729
    signs = np.stack([_HOLT_SIGNS[k] for k in range(4)])
    # (v1, x1)(v2, x2) = (v1 + x1.v2, x1 ^ x2), one coordinate at a time to bound memory
    sx = signs[x]
    table = 729 * (x[:, None] ^ x[None, :])
    for i in range(6):
        table += ((v[:, None, i] + sx[:, None, i] * v[None, :, i]) % 3) * int(w[i])
    names = ["1"] + [
        "b" + "".join(map(str, vecs[k % 729])) + _X_NAMES[k // 729] for k in range(1, n)
    ]
    return build_group(table, names, "G_B"), v, x


def holt(omega: str | OmegaSequence = "0123456789AB") -> tuple[SpinalData, OmegaSequence]:
    GA, act = s3_root()
    GB, v, x = holt_level_group()
    epis = {}
    for eid, (f, kx) in HOLT_EPIS.items():
        t = (v @ np.array(f)) % 3
        e = np.array([0 if xx in (0, kx) else 1 for xx in x])
        epis[eid] = build_epimorphism(GB, GA, (t + 3 * e).tolist(), eid)
    data = SpinalData(act, GB, epis)
    validate_spinal_data(data)
    om = omega if isinstance(omega, OmegaSequence) else OmegaSequence.parse(omega)
    return data, om


PRESETS = {"grigorchuk2": grigorchuk2, "grigorchukP": grigorchukP, "holt": holt}
