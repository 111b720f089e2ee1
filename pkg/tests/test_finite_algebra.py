import itertools

import numpy as np
import pytest

from spinal.errors import (
    DuplicateName,
    KernelsDoNotCover,
    NoIdentity,
    NoInverse,
    NotAssociative,
    NotFaithful,
    NotHomomorphism,
    NotSurjective,
    NotTransitive,
)
from spinal.finite_algebra import (
    SpinalData,
    abelianize,
    build_epimorphism,
    build_group,
    commutator_subgroup,
    group_from_permutations,
    validate_action,
    validate_spinal_data,
)
from spinal.presets import cyclic_root, elementary_abelian, grigorchuk2, grigorchukP, s3_root

KLEIN = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]


def test_z2_group():
    G = build_group([[0, 1], [1, 0]], ["1", "a"])
    assert G.order == 2 and G.identity == 0
    assert G.element_order(1) == 2


def test_klein_group_self_inverse():
    G = build_group(KLEIN, ["1", "b", "c", "d"])
    assert G.order == 4
    assert all(G.inv[x] == x for x in range(4))
    assert G.multiply(G.index("b"), G.index("c")) == G.index("d")
    assert G.is_abelian()


def test_holt_group_order(holt_data):
    data, _ = holt_data
    assert data.level_group.order == 2916


def test_build_group_rejects_bad_tables():
    with pytest.raises(DuplicateName):
        build_group([[0, 1], [1, 0]], ["x", "x"])
    with pytest.raises(NoIdentity):
        build_group([[0, 0], [0, 0]], ["x", "y"])
    with pytest.raises(NoInverse):
        build_group([[0, 1], [1, 1]], ["1", "z"])
    # a latin square with identity that is not associative (order 5 loop)
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(NotAssociative):
        build_group(loop, list("12345"))


def test_actions_regularity():
    _, act2 = cyclic_root(2)
    assert act2.regular
    _, act5 = cyclic_root(5)
    assert act5.regular and act5.q == 5
    _, s3 = s3_root()
    assert not s3.regular
    assert sorted(s3.cycle_type(3)) == [1, 2]


def test_action_errors():
    G = build_group(KLEIN, ["1", "b", "c", "d"])
    with pytest.raises(NotFaithful):
        validate_action(G, [[1, 2], [2, 1], [2, 1], [1, 2]])
    Z2 = build_group([[0, 1], [1, 0]], ["1", "a"])
    with pytest.raises(NotTransitive):
        validate_action(Z2, [[1, 2, 3], [2, 1, 3]])
    with pytest.raises(NotHomomorphism):
        validate_action(G, [[1, 2, 3, 4], [2, 1, 3, 4], [1, 2, 4, 3], [2, 1, 3, 4]])


def test_grigorchuk_epimorphism_kernels():
    data, _ = grigorchuk2()
    GB = data.level_group
    names = lambda k: {GB.names[x] for x in k}
    assert names(data.epis["0"].kernel) == {"1", "d"}
    assert names(data.epis["1"].kernel) == {"1", "c"}
    assert names(data.epis["2"].kernel) == {"1", "b"}


def test_identity_epimorphism():
    GA, _ = cyclic_root(3)
    e = build_epimorphism(GA, GA, list(range(3)))
    assert e.kernel == frozenset({GA.identity})


def test_p3_functional_kernel():
    data, _ = grigorchukP(3)
    e = data.epis["1"]  # functional [1, 1]
    GB = data.level_group
    _, vecs = elementary_abelian(3, 2)
    assert len(e.kernel) == 3
    assert all((vecs[x][0] + vecs[x][1]) % 3 == 0 for x in e.kernel)


def test_epimorphism_errors():
    GA, _ = cyclic_root(2)
    GB = build_group(KLEIN, ["1", "b", "c", "d"])
    with pytest.raises(NotSurjective):
        build_epimorphism(GB, GA, [0, 0, 0, 0])
    with pytest.raises(NotHomomorphism):
        build_epimorphism(GB, GA, [0, 1, 0, 0])


def test_validate_presets(holt_data):
    for data, _ in (grigorchuk2(), grigorchukP(3), holt_data):
        rep = validate_spinal_data(data)
        assert rep.passed
        assert validate_spinal_data(data).checks == rep.checks  # idempotent
    assert not holt_data[0].regular_root
    assert holt_data[0].prime_degree
    assert len(holt_data[0].epis) == 12


def test_missing_epi_breaks_cover():
    data, _ = grigorchuk2()
    epis = {k: v for k, v in data.epis.items() if k != "2"}
    with pytest.raises(KernelsDoNotCover):
        validate_spinal_data(SpinalData(data.action, data.level_group, epis))


def test_abelianizations(holt_data):
    GB = build_group(KLEIN, ["1", "b", "c", "d"])
    Q, _ = abelianize(GB)
    assert Q.order == 4
    S3, _ = s3_root()
    Q, proj = abelianize(S3)
    assert Q.order == 2
    assert proj[S3.index("r")] == Q.identity and proj[S3.index("s")] != Q.identity
    data, _ = holt_data
    (QA, _), (QB, _) = data.abelianizations
    assert QA.order == 2
    # brute-force commutator closure
    assert QB.order == data.level_group.order // len(commutator_subgroup(data.level_group))


def test_epimorphism_invariants():
    for data, _ in (grigorchuk2(), grigorchukP(3), grigorchukP(5)):
        GA, GB = data.root_group, data.level_group
        for e in data.epis.values():
            assert len(e.kernel) * GA.order == GB.order
            for x, y in itertools.product(range(GB.order), repeat=2):
                assert e(GB.multiply(x, y)) == GA.multiply(e(x), e(y))


def test_regular_cycle_lengths():
    for G, act in (cyclic_root(2), cyclic_root(3), cyclic_root(7)):
        for x in range(G.order):
            ct = act.cycle_type(x)
            assert len(set(ct)) == 1 and ct[0] * len(ct) == act.q


def test_group_from_permutations_composition():
    perms = [[1, 2, 3], [2, 3, 1], [3, 1, 2]]
    G = group_from_permutations(perms, ["1", "r", "r2"])
    assert G.multiply(1, 1) == 2
    np.testing.assert_array_equal(G.mul, [[0, 1, 2], [1, 2, 0], [2, 0, 1]])
