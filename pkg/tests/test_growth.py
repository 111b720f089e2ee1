import math

import numpy as np
import pytest

from spinal.bounds import tau_values
from spinal.errors import InvalidCutoff, PreconditionViolated, ValidationError
from spinal.growth import (
    BallCache,
    check_shortening,
    enumerate_ball,
    enumerate_weight_ball,
    lambda_compose,
    lambda_word,
    lambda_setup,
    leaf_bound,
    naive_ball_counts,
    portrait,
    portrait_constants,
    portrait_matches,
    random_stabilizer_word,
    reduced_words,
)
from spinal.words import Word, random_reduced_letters, weight

TAU3 = tau_values(3)


def test_small_balls(G2):
    g = enumerate_ball(G2, 2).gamma
    assert g == [1, 5, 11]
    assert naive_ball_counts(G2, 2) == [1, 5, 11]


def test_ball_matches_naive(G2, G3):
    assert enumerate_ball(G2, 7).gamma == naive_ball_counts(G2, 7)
    assert enumerate_ball(G3, 5).gamma == naive_ball_counts(G3, 5)
    # both brute-force strategies agree
    assert naive_ball_counts(G2, 6, method="action") == naive_ball_counts(G2, 6, method="pairwise")


def test_ball_representatives(G2):
    ball = enumerate_ball(G2, 6)
    words = [w for sph in ball.sphere_words(G2) for w in sph]
    assert len(words) == ball.gamma[-1]
    for m, sph in enumerate(ball.sphere_words(G2)):
        for w in sph:
            assert len(w) == m and G2.reduce(w.letters) == w.letters
    # distinct representatives are pairwise non-equal
    for i, u in enumerate(words):
        for v in words[i + 1:]:
            assert not G2.equals(u, v)


def test_ball_monotone_and_subexponential(G2):
    g = enumerate_ball(G2, 14).gamma
    assert all(a <= b for a, b in zip(g, g[1:]))
    ratios = [math.log(g[n]) / n for n in range(6, 15)]
    assert all(a >= b for a, b in zip(ratios, ratios[1:]))


def test_ball_thread_independent(G3):
    a = enumerate_ball(G3, 5, threads=1, spec_hash="h")
    b = enumerate_ball(G3, 5, threads=4, spec_hash="h")
    assert a.to_json() == b.to_json()


def test_ball_cache_round_trip(G2, tmp_path):
    ball = enumerate_ball(G2, 5, spec_hash="abc")
    p = tmp_path / "ball.json"
    ball.save(p)
    back = BallCache.load(p, "abc")
    assert back.gamma == ball.gamma and back.spheres == ball.spheres
    with pytest.raises(ValidationError):
        BallCache.load(p, "other")
    p.write_text(p.read_text().replace('"version": 1', '"version": 99'))
    with pytest.raises(ValidationError):
        BallCache.load(p)


def test_weight_ball_against_brute_force(G2):
    m = 2.0
    ball = enumerate_weight_ball(G2, m, TAU3)
    max_len = int(m / min(TAU3.tau[:4])) + 1
    L = G2.certified_level(2 * max_len)
    seen = set()
    for ls in reduced_words(G2, max_len):
        w = Word(ls)
        if weight(w, TAU3, G2.data, G2.omega) <= m + 1e-9:
            seen.add(G2.fingerprint(w, L).tobytes())
    assert ball.gamma[-1] == len(seen)
    assert all(a <= b for a, b in zip(ball.gamma, ball.gamma[1:]))


def test_portrait_constants():
    c = portrait_constants(2, TAU3)
    assert c["zeta"] == pytest.approx((1 + TAU3.eta) / 2)
    assert c["K"] >= c["K_zeta"]
    assert c["kappa"] == pytest.approx(TAU3.eta * TAU3.tau[0] / (2 - TAU3.eta))


def test_portrait_leaf_and_errors(G2):
    p = portrait(G2, G2.word("ab"), TAU3)
    assert p.leaves == 1 and p.depth == 0 and p.root.is_leaf
    with pytest.raises(InvalidCutoff):
        portrait(G2, G2.word("ab"), TAU3, K=0.1)
    with pytest.raises(InvalidCutoff):
        portrait(G2, G2.word("ab"), TAU3, zeta=0.5)


def test_portrait_abadac4(G2):
    c = portrait_constants(2, TAU3)
    F = G2.word("abadac" * 4)
    p = portrait(G2, F, TAU3, K=c["K_zeta"], zeta=c["zeta"])
    w = weight(F, TAU3, G2.data, G2.omega)
    assert p.leaves <= leaf_bound(2, TAU3, w, p.K)
    assert portrait_matches(G2, p, p.depth + 2)


def test_portrait_depth_random(G2, rng):
    c = portrait_constants(2, TAU3)
    for _ in range(200):
        w = Word(random_reduced_letters(rng, int(rng.integers(1, 40)), G2.alpha))
        p = portrait(G2, w, TAU3)
        wt = weight(Word(G2.reduce(w.letters)), TAU3, G2.data, G2.omega)
        bound = math.ceil(math.log(max(wt, 1.0)) / -math.log(c["zeta"])) + 1
        assert p.depth <= bound
        if _ < 40:
            assert portrait_matches(G2, p, min(p.depth + 2, 7))


def test_shortening_examples(G2):
    F = G2.word("abadac" * 4)
    rep = check_shortening(G2, F, 3, "23")
    assert rep.level_length == 16 and rep.passed
    assert rep.bound == pytest.approx(2 / 3 * 24 + 2 / 3 + 24)
    assert rep.level_length == 2 * rep.n / 3
    assert check_shortening(G2, F, 3, "34").passed
    empty = check_shortening(G2, Word(()), 3, "34")
    assert empty.level_length == 0 and empty.passed


def test_shortening_preconditions(G2, G3):
    with pytest.raises(PreconditionViolated):
        check_shortening(G2, Word(()), 2, "34")
    with pytest.raises(PreconditionViolated):
        check_shortening(G3, Word(()), 4, "23")


def test_shortening_random(G2, G3, rng):
    for _ in range(150):
        F = random_stabilizer_word(G2, rng, 60, 3)
        for variant in ("34", "23"):
            rep = check_shortening(G2, F, 3, variant)
            assert rep.passed and rep.passed_L
        F = random_stabilizer_word(G3, rng, 40, 4)
        rep = check_shortening(G3, F, 4, "34")
        assert rep.passed and rep.passed_L


def test_lambda_basics(G2):
    setup = lambda_setup(G2)
    assert lambda_word(G2, Word((), 1), setup) == []
    assert [G2.format(Word(tuple(lambda_word(G2, G2.word("a", 1), setup))))] == ["aba"]
    assert len(lambda_compose(G2, [Word((), 1), Word((), 1)])) == 0
    with pytest.raises(PreconditionViolated):
        lambda_compose(G2, [Word((), 0), Word((), 0)])


def _tuples(G, rng, lo, hi, count=100):
    out = set()
    while len(out) < count:
        out.add(tuple(random_reduced_letters(rng, int(rng.integers(lo, hi + 1)), G.alpha) for _ in range(G.q)))
    return sorted(out)


@pytest.mark.parametrize("name", ["G2", "G3"])
def test_lambda_injective_and_short(request, name, rng):
    G = request.getfixturevalue(name)
    q = G.q
    tuples = _tuples(G, rng, 4, 6)
    Fs = [lambda_compose(G, [Word(t, 1) for t in tup]) for tup in tuples]
    for tup, F in zip(tuples, Fs):
        n = max(len(t) for t in tup)
        assert len(F) <= q * (2 * n + 1) + q
    # 50 tuples against 50 others: distinct tuples give distinct elements
    for i in range(50):
        for j in range(50, 100):
            assert not G.equals(Fs[i], Fs[j])


def test_lambda_collisions_differ_by_bounded_factors(G2, rng):
    """Very short tuples may collide; the coordinates then differ by short two-sided factors."""
    tuples = _tuples(G2, rng, 0, 6)
    Fs = [lambda_compose(G2, [Word(t, 1) for t in tup]) for tup in tuples]
    small = [w for sph in enumerate_ball(G2, 4, offset=1).sphere_words(G2) for w in sph]
    pairs = [(i, j) for i in range(100) for j in range(i + 1, 100) if G2.equals(Fs[i], Fs[j])]
    assert len(pairs) <= 0.01 * 100 * 99 / 2
    for i, j in pairs:
        for u, v in zip(tuples[i], tuples[j]):
            u, v = Word(u, 1), Word(v, 1)
            assert any(G2.equals(Word(x.letters + u.letters + y.letters, 1), v) for x in small for y in small)
