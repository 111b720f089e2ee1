import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinal.errors import NotFactorable, UnknownEpiId, ValidationError
from spinal.omega import (
    OmegaSequence,
    factor_complete,
    is_admissible,
    is_complete,
    minimal_homogeneity,
)
from spinal.presets import grigorchuk2

DATA, _ = grigorchuk2()


def window_oracle(om, r, horizon=60):
    """Every length-r window starting in 1..horizon is complete."""
    return all(is_complete(om.terms(s, r), DATA) for s in range(1, horizon + 1))


def greedy_oracle(om, horizon):
    out, i = [], 1
    while i <= horizon:
        n = 1
        while not is_complete(om.terms(i, n), DATA):
            n += 1
        out.append(n)
        i += n
    return out


def test_parse_forms():
    assert OmegaSequence.parse("012").period == ("0", "1", "2")
    om = OmegaSequence.parse("0(12)")
    assert om.prefix == ("0",) and om.period == ("1", "2")
    assert OmegaSequence.parse("0|12") == om
    assert str(om) == "0(12)"
    with pytest.raises(ValidationError):
        OmegaSequence((), ())


def test_at_is_one_indexed():
    om = OmegaSequence.parse("0(12)")
    assert [om.at(i) for i in range(1, 6)] == ["0", "1", "2", "1", "2"]
    with pytest.raises(IndexError):
        om.at(0)


def test_shift_examples():
    om = OmegaSequence.parse("012")
    assert om.shift(0).terms(1, 20) == om.terms(1, 20)
    assert om.shift(3).terms(1, 20) == om.terms(1, 20)
    s = OmegaSequence.parse("0(12)").shift(1)
    assert s.prefix == () and s.period == ("1", "2")


@given(st.integers(0, 30), st.integers(0, 30), st.sampled_from(["012", "0(12)", "01(120)", "2210(012)"]))
def test_shift_composition(a, b, text):
    om = OmegaSequence.parse(text)
    assert om.shift(a).shift(b).terms(1, 100) == om.shift(a + b).terms(1, 100)
    assert om.shift(a).shift(b).offset == a + b


@given(st.integers(0, 20), st.sampled_from(["012", "0", "01", "0(12)", "11(0122)", "0120"]))
def test_admissibility_shift_invariant(k, text):
    om = OmegaSequence.parse(text)
    assert is_admissible(om.shift(k), DATA) == is_admissible(om, DATA)


def test_admissibility_examples():
    assert is_admissible(OmegaSequence.parse("012"), DATA)
    assert not is_admissible(OmegaSequence.parse("0"), DATA)
    assert not is_admissible(OmegaSequence.parse("01"), DATA)
    with pytest.raises(UnknownEpiId):
        is_admissible(OmegaSequence.parse("013"), DATA)


def test_completeness():
    assert is_complete("012", DATA)
    assert not is_complete("01", DATA)
    for seg in ("0", "1", "00", "12", "20"):  # length <= q
        assert not is_complete(seg, DATA)


def test_minimal_homogeneity():
    assert minimal_homogeneity(OmegaSequence.parse("012"), DATA, 10) == 3
    om = OmegaSequence.parse("0120")
    r = minimal_homogeneity(om, DATA, 10)
    assert r == 4
    assert window_oracle(om, r) and not window_oracle(om, r - 1)
    assert minimal_homogeneity(OmegaSequence.parse("0"), DATA, 10) is None


@given(st.text(alphabet="012", min_size=1, max_size=7), st.text(alphabet="012", max_size=3))
def test_homogeneity_matches_window_scan(period, prefix):
    om = OmegaSequence(prefix, period)
    r = minimal_homogeneity(om, DATA, 12)
    if r is None:
        assert not window_oracle(om, 12)
    else:
        assert window_oracle(om, r)
        assert r == 1 or not window_oracle(om, r - 1)


def test_factor_complete():
    om = OmegaSequence.parse("012")
    assert factor_complete(om, DATA, 3, 9) == [3, 3, 3]
    with pytest.raises(NotFactorable):
        factor_complete(om, DATA, 2, 9)
    om = OmegaSequence.parse("011022")
    blocks = factor_complete(om, DATA, 6, 24)
    assert max(blocks) <= 6
    assert blocks == greedy_oracle(om, 24)
