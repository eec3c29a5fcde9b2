import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vilentropy.errors import InputError
from vilentropy.radix_group import (
    Digits,
    GroupPoint,
    ParityClass,
    RadixSequence,
    classify,
    digit_matrix,
    digits_of,
    neg,
    ominus,
    oplus,
    parse_radix,
)

PATTERNS = [(2,), (3,), (4,), (2, 3), (5, 2, 3)]
patterns = st.sampled_from(PATTERNS).map(RadixSequence)


def test_partial_products():
    r = parse_radix("2,3")
    assert [r.P(k) for k in range(6)] == [1, 2, 6, 12, 36, 72]
    assert r.depth_for(0) == 0
    assert r.depth_for(5) == 2
    assert r.depth_for(6) == 3
    assert r.period_lcm == 6


def test_parse_radix_forms():
    assert parse_radix("3").pattern == (3,)
    assert parse_radix(" 2, 3 ").pattern == (2, 3)
    assert parse_radix(4).pattern == (4,)
    assert parse_radix([2, 5]).pattern == (2, 5)
    for bad in ("", "1", "a,2", "2,0"):
        with pytest.raises(InputError):
            parse_radix(bad)


def test_digits_examples():
    r3 = RadixSequence.constant(3)
    assert digits_of(0, r3).entries == ()
    assert digits_of(23, r3).entries == (2, 1, 2)
    assert digits_of(23, r3).value == 23
    with pytest.raises(InputError):
        Digits((1, 0), r3)
    with pytest.raises(InputError):
        Digits((3,), r3)
    with pytest.raises(InputError):
        digits_of(-1, r3)


def test_negation_examples():
    r3 = RadixSequence.constant(3)
    assert neg(23, r3) == 16
    assert neg(24, r3) == 12
    assert neg(27, r3) == 54
    r4 = RadixSequence.constant(4)
    assert neg(2, r4) == 2
    assert classify(2, r4) is ParityClass.M


def test_group_point_roundtrip():
    r = parse_radix("2,3")
    x = GroupPoint.from_code(11, r, depth=4)
    assert x.entries == (1, 2, 1, 0)
    assert x.code == 11
    with pytest.raises(InputError):
        GroupPoint((2,), r)


def test_digit_matrix_matches_scalar():
    r = parse_radix("2,3")
    D = digit_matrix(range(36), r, 4)
    for c in range(36):
        raw = list(digits_of(c, r).entries) + [0] * 4
        assert list(D[c]) == raw[:4]


@settings(max_examples=300, deadline=None)
@given(patterns, st.integers(0, 10**9), st.integers(0, 10**9), st.integers(0, 10**9))
def test_group_laws(r, a, b, c):
    assert oplus(a, b, r) == oplus(b, a, r)
    assert oplus(oplus(a, b, r), c, r) == oplus(a, oplus(b, c, r), r)
    assert oplus(a, 0, r) == a
    assert oplus(a, neg(a, r), r) == 0
    assert ominus(a, b, r) == oplus(a, neg(b, r), r)
    assert neg(neg(a, r), r) == a


@settings(max_examples=300, deadline=None)
@given(patterns, st.integers(0, 10**12))
def test_class_rules_agree(r, n):
    assert classify(n, r, "fast") is classify(n, r, "direct")


@settings(max_examples=200, deadline=None)
@given(patterns, st.integers(1, 10**9))
def test_class_swaps_under_negation(r, n):
    c, cn = classify(n, r), classify(neg(n, r), r)
    swap = {ParityClass.K: ParityClass.L, ParityClass.L: ParityClass.K, ParityClass.M: ParityClass.M}
    assert cn is swap[c]


def test_odd_radix_has_trivial_M():
    r = RadixSequence.constant(3)
    assert [n for n in range(3**6) if classify(n, r) is ParityClass.M] == [0]


def test_classify_rejects_bad_method():
    with pytest.raises(InputError):
        classify(3, RadixSequence.constant(3), "slow")
