from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from finalcorr import oracle
from finalcorr.formats import HALF, SINGLE, RoundingMode, decode, encode
from finalcorr.oracle import (
    OracleRangeError, OracleStats, correctly_rounded_div, correctly_rounded_recip,
    correctly_rounded_sqrt, round_exact,
)

MODES = list(RoundingMode)
DIRECTED = [RoundingMode.TOWARD_ZERO, RoundingMode.TOWARD_POS_INF, RoundingMode.TOWARD_NEG_INF]


def test_one_tenth_single():
    # host float32 gives 0x3dcccccd
    assert round_exact(Fraction(1, 10), SINGLE) == (0xCCCCCD, -4)


@pytest.mark.parametrize("mode", MODES)
def test_representable_is_exact(mode):
    assert round_exact(Fraction(3, 2), SINGLE, mode).value(SINGLE) == Fraction(3, 2)
    p2 = type(SINGLE)("p2", 2, 8, 127)
    assert round_exact(Fraction(3, 2), p2, mode).value(p2) == Fraction(3, 2)


def test_midpoint_rounds_to_even():
    stats = OracleStats()
    assert round_exact(1 + Fraction(1, 2 ** 24), SINGLE, stats=stats) == (1 << 23, 0)
    assert round_exact(1 + Fraction(3, 2 ** 24), SINGLE) == ((1 << 23) + 2, 0)
    assert stats.ties == 1 and stats.calls == 1


def test_directed_modes_one_tenth():
    assert round_exact(Fraction(1, 10), SINGLE, RoundingMode.TOWARD_ZERO).significand == 0xCCCCCC
    assert round_exact(Fraction(1, 10), SINGLE, RoundingMode.TOWARD_NEG_INF).significand == 0xCCCCCC
    assert round_exact(Fraction(1, 10), SINGLE, RoundingMode.TOWARD_POS_INF).significand == 0xCCCCCD


def test_carry_into_next_binade():
    v = 2 - Fraction(1, 2 ** 30)
    assert round_exact(v, SINGLE) == (1 << 23, 1)


def test_range_errors():
    with pytest.raises(OracleRangeError):
        round_exact(Fraction(1, 2 ** 130), SINGLE)
    with pytest.raises(OracleRangeError):
        round_exact(Fraction(2 ** 128), SINGLE)
    with pytest.raises(ValueError):
        round_exact(Fraction(-1), SINGLE)


def test_recip_examples():
    assert correctly_rounded_recip(1, SINGLE) == 1
    assert correctly_rounded_recip(2, SINGLE) == Fraction(1, 2)
    x = Fraction(0xAAAAAA, 2 ** 23)
    # host float32 1/x gives significand 0xc00001 with exponent -1
    assert correctly_rounded_recip(x, SINGLE) == Fraction(0xC00001, 2 ** 24)


def test_recip_rejects_unrepresentable_input():
    with pytest.raises(ValueError):
        correctly_rounded_recip(Fraction(1, 3), SINGLE)


def test_div_and_sqrt_examples():
    assert correctly_rounded_div(Fraction(15, 8), Fraction(3, 2), SINGLE) == Fraction(5, 4)
    assert correctly_rounded_sqrt(4, SINGLE) == 2
    # host float32 sqrt(2) has significand 0xb504f3; sqrt(2)*2**23 = 11863283.203...
    assert correctly_rounded_sqrt(2, SINGLE) == Fraction(0xB504F3, 2 ** 23)
    assert correctly_rounded_sqrt(2, SINGLE, RoundingMode.TOWARD_POS_INF) == Fraction(0xB504F4, 2 ** 23)


@settings(max_examples=300)
@given(st.integers(1 << 23, (1 << 24) - 1), st.integers(1 << 23, (1 << 24) - 1))
def test_monotone(a, b):
    lo, hi = sorted((Fraction(a, 1 << 23), Fraction(b, 1 << 23)))
    for mode in MODES:
        assert correctly_rounded_sqrt(lo, SINGLE, mode) <= correctly_rounded_sqrt(hi, SINGLE, mode)
        assert correctly_rounded_recip(lo, SINGLE, mode) >= correctly_rounded_recip(hi, SINGLE, mode)


@settings(max_examples=300)
@given(st.fractions(min_value=Fraction(1, 2 ** 100), max_value=2 ** 100))
def test_directed_bracketing(v):
    lo = round_exact(v, SINGLE, RoundingMode.TOWARD_NEG_INF).value(SINGLE)
    hi = round_exact(v, SINGLE, RoundingMode.TOWARD_POS_INF).value(SINGLE)
    rz = round_exact(v, SINGLE, RoundingMode.TOWARD_ZERO).value(SINGLE)
    rn = round_exact(v, SINGLE).value(SINGLE)
    assert lo <= v <= hi and rz == lo
    assert lo <= rn <= hi
    if lo == hi:
        assert lo == v
    else:
        assert hi == round_exact(lo + Fraction(1, 2 ** 200), SINGLE, RoundingMode.TOWARD_POS_INF).value(SINGLE)
    assert abs(rn - v) <= (hi - lo) / 2


@settings(max_examples=300)
@given(st.integers(1, 2 ** 40), st.integers(1, 2 ** 40))
def test_nearest_is_nearest(p, q):
    v = Fraction(p, q)
    rn = round_exact(v, SINGLE).value(SINGLE)
    lo = round_exact(v, SINGLE, RoundingMode.TOWARD_NEG_INF).value(SINGLE)
    hi = round_exact(v, SINGLE, RoundingMode.TOWARD_POS_INF).value(SINGLE)
    assert abs(rn - v) == min(v - lo, hi - v)


def test_significand_helpers():
    assert oracle.recip_significand(0xAAAAAA, 24) == 0xC00001
    assert oracle.div_significand(15, 12, 4) == (10, 3)
    assert oracle.div_significand(12, 15, 4) == (13, 4)  # 0.8 -> 13/16
    assert oracle.sqrt_significand(9, 2, 4) == 12  # sqrt(2.25) = 1.5
    with pytest.raises(ValueError):
        oracle.sqrt_significand(9, 3, 4)


@pytest.mark.parametrize("mode", MODES)
def test_recip_bulk_matches_scalar(mode):
    n = 11
    x = np.arange((1 << 10) + 1, 1 << 11)
    y, ties = oracle.recip_bulk(x, n, mode)
    assert [oracle.recip_significand(int(v), n, mode) for v in x] == y.tolist()
    assert not ties.any()


@pytest.mark.parametrize("mode", MODES)
def test_div_bulk_matches_scalar(mode):
    n = 7
    vals = np.arange(1 << 6, 1 << 7)
    a, b = (m.ravel() for m in np.meshgrid(vals, vals, indexing="ij"))
    q, frac, ties = oracle.div_bulk(a, b, n, mode)
    want = [oracle.div_significand(int(i), int(j), n, mode) for i, j in zip(a, b)]
    assert list(zip(q.tolist(), frac.tolist())) == want
    assert not ties.any()


@pytest.mark.parametrize("mode", MODES)
def test_sqrt_bulk_matches_scalar(mode):
    n = 11
    x = np.arange(1 << 10, 1 << 11)
    for scale in (1, 2):
        y, ties = oracle.sqrt_bulk(x, scale, n, mode)
        want = []
        for v in x:
            try:
                want.append(oracle.sqrt_significand(int(v), scale, n, mode))
            except ValueError:
                # rounding up carried into [2, 4); the bulk path reports 2**n
                want.append(1 << n)
        assert want == y.tolist()
        assert not ties.any()


@settings(max_examples=200)
@given(st.integers(1 << 23, (1 << 24) - 1), st.sampled_from(MODES))
def test_bulk_single_precision_sampled(x, mode):
    y, _ = oracle.recip_bulk(np.array([x]), 24, mode)
    if x != 1 << 23:
        assert int(y[0]) == oracle.recip_significand(x, 24, mode)
    s, _ = oracle.sqrt_bulk(np.array([x]), 2, 24, mode)
    try:
        want = oracle.sqrt_significand(x, 2, 24, mode)
    except ValueError:
        want = 1 << 24
    assert int(s[0]) == want


def test_isqrt_bulk_exact():
    v = np.array([0, 1, 2, 3, 4, 15, 16, 17, (1 << 52) - 1, (1 << 50) + 12345])
    from math import isqrt
    assert oracle.isqrt_bulk(v).tolist() == [isqrt(int(i)) for i in v]


def test_bulk_precision_limit():
    with pytest.raises(ValueError):
        oracle.recip_bulk(np.array([3]), 25)


def test_half_encodings_through_oracle():
    x = decode(HALF, encode(HALF, 0, 3, 0x600))
    # 1/12 = 0x555.55../2**14 rounds down to 0x555
    assert correctly_rounded_recip(x.value(HALF), HALF) == Fraction(0x555, 2 ** 14)
