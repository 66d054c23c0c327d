import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from finalcorr.formats import (
    BFLOAT16, DLFLOAT, DOUBLE, FORMATS, HALF, HALF_BIAS7, SINGLE, BASE_FORMATS, Binade, Fixed,
    RoundingMode, UnsupportedEncoding, WidthError, decode, encode, fixed_mul, fixed_sub,
    get_format, ulp,
)


def test_table_rows():
    rows = {(f.name, f.precision_n, f.exponent_bits, f.bias) for f in BASE_FORMATS}
    assert rows == {
        ("double", 53, 11, 1023),
        ("single", 24, 8, 127),
        ("half-bias7", 11, 5, 7),
        ("dlfloat", 10, 6, 32),
        ("bfloat16", 8, 8, 127),
    }
    assert HALF.bias == 15 and HALF.precision_n == HALF_BIAS7.precision_n


def test_total_bits():
    assert [f.total_bits for f in (DOUBLE, SINGLE, HALF, DLFLOAT, BFLOAT16)] == [64, 32, 16, 16, 16]


def test_format_validation():
    with pytest.raises(ValueError):
        type(SINGLE)("bad", 1, 8, 127)
    with pytest.raises(ValueError):
        type(SINGLE)("bad", 8, 1, 0)
    with pytest.raises(ValueError):
        get_format("quad")
    assert get_format("SINGLE") is SINGLE


def test_rounding_mode_parse():
    assert RoundingMode.parse("rne") is RoundingMode.NEAREST_EVEN
    assert RoundingMode.parse("toward_zero") is RoundingMode.TOWARD_ZERO
    assert RoundingMode.parse("RU") is RoundingMode.TOWARD_POS_INF
    assert RoundingMode.parse("down") is RoundingMode.TOWARD_NEG_INF
    assert len(RoundingMode) == 4
    with pytest.raises(ValueError):
        RoundingMode.parse("away")


def test_decode_worked_example():
    bits = (127 << 23) | (1 << 22) | (1 << 20)
    d = decode(SINGLE, bits)
    assert d.value(SINGLE) == Fraction(13, 8)


def test_decode_one():
    assert decode(SINGLE, 0x3F800000) == (0, 0, 1 << 23)


def test_decode_bfloat16_one_and_half():
    # 1.5 in bfloat16 is the top half of the single-precision pattern 0x3fc00000
    assert decode(BFLOAT16, 0x3FC0) == (0, 0, 0b11000000)


def test_decode_negative():
    d = decode(SINGLE, 0xBF800000)
    assert d == (1, 0, 1 << 23) and d.value(SINGLE) == -1


@pytest.mark.parametrize("bits", [0x0, 0x00000001, 0x80000000, 0x7F800000, 0x7FC00000, 0xFF800000])
def test_decode_rejects_specials(bits):
    with pytest.raises(UnsupportedEncoding):
        decode(SINGLE, bits)


def test_decode_rejects_wide_encoding():
    with pytest.raises(ValueError):
        decode(HALF, 1 << 16)


def test_encode_validation():
    with pytest.raises(ValueError):
        encode(SINGLE, 0, 0, 1 << 22)
    with pytest.raises(ValueError):
        encode(SINGLE, 2, 0, 1 << 23)
    with pytest.raises(ValueError):
        encode(SINGLE, 0, 128, 1 << 23)


@pytest.mark.parametrize("fmt", [HALF, HALF_BIAS7, DLFLOAT, BFLOAT16], ids=lambda f: f.name)
def test_round_trip_exhaustive_16bit(fmt):
    count = 0
    for bits in range(1 << fmt.total_bits):
        try:
            d = decode(fmt, bits)
        except UnsupportedEncoding:
            continue
        assert encode(fmt, *d) == bits
        count += 1
    assert count == 2 * ((1 << fmt.exponent_bits) - 2) * (1 << fmt.fraction_bits)


@pytest.mark.parametrize("fmt", [SINGLE, DOUBLE], ids=lambda f: f.name)
def test_round_trip_sampled(fmt):
    rng = random.Random(7)
    for _ in range(20000):
        sign = rng.randrange(2)
        e = rng.randint(fmt.e_min, fmt.e_max)
        sig = rng.randrange(fmt.one, 2 * fmt.one)
        assert decode(fmt, encode(fmt, sign, e, sig)) == (sign, e, sig)


def test_ulp_examples():
    assert ulp(SINGLE, 0) == Fraction(1, 2 ** 23)
    assert ulp(SINGLE, -1) == Fraction(1, 2 ** 24)
    assert ulp(HALF, 3) == Fraction(1, 2 ** 7)
    with pytest.raises(ValueError):
        ulp(HALF, 16)


@given(st.integers(-126, 127), st.integers(1 << 23, (1 << 24) - 2))
def test_ulp_is_gap_between_neighbours(e, sig):
    b = Binade(e)
    gap = b.value(SINGLE, sig + 1) - b.value(SINGLE, sig)
    assert gap == ulp(SINGLE, e)


@given(st.fractions(min_value=Fraction(1, 10 ** 6), max_value=10 ** 6))
def test_binade_contains_value(v):
    b = Binade.of(v)
    assert v in b and b.low <= v < 2 * b.low


def test_binade_rejects_non_positive():
    with pytest.raises(ValueError):
        Binade.of(Fraction(0))


def test_fixed_value_and_label():
    x = Fixed(0xC00000, 24, 23)
    assert x.value == Fraction(3, 2)
    assert x.label == "(24,23)"
    assert str(x) == "0xc00000(24,23)"


def test_fixed_width_checks():
    with pytest.raises(WidthError):
        Fixed(16, 4, 0)
    with pytest.raises(WidthError):
        Fixed(1, 65, 0)
    with pytest.raises(WidthError):
        Fixed(-1, 8, 0)
    with pytest.raises(WidthError):
        Fixed(1 << 30, 48, 47).narrow(27)


def test_fixed_mul_examples():
    p = fixed_mul(Fixed(1 << 23, 24, 23), Fixed(1 << 23, 24, 24))
    assert (p.bits, p.total_p, p.frac_f) == (1 << 46, 48, 47) and p.value == Fraction(1, 2)
    q = fixed_mul(Fixed(6, 3, 2), Fixed(6, 3, 2))
    assert (q.bits, q.total_p, q.frac_f) == (36, 6, 4) and q.value == Fraction(9, 4)
    r = fixed_mul(Fixed(0xC00000, 24, 23), Fixed(0xAAAAAB, 24, 24))
    assert r.bits == 0x800000400000 and r.label == "(48,47)"


def test_fixed_mul_overflow_is_reported():
    with pytest.raises(WidthError):
        fixed_mul(Fixed(1, 40, 0), Fixed(1, 25, 0))


def test_fixed_sub():
    a = Fixed(1 << 47, 48, 47)
    assert fixed_sub(a, Fixed(1 << 46, 48, 47)).value == Fraction(1, 2)
    with pytest.raises(ValueError):
        fixed_sub(a, Fixed(1, 48, 46))
    with pytest.raises(WidthError):
        fixed_sub(Fixed(1, 48, 47), a)


@given(st.integers(0, (1 << 48) - 1), st.integers(0, 47), st.integers(0, 47))
def test_slice_law(bits, i, j):
    lo, hi = min(i, j), max(i, j)
    x = Fixed(bits, 48, 47)
    s = x.slice(hi, lo)
    assert s.total_p == hi - lo + 1
    assert s.bits == (bits >> lo) & ((1 << (hi - lo + 1)) - 1)
    assert s.frac_f == 47 - lo


@given(st.integers(0, (1 << 32) - 1), st.integers(1, 32), st.integers(-8, 40),
       st.integers(0, (1 << 32) - 1), st.integers(1, 32), st.integers(-8, 40))
def test_fixed_mul_exact(ab, ap, af, bb, bp, bf):
    a = Fixed(ab % (1 << ap), ap, af)
    b = Fixed(bb % (1 << bp), bp, bf)
    assert fixed_mul(a, b).value == a.value * b.value


def test_formats_registry_names():
    assert set(FORMATS) == {"double", "single", "half-bias7", "dlfloat", "bfloat16", "half"}
