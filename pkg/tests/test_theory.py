from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from finalcorr import theory
from finalcorr.formats import Binade, FpFormat, decode, encode
from finalcorr.theory import (
    ScanLimits, VerdictKind, classify_exact, classify_sqrt, quotient_exponent, reciprocal_exponent,
    scan_division_midpoints, scan_reciprocal_midpoints, scan_sqrt_midpoints,
)


def test_classify_examples():
    assert classify_exact(Fraction(1, 10), 24).kind is VerdictKind.INFINITE_EXPANSION
    v = classify_exact(Fraction(5, 4), 2)
    assert v.kind is VerdictKind.MIDPOINT and v.precision == 2
    for m in (1, 2, 24, 53):
        assert classify_exact(Fraction(1), m).kind is VerdictKind.REPRESENTABLE
    assert classify_exact(Fraction(9, 8), 2).kind is VerdictKind.FINITE_EXPANSION
    assert classify_exact(Fraction(9, 8), 2).bits == 4


def test_classify_rejects_bad_values():
    with pytest.raises(ValueError):
        classify_exact(Fraction(0), 4)
    with pytest.raises(ValueError):
        classify_exact(Fraction(-1, 2), 4)


def test_classify_sqrt():
    assert classify_sqrt(Fraction(9, 4), 2).kind is VerdictKind.REPRESENTABLE
    v = classify_sqrt(Fraction(9, 8), 4)
    assert v.kind is VerdictKind.INFINITE_EXPANSION and v.irrational
    assert classify_sqrt(Fraction(1), 8).kind is VerdictKind.REPRESENTABLE


@given(st.integers(1, 2 ** 30), st.integers(-40, 40), st.integers(2, 40))
def test_midpoint_iff_representable_one_bit_later(num, e, m):
    v = Fraction(num) * Fraction(2) ** e
    kind = classify_exact(v, m).kind
    at_m = kind is VerdictKind.REPRESENTABLE
    at_m1 = classify_exact(v, m + 1).kind is VerdictKind.REPRESENTABLE
    assert (kind is VerdictKind.MIDPOINT) == (at_m1 and not at_m)


@given(st.integers(1, 2 ** 20), st.integers(1, 2 ** 20), st.integers(2, 16))
def test_representable_round_trips_through_encoding(p, q, m):
    v = Fraction(p, q)
    if classify_exact(v, m).kind is not VerdictKind.REPRESENTABLE:
        return
    fmt = FpFormat(f"p{m}", m, 10, 511)
    e = Binade.of(v).exponent
    sig = v / Binade(e).low * fmt.one
    assert sig.denominator == 1
    assert decode(fmt, encode(fmt, 0, e, int(sig))).value(fmt) == v


@given(st.integers(1, 2 ** 20), st.integers(1, 2 ** 20), st.integers(2, 16))
def test_midpoint_lies_between_neighbours(p, q, m):
    v = Fraction(p, q)
    if classify_exact(v, m).kind is not VerdictKind.MIDPOINT:
        return
    b = Binade.of(v)
    step = b.low / 2 ** (m - 1)
    assert (v - b.low) / step - Fraction(1, 2) == int((v - b.low) / step)


def test_reciprocal_scan_examples():
    r = scan_reciprocal_midpoints(8, 8)
    assert r.inputs_scanned == 127 and not r.midpoint_hits and not r.exact_hits
    r = scan_reciprocal_midpoints(4, 24)
    assert not r.midpoint_hits and not r.exact_hits
    r = scan_reciprocal_midpoints(2, 2)
    assert r.inputs_scanned == 1
    assert classify_exact(Fraction(2, 3), 2).kind is VerdictKind.INFINITE_EXPANSION


def test_division_scan_examples():
    assert not scan_division_midpoints(4, 3).midpoint_hits
    r = scan_division_midpoints(8, 8)
    assert r.inputs_scanned == 127 * 126 and not r.midpoint_hits


def test_division_witness():
    r = scan_division_midpoints(4, 2)
    pairs = {(w.A, w.B) for w in r.midpoint_hits}
    assert (0b1111, 0b1100) in pairs
    w = next(w for w in r.midpoint_hits if (w.A, w.B) == (15, 12))
    assert Fraction(w.A, w.B) == Fraction(5, 4)
    assert w.C == 2 and w.boundary and w.e == 0
    # re-verify every witness independently
    for w in r.midpoint_hits:
        assert classify_exact(Fraction(w.A, w.B), 2).kind is VerdictKind.MIDPOINT


def test_division_witnesses_below_n_minus_1():
    r = {(w.A, w.B): w for w in scan_division_midpoints(6, 3).midpoint_hits}
    # 1.6875 / 1.5 = 1.125 sits just above the power of two
    assert r[(54, 48)].boundary
    # 33/48 = 0.6875 lies between 0.625 and 0.75
    assert not r[(33, 48)].boundary and r[(33, 48)].C == 5


def test_sqrt_scan_examples():
    r = scan_sqrt_midpoints(8)
    assert not r.midpoint_hits and r.inputs_scanned == 2 * 127
    assert classify_sqrt(Fraction(1), 8).kind is VerdictKind.REPRESENTABLE
    assert classify_sqrt(Fraction(0b1001, 8), 4).irrational


def test_sqrt_scan_finds_exact_roots():
    # 2.25 = 1.5**2 is in the upper binade at n = 4 (A = 9, scale 2 -> 18/8)
    r = scan_sqrt_midpoints(4)
    assert any(w.A == 9 and w.scale == 2 for w in r.exact_hits)


def test_scan_limits():
    with pytest.raises(ValueError):
        scan_division_midpoints(11, 11)
    assert scan_division_midpoints(3, 3, ScanLimits(div=3)).inputs_scanned == 6
    with pytest.raises(ValueError):
        scan_reciprocal_midpoints(4, 1)


def test_exponent_helpers():
    assert reciprocal_exponent(0, True) == 0
    assert reciprocal_exponent(0, False) == -1
    assert reciprocal_exponent(3, False) == -4
    assert quotient_exponent(0, 0, 5, 5) == 0
    assert quotient_exponent(2, 0, 4, 5) == 1
    assert quotient_exponent(0, 0, 12, 10) == 0


def test_report_serialisation():
    r = scan_division_midpoints(4, 2)
    lines = r.to_csv().splitlines()
    assert lines[0] == "operation,n,m,A,B,verdict"
    assert "div,4,2,15,12,midpoint" in lines
    text = r.to_text()
    assert "midpoints=1" in text and "boundary 1" in text


def test_report_merge():
    a, b = scan_division_midpoints(4, 2), scan_division_midpoints(4, 2)
    a.merge(b)
    assert a.inputs_scanned == 84 and len(a.midpoint_hits) == 2
