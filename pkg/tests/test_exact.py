import pytest
from hypothesis import given, settings, strategies as st

from qcduality.exact import (RationalParseError, det_bareiss, det_laplace, format_scalar, mpq, parse_rational,
                             pdegree, pdivmod, peval, pfrom_roots, pgcd, pinterp, pmul, padd, ptrim)

rationals = st.builds(lambda a, b: mpq(a, b), st.integers(-9, 9), st.integers(1, 5))


def test_parse_rational_round_trip():
    for text in ["3", "-7/4", "0", "12/8"]:
        v = parse_rational(text)
        assert parse_rational(format_scalar(v)) == v
    assert parse_rational("12/8") == mpq(3, 2)
    for bad in ["1/0", "a/b", "", "1.5/2"]:
        with pytest.raises(RationalParseError):
            parse_rational(bad)


@settings(max_examples=200, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=5), st.lists(rationals, min_size=1, max_size=3))
def test_division_identity(a, b):
    if all(c == 0 for c in b):
        return
    quo, rem = pdivmod(a, b)
    assert ptrim(padd(pmul(quo, b), rem)) == ptrim(a)
    assert pdegree(rem) < pdegree(b)


@settings(max_examples=200, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=3, unique=True), st.lists(rationals, min_size=1, max_size=3))
def test_gcd_finds_common_roots(common, extra):
    a = pfrom_roots(common + extra[:1], one=mpq(1))
    b = pfrom_roots(common + [r + 11 for r in extra[1:]], one=mpq(1))
    g = pgcd(a, b)
    assert g[-1] == 1
    assert all(peval(g, r) == 0 for r in common)
    assert pdegree(g) >= len(common)


def test_gcd_detects_repeated_root():
    q = pfrom_roots([mpq(1), mpq(1), mpq(-2, 3)], one=mpq(1))
    dq = [k * c for k, c in enumerate(q)][1:]
    assert pgcd(q, dq) == [mpq(-1), mpq(1)]


@settings(max_examples=200, deadline=None)
@given(st.lists(rationals, min_size=9, max_size=9))
def test_determinant_routes_agree(entries):
    m = [entries[0:3], entries[3:6], entries[6:9]]
    assert det_bareiss(m) == det_laplace(m)


def test_interpolation_recovers_polynomial():
    p = [mpq(3), mpq(-1, 2), mpq(0), mpq(5, 7)]
    xs = [mpq(k) for k in range(4)]
    assert pinterp(xs, [peval(p, x) for x in xs]) == p
