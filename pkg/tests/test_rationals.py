"""Exact scalar layer: parsing, formatting, Gaussian rationals, factorial helpers."""

import random
from fractions import Fraction

import pytest

import oracles as O
from orthodiff import (
    GaussRat,
    as_fraction,
    demote,
    falling,
    fmt_scalar,
    is_real_scalar,
    parse_scalar,
    pochhammer,
    stirling2,
)


def test_parse_plain_rationals():
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert parse_scalar("-7") == Fraction(-7)
    assert parse_scalar("0") == 0


def test_parse_gaussian_forms():
    z = parse_scalar("1-2/3*i")
    assert isinstance(z, GaussRat)
    assert z.re == 1 and z.im == Fraction(-2, 3)
    assert parse_scalar("i") == GaussRat(0, 1)
    assert parse_scalar("-i") == GaussRat(0, -1)


def test_parse_rejects_decimals_and_noise():
    for bad in ("0.5", "1e-3", "3,4", "", "one"):
        with pytest.raises(ValueError):
            parse_scalar(bad)


def test_fmt_parse_round_trip_seeded():
    rng = random.Random(7)
    for _ in range(200):
        re = Fraction(rng.randint(-40, 40), rng.randint(1, 12))
        im = Fraction(rng.randint(-40, 40), rng.randint(1, 12))
        for value in (re, GaussRat(re, im)):
            value = demote(value)
            assert parse_scalar(fmt_scalar(value)) == value


def test_gauss_rat_arithmetic_matches_complex():
    rng = random.Random(11)
    for _ in range(100):
        a = GaussRat(O.random_fraction(rng), O.random_fraction(rng))
        b = GaussRat(O.random_fraction(rng), O.random_fraction(rng))
        ca = complex(a.re) + 1j * complex(a.im)
        cb = complex(b.re) + 1j * complex(b.im)
        for got, want in (
            (a + b, ca + cb),
            (a - b, ca - cb),
            (a * b, ca * cb),
        ):
            got = GaussRat(Fraction(got), 0) if not isinstance(got, GaussRat) else got
            assert abs(complex(got.re) + 1j * complex(got.im) - want) < 1e-9
        if not (b.re == 0 and b.im == 0):
            q = a / b
            q = GaussRat(Fraction(q), 0) if not isinstance(q, GaussRat) else q
            assert abs((complex(q.re) + 1j * complex(q.im)) - ca / cb) < 1e-9


def test_demote_collapses_real_gaussians():
    assert demote(GaussRat(Fraction(5, 2), 0)) == Fraction(5, 2)
    assert isinstance(demote(GaussRat(Fraction(5, 2), 0)), Fraction)
    z = GaussRat(1, 1)
    assert demote(z) is z


def test_real_product_of_conjugates_demotes():
    z = GaussRat(Fraction(2, 3), Fraction(1, 5))
    w = GaussRat(Fraction(2, 3), Fraction(-1, 5))
    prod = z * w
    assert is_real_scalar(prod)
    assert as_fraction(prod) == Fraction(2, 3) ** 2 + Fraction(1, 5) ** 2


def test_as_fraction_rejects_nonreal():
    with pytest.raises(ValueError):
        as_fraction(GaussRat(1, 1))


def test_falling_and_pochhammer_against_loops():
    rng = random.Random(3)
    for _ in range(100):
        a = O.random_fraction(rng)
        n = rng.randint(0, 8)
        assert falling(a, n) == O.fall(a, n)
        assert pochhammer(a, n) == O.rising(a, n)


def test_pochhammer_falling_reflection():
    rng = random.Random(5)
    for _ in range(60):
        a = O.random_fraction(rng)
        n = rng.randint(0, 7)
        assert pochhammer(a, n) == (-1) ** n * falling(-a, n)


def test_stirling2_small_table():
    table = {
        (0, 0): 1,
        (1, 1): 1,
        (4, 2): 7,
        (5, 3): 25,
        (6, 3): 90,
        (3, 0): 0,
        (2, 3): 0,
    }
    for (n, k), want in table.items():
        assert stirling2(n, k) == want


def test_stirling2_rebuilds_powers_from_falling_factorials():
    rng = random.Random(9)
    for _ in range(50):
        x = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        n = rng.randint(0, 9)
        rebuilt = sum(stirling2(n, k) * O.fall(x, k) for k in range(n + 1))
        assert rebuilt == x ** n
