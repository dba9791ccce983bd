"""Sparse multivariate polynomials: arithmetic, difference calculus, falling bases."""

import random
from fractions import Fraction

import oracles as O
from orthodiff import (
    Poly,
    delta,
    falling_decomp,
    falling_poly,
    hyper_poly,
    nabla,
    neg_falling,
    shift_poly,
)


def random_poly(rng, nvars, deg=3, nterms=5):
    p = Poly.zero(nvars)
    for _ in range(nterms):
        exps = tuple(rng.randint(0, deg) for _ in range(nvars))
        p = p + Poly.monomial(nvars, exps, O.random_fraction(rng))
    return p


def sample_points(rng, nvars, count=6):
    return [tuple(rng.randint(-3, 4) for _ in range(nvars)) for _ in range(count)]


def as_terms(p):
    return O.terms_from_obj(p.to_obj())


def test_evaluation_is_a_ring_homomorphism():
    rng = random.Random(21)
    for nvars in (1, 2, 3):
        for _ in range(20):
            p = random_poly(rng, nvars)
            q = random_poly(rng, nvars)
            tp, tq = as_terms(p), as_terms(q)
            tsum, tprod = as_terms(p + q), as_terms(p * q)
            for x in sample_points(rng, nvars):
                assert O.peval(tsum, x) == O.peval(tp, x) + O.peval(tq, x)
                assert O.peval(tprod, x) == O.peval(tp, x) * O.peval(tq, x)


def test_scalar_and_subtraction_operations():
    rng = random.Random(22)
    p = random_poly(rng, 2)
    tp = as_terms(p)
    c = Fraction(3, 7)
    for x in sample_points(rng, 2):
        assert O.peval(as_terms(p * c), x) == O.peval(tp, x) * c
        assert O.peval(as_terms(p - p), x) == 0
    assert (p - p).is_zero()


def test_shift_poly_translates_argument():
    rng = random.Random(23)
    for nvars in (1, 2):
        for _ in range(15):
            p = random_poly(rng, nvars)
            i = rng.randint(0, nvars - 1)
            h = rng.randint(-3, 3)
            shifted = as_terms(shift_poly(p, i, h))
            tp = as_terms(p)
            for x in sample_points(rng, nvars):
                moved = list(x)
                moved[i] += h
                assert O.peval(shifted, x) == O.peval(tp, tuple(moved))


def test_delta_nabla_pointwise_definitions():
    rng = random.Random(24)
    for _ in range(15):
        p = random_poly(rng, 2)
        tp = as_terms(p)
        for i in (0, 1):
            dfwd = as_terms(delta(p, i))
            dbwd = as_terms(nabla(p, i))
            for x in sample_points(rng, 2):
                up = list(x)
                up[i] += 1
                down = list(x)
                down[i] -= 1
                assert O.peval(dfwd, x) == O.peval(tp, tuple(up)) - O.peval(tp, x)
                assert O.peval(dbwd, x) == O.peval(tp, x) - O.peval(tp, tuple(down))


def test_falling_poly_values():
    for k in range(6):
        p = as_terms(falling_poly(1, 0, k))
        for x in range(-2, 7):
            assert O.peval(p, (x,)) == O.fall(x, k)


def test_neg_falling_is_pochhammer_of_negated_variable():
    for k in range(5):
        p = as_terms(neg_falling(2, 1, k))
        for x in range(-2, 6):
            assert O.peval(p, (0, x)) == O.rising(-x, k)


def test_falling_decomp_reconstructs_polynomial():
    rng = random.Random(25)
    for nvars in (1, 2):
        for _ in range(12):
            p = random_poly(rng, nvars)
            decomp = falling_decomp(p)
            rebuilt = Poly.zero(nvars)
            for exps, coeff in decomp.items():
                factor = Poly.const(nvars, coeff)
                for var, k in enumerate(exps):
                    factor = factor * falling_poly(nvars, var, k)
                rebuilt = rebuilt + factor
            assert (rebuilt - p).is_zero()


def test_hyper_poly_matches_termwise_series():
    p = hyper_poly([Fraction(-2), Fraction(5)], [Fraction(3, 2)], Fraction(1), 2)
    tp = as_terms(p)
    for x in range(5):
        want = sum(
            O.rising(-2, k) * O.rising(5, k) * O.rising(-x, k)
            / (O.rising(Fraction(3, 2), k) * O.fact(k))
            for k in range(3)
        )
        assert O.peval(tp, (x,)) == want


def test_degree_and_serialization_round_trip():
    rng = random.Random(26)
    for _ in range(10):
        p = random_poly(rng, 2)
        again = Poly.from_obj(p.to_obj())
        assert (again - p).is_zero()
        if not p.is_zero():
            assert p.degree() == max(sum(e) for e in as_terms(p))
