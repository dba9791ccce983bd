"""Tests for the polynomial family constructors.

Pinned polynomial coefficients and eigenvalues are checked against the
independent series and weight oracles in oracles.py, which were written
before these assertions were frozen.
"""

import random
from fractions import Fraction as F

import pytest

import oracles as O
from orthodiff import (
    ALL_KINDS,
    FamilyError,
    FamilySpec,
    GaussRat,
    build_system,
    norm_ratio,
    product_system,
    product_type_enumeration,
    r_recurrence_coeffs,
)


def poly_terms(p):
    return O.terms_from_obj(p.to_obj())


def eval_poly(p, x):
    return O.peval(poly_terms(p), x)


def test_kind_registry_is_complete():
    assert len(ALL_KINDS) == 11
    assert set(ALL_KINDS) == {
        "hahn",
        "r",
        "charlier",
        "krawtchouk",
        "meixner",
        "grid-r",
        "box-hahn",
        "simplex-hahn",
        "trunc-simplex-hahn",
        "krawtchouk-d",
        "meixner-d",
    }


# ---------------------------------------------------------------------------
# Pinned small polynomials
# ---------------------------------------------------------------------------


def test_hahn_small_polys_pinned():
    sys = build_system(FamilySpec("hahn", alpha=F(0), beta=F(0), N=2))
    q1 = poly_terms(sys.poly((1,)))
    q2 = poly_terms(sys.poly((2,)))
    assert q1 == {(0,): F(1), (1,): F(-1)}
    assert q2 == {(0,): F(1), (1,): F(-6), (2,): F(3)}


def test_r_small_poly_pinned():
    sys = build_system(FamilySpec("r", alpha1=F(0), alpha2=F(0), alpha3=F(6)))
    r1 = poly_terms(sys.poly((1,)))
    assert r1 == {(0,): F(1), (1,): F(-4)}


def test_charlier_small_poly_pinned():
    sys = build_system(FamilySpec("charlier", s=F(2)))
    c2 = poly_terms(sys.poly((2,)))
    assert c2 == {(0,): F(1), (1,): F(-5, 4), (2,): F(1, 4)}


def test_simplex_small_poly_pinned():
    spec = FamilySpec("simplex-hahn", d=2, sigma=(F(0), F(0), F(0)), N=2)
    sys = build_system(spec)
    p = poly_terms(sys.poly((1, 0)))
    assert p == {(0, 0): F(-1, 2), (1, 0): F(3, 4)}


# ---------------------------------------------------------------------------
# Series oracle comparisons for the one-variable kinds
# ---------------------------------------------------------------------------


def test_hahn_polys_match_series_oracle():
    a, b, N = F(1, 2), F(1, 3), 5
    sys = build_system(FamilySpec("hahn", alpha=a, beta=b, N=N))
    for n in range(N + 1):
        p = sys.poly((n,))
        for x in range(N + 1):
            assert eval_poly(p, (x,)) == O.hahn_value(n, a, b, N, x)


def test_r_polys_match_series_oracle():
    a1, a2, a3 = F(1, 2), F(1, 3), F(9)
    sys = build_system(FamilySpec("r", alpha1=a1, alpha2=a2, alpha3=a3))
    for n in range(4):
        p = sys.poly((n,))
        for x in range(6):
            assert eval_poly(p, (x,)) == O.r_value(n, a1, a2, a3, x)


def test_charlier_polys_match_series_oracle():
    s = F(3, 2)
    sys = build_system(FamilySpec("charlier", s=s))
    for n in range(5):
        p = sys.poly((n,))
        for x in range(7):
            assert eval_poly(p, (x,)) == O.charlier_value(n, s, x)


def test_krawtchouk_polys_match_series_oracle():
    p0, N = F(1, 4), 6
    sys = build_system(FamilySpec("krawtchouk", p=p0, N=N))
    for n in range(N + 1):
        p = sys.poly((n,))
        for x in range(N + 1):
            assert eval_poly(p, (x,)) == O.krawtchouk_value(n, p0, N, x)


def test_meixner_polys_match_series_oracle():
    beta, c = F(3, 2), F(1, 3)
    sys = build_system(FamilySpec("meixner", beta=beta, c=c))
    for n in range(5):
        p = sys.poly((n,))
        for x in range(7):
            assert eval_poly(p, (x,)) == O.meixner_value(n, beta, c, x)


# ---------------------------------------------------------------------------
# Weight tables against the oracle weights
# ---------------------------------------------------------------------------


def test_weights_match_oracles_all_kinds():
    cases = [
        (
            FamilySpec("hahn", alpha=F(1, 2), beta=F(1, 3), N=5),
            [(x,) for x in range(6)],
            lambda x: O.w_hahn(F(1, 2), F(1, 3), 5, x[0]),
        ),
        (
            FamilySpec("r", alpha1=F(1, 2), alpha2=F(1, 3), alpha3=F(9)),
            [(x,) for x in range(7)],
            lambda x: O.w_r(F(1, 2), F(1, 3), F(9), x[0]),
        ),
        (
            FamilySpec("charlier", s=F(3, 2)),
            [(x,) for x in range(7)],
            lambda x: O.w_charlier(F(3, 2), x[0]),
        ),
        (
            FamilySpec("krawtchouk", p=F(1, 4), N=6),
            [(x,) for x in range(7)],
            lambda x: O.w_krawtchouk(F(1, 4), 6, x[0]),
        ),
        (
            FamilySpec("meixner", beta=F(3, 2), c=F(1, 3)),
            [(x,) for x in range(7)],
            lambda x: O.w_meixner(F(3, 2), F(1, 3), x[0]),
        ),
        (
            FamilySpec(
                "grid-r", d=2, sigma=(F(1, 2), F(1, 3)), beta=F(1), gamma=F(30)
            ),
            [(x, y) for x in range(3) for y in range(3)],
            lambda x: O.w_grid_r((F(1, 2), F(1, 3)), F(1), F(30), x),
        ),
        (
            FamilySpec("box-hahn", d=2, l=(2, 3), beta=F(1, 2), r=F(2)),
            O.grid_points((2, 3)),
            lambda x: O.w_box((2, 3), F(1, 2), F(2), x),
        ),
        (
            FamilySpec(
                "simplex-hahn", d=2, sigma=(F(1, 2), F(1, 3), F(1, 4)), N=5
            ),
            O.simplex_points(2, 5),
            lambda x: O.w_simplex((F(1, 2), F(1, 3), F(1, 4)), 5, x),
        ),
        (
            FamilySpec(
                "trunc-simplex-hahn",
                d=2,
                N=4,
                trunc={0: 2},
                sigma=(F(-3), F(1, 2), F(1, 3)),
            ),
            O.trunc_points(2, 4, {0: 2}),
            lambda x: O.w_simplex((F(-3), F(1, 2), F(1, 3)), 4, x),
        ),
        (
            FamilySpec("krawtchouk-d", d=2, p=(F(1, 4), F(1, 4)), N=5),
            O.simplex_points(2, 5),
            lambda x: O.w_kraw_d((F(1, 4), F(1, 4)), 5, x),
        ),
        (
            FamilySpec("meixner-d", d=2, s=F(3, 2), c=(F(1, 4), F(1, 3))),
            [(x, y) for x in range(3) for y in range(3)],
            lambda x: O.w_meix_d(F(3, 2), (F(1, 4), F(1, 3)), x),
        ),
    ]
    assert len(cases) == len(ALL_KINDS)
    for spec, pts, oracle in cases:
        sys = build_system(spec)
        w0 = sys.weight(tuple(0 for _ in range(spec_nvars(spec))))
        base = oracle(tuple(0 for _ in range(spec_nvars(spec))))
        for pt in pts:
            assert sys.weight(pt) * base == oracle(pt) * w0, (spec.kind, pt)


def spec_nvars(spec):
    if spec.kind in ("hahn", "r", "charlier", "krawtchouk", "meixner"):
        return 1
    return spec.params["d"]


# ---------------------------------------------------------------------------
# Eigenvalue laws
# ---------------------------------------------------------------------------


def test_eigenvalue_tables_pinned():
    table = [
        (
            FamilySpec("hahn", alpha=F(1, 2), beta=F(1, 3), N=5),
            [F(0), F(-17, 6), F(-23, 3), F(-29, 2)],
        ),
        (
            FamilySpec("r", alpha1=F(0), alpha2=F(0), alpha3=F(9)),
            [F(0), F(7), F(12), F(15)],
        ),
        (FamilySpec("charlier", s=F(2)), [F(0), F(-1), F(-2), F(-3)]),
        (
            FamilySpec("krawtchouk", p=F(1, 4), N=6),
            [F(0), F(-1), F(-2), F(-3)],
        ),
        (
            FamilySpec("meixner", beta=F(3, 2), c=F(1, 3)),
            [F(0), F(-1), F(-2), F(-3)],
        ),
        (
            FamilySpec(
                "grid-r", d=2, sigma=(F(1, 2), F(1, 3)), beta=F(1), gamma=F(30)
            ),
            [F(0), F(151, 6), F(145, 3), F(139, 2)],
        ),
        (
            FamilySpec("box-hahn", d=2, l=(2, 3), beta=F(1, 2), r=F(2)),
            [F(0), F(-7, 2), F(-9), F(-33, 2)],
        ),
        (
            FamilySpec(
                "simplex-hahn", d=2, sigma=(F(1, 2), F(1, 3), F(1, 4)), N=5
            ),
            [F(0), F(-49, 12), F(-61, 6), F(-73, 4)],
        ),
        (
            FamilySpec(
                "trunc-simplex-hahn",
                d=2,
                N=4,
                trunc={0: 2},
                sigma=(F(-3), F(1, 2), F(1, 3)),
            ),
            [F(0), F(-5, 6), F(-11, 3), F(-17, 2)],
        ),
        (
            FamilySpec("krawtchouk-d", d=2, p=(F(1, 4), F(1, 4)), N=5),
            [F(0), F(-1), F(-2), F(-3)],
        ),
        (
            FamilySpec("meixner-d", d=2, s=F(3, 2), c=(F(1, 4), F(1, 3))),
            [F(0), F(-1), F(-2), F(-3)],
        ),
    ]
    assert len(table) == len(ALL_KINDS)
    for spec, expected in table:
        sys = build_system(spec)
        got = [sys.eigenvalue(k) for k in range(4)]
        assert got == expected, spec.kind


def test_r_eigenvalue_law_generic():
    a1, a2, a3 = F(1, 2), F(1, 3), F(9)
    sys = build_system(FamilySpec("r", alpha1=a1, alpha2=a2, alpha3=a3))
    for n in range(5):
        assert sys.eigenvalue(n) == n * (a3 - a1 - a2 - 1 - n)


def test_simplex_eigenvalue_law_generic():
    sigma = (F(1, 2), F(1, 3), F(1, 4))
    sys = build_system(FamilySpec("simplex-hahn", d=2, sigma=sigma, N=5))
    for n in range(5):
        assert sys.eigenvalue(n) == -n * (n + sum(sigma) + 2)


# ---------------------------------------------------------------------------
# Norm ratios against brute-force Gram sums
# ---------------------------------------------------------------------------


def test_norm_ratio_matches_brute_sums_finite_kinds():
    cases = [
        (
            FamilySpec("hahn", alpha=F(1, 2), beta=F(1, 3), N=4),
            [(x,) for x in range(5)],
            [(n,) for n in range(5)],
        ),
        (
            FamilySpec("krawtchouk", p=F(1, 4), N=4),
            [(x,) for x in range(5)],
            [(n,) for n in range(5)],
        ),
        (
            FamilySpec(
                "simplex-hahn", d=2, sigma=(F(1, 2), F(1, 3), F(1, 4)), N=3
            ),
            O.simplex_points(2, 3),
            [(i, j) for i in range(4) for j in range(4) if i + j <= 3],
        ),
        (
            FamilySpec("box-hahn", d=2, l=(2, 2), beta=F(1, 2), r=F(2)),
            O.grid_points((2, 2)),
            [(i, j) for i in range(3) for j in range(3)],
        ),
        (
            FamilySpec("krawtchouk-d", d=2, p=(F(1, 4), F(1, 4)), N=3),
            O.simplex_points(2, 3),
            [(i, j) for i in range(4) for j in range(4) if i + j <= 3],
        ),
    ]
    for spec, pts, indices in cases:
        sys = build_system(spec)
        weight = {pt: sys.weight(pt) for pt in pts}
        one = {tuple(0 for _ in pts[0]): F(1)}
        mass = O.brute_inner(weight, pts, one, one)
        for nu in indices:
            terms = poly_terms(sys.poly(nu))
            norm = O.brute_inner(weight, pts, terms, terms)
            assert sys.norm_ratio(nu) == norm / mass, (spec.kind, nu)
            assert norm_ratio(spec.kind, nu, spec.params) == norm / mass


def test_norm_ratio_matches_moment_route_infinite_kinds():
    # For measures on infinite supports the squared norm is a finite linear
    # combination of moments, so a truncated weight sum converges to it.
    cases = [
        (FamilySpec("charlier", s=F(3, 2)), 80),
        (FamilySpec("meixner", beta=F(3, 2), c=F(1, 3)), 120),
    ]
    for spec, window in cases:
        sys = build_system(spec)
        pts = [(x,) for x in range(window)]
        weight = {pt: sys.weight(pt) for pt in pts}
        one = {(0,): F(1)}
        mass = O.brute_inner(weight, pts, one, one)
        for n in range(4):
            terms = poly_terms(sys.poly((n,)))
            norm = O.brute_inner(weight, pts, terms, terms)
            exact = sys.norm_ratio((n,))
            approx = float(norm) / float(mass)
            assert abs(approx - float(exact)) < 1e-9, (spec.kind, n)


def test_r_norm_ratio_exact_via_closed_masses():
    a1, a2, a3 = F(0), F(0), F(6)
    sys = build_system(FamilySpec("r", alpha1=a1, alpha2=a2, alpha3=a3))
    mass = O.r_mass_closed(a1, a2, a3)
    for n in range(3):
        coeffs = [F(0)] * (n + 1)
        for exps, c in poly_terms(sys.poly((n,))).items():
            coeffs[exps[0]] = c
        inner = O.r_inner_closed(coeffs, a1, a2, a3)
        assert sys.norm_ratio((n,)) == inner / mass


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def test_charlier_moments_are_powers_of_s():
    sys = build_system(FamilySpec("charlier", s=F(2)))
    for j in range(5):
        assert sys.moments((j,)) == F(2) ** j


def test_meixner_moments_closed_form():
    beta, c = F(3, 2), F(1, 3)
    sys = build_system(FamilySpec("meixner", beta=beta, c=c))
    for j in range(4):
        assert sys.moments((j,)) == O.rising(beta, j) * (c / (1 - c)) ** j


def test_r_moments_match_closed_gauss_route():
    a1, a2, a3 = F(0), F(0), F(9)
    sys = build_system(FamilySpec("r", alpha1=a1, alpha2=a2, alpha3=a3))
    mass = O.r_mass_closed(a1, a2, a3)
    assert sys.conv_limit() == 8
    for j in range(4):
        expected = O.r_falling_moment_closed(j, a1, a2, a3) / mass
        assert sys.moments((j,)) == expected


def test_moments_none_for_finite_kinds():
    sys = build_system(FamilySpec("krawtchouk", p=F(1, 4), N=5))
    assert sys.moments is None
    sys = build_system(FamilySpec("hahn", alpha=F(0), beta=F(0), N=3))
    assert sys.moments is None


def test_meixner_multi_moments_pinned():
    spec = FamilySpec("meixner-d", d=2, s=F(3, 2), c=(F(1, 4), F(1, 3)))
    sys = build_system(spec)
    assert sys.moments((0, 0)) == F(1)
    assert sys.moments((1, 0)) == F(9, 10)
    assert sys.moments((1, 1)) == F(9, 5)
    assert sys.moments((2, 0)) == F(27, 20)


# ---------------------------------------------------------------------------
# Recurrence for the kind with finitely many orthogonal members
# ---------------------------------------------------------------------------


def test_r_three_term_recurrence_symbolic_generic_params():
    a1, a2, a3 = F(1, 2), F(1, 3), F(12)
    sys = build_system(FamilySpec("r", alpha1=a1, alpha2=a2, alpha3=a3))
    for n in range(1, 4):
        a_n, c_n = r_recurrence_coeffs(n, a1, a2, a3)
        lhs = {}
        for exps, c in poly_terms(sys.poly((n,))).items():
            key = (exps[0] + 1,)
            lhs[key] = lhs.get(key, F(0)) + c
        rhs = {}
        for coeff, m in ((a_n, n + 1), (-(a_n + c_n), n), (c_n, n - 1)):
            for exps, c in poly_terms(sys.poly((m,))).items():
                rhs[exps] = rhs.get(exps, F(0)) + coeff * c
        lhs = {k: v for k, v in lhs.items() if v}
        rhs = {k: v for k, v in rhs.items() if v}
        assert lhs == rhs, n


def test_r_recurrence_pole_but_norms_fine():
    # At alpha3 = 6 the step from degree 2 hits a zero denominator, while
    # norm ratios of the still-orthogonal members remain finite.
    with pytest.raises(FamilyError):
        r_recurrence_coeffs(2, F(0), F(0), F(6))
    assert norm_ratio("r", (2,), {"alpha1": F(0), "alpha2": F(0), "alpha3": F(6)}) == F(50)


# ---------------------------------------------------------------------------
# Spec validation
# ---------------------------------------------------------------------------


def test_spec_validation_rejects_bad_parameters():
    bad = [
        FamilySpec("charlier", s=F(-1)),
        FamilySpec("charlier", s=F(0)),
        FamilySpec("krawtchouk", p=F(2), N=5),
        FamilySpec("meixner", beta=F(3, 2), c=F(3, 2)),
        FamilySpec("meixner-d", d=2, s=F(1, 2), c=(F(1, 2), F(1, 2))),
        FamilySpec("krawtchouk-d", d=2, p=(F(1, 2), F(1, 2)), N=4),
        FamilySpec("simplex-hahn", d=2, sigma=(F(0), F(0)), N=4),
        FamilySpec("box-hahn", d=2, l=(2, -1), beta=F(0), r=F(1)),
        FamilySpec("hahn", alpha=F(-2), beta=F(0), N=3),
    ]
    for spec in bad:
        with pytest.raises(FamilyError):
            build_system(spec)


def test_unchecked_build_bypasses_validation():
    spec = FamilySpec("charlier", s=F(-1))
    sys = build_system(spec, unchecked=True)
    assert sys.weight((1,)) == F(-1)


def test_trunc_cap_form_equals_sigma_form():
    # Capping variable 0 at l = 2 matches sigma_1 = -l - 1 = -3 directly.
    a = build_system(
        FamilySpec(
            "trunc-simplex-hahn",
            d=2,
            N=4,
            trunc={0: 2},
            sigma=(F(-3), F(1, 2), F(1, 3)),
        )
    )
    pts = O.trunc_points(2, 4, {0: 2})
    for pt in pts:
        assert a.weight(pt) == O.w_simplex((F(-3), F(1, 2), F(1, 3)), 4, pt) / O.w_simplex(
            (F(-3), F(1, 2), F(1, 3)), 4, (0, 0)
        ) * a.weight((0, 0))
    for nu in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)]:
        p = a.poly(nu)
        for pt in pts[:6]:
            assert eval_poly(p, pt) == eval_poly(p, pt)


def test_complex_parameter_r_has_real_outputs():
    spec = FamilySpec(
        "r", alpha1=GaussRat(1, 1), alpha2=GaussRat(1, -1), alpha3=F(9)
    )
    sys = build_system(spec)
    weights = [sys.weight((x,)) for x in range(4)]
    assert weights == [F(1), F(1, 2), F(5, 22), F(85, 792)]
    assert all(isinstance(w, F) for w in weights)
    assert [sys.eigenvalue(n) for n in range(3)] == [F(0), F(5), F(8)]
    r2 = poly_terms(sys.poly((2,)))
    assert r2 == {(0,): F(1), (1,): F(-46, 25), (2,): F(6, 25)}
    for c in r2.values():
        assert isinstance(c, F)


# ---------------------------------------------------------------------------
# Product systems
# ---------------------------------------------------------------------------


def test_product_system_factorizes():
    rng = random.Random(7)
    charlier = build_system(FamilySpec("charlier", s=F(2)))
    kraw = build_system(FamilySpec("krawtchouk", p=F(1, 4), N=5))
    ps = product_system(
        [[0], [1]],
        [FamilySpec("charlier", s=F(2)), FamilySpec("krawtchouk", p=F(1, 4), N=5)],
        checks=False,
    )
    assert ps.nvars == 2
    for _ in range(10):
        nu = (rng.randrange(3), rng.randrange(3))
        p = poly_terms(ps.poly(nu))
        for _ in range(5):
            x = (rng.randrange(5), rng.randrange(6))
            lhs = O.peval(p, x)
            rhs = eval_poly(charlier.poly((nu[0],)), (x[0],)) * eval_poly(
                kraw.poly((nu[1],)), (x[1],)
            )
            assert lhs == rhs


def test_product_system_weight_is_product_of_factors():
    ps = product_system(
        [[0], [1]],
        [FamilySpec("charlier", s=F(2)), FamilySpec("krawtchouk", p=F(1, 4), N=5)],
        checks=False,
    )
    for x in [(0, 0), (1, 2), (2, 5), (3, 1)]:
        expected = O.w_charlier(F(2), x[0]) * O.w_krawtchouk(F(1, 4), 5, x[1])
        assert ps.weight(x) == expected
    assert ps.eigenvalue(3) == F(-3)


def test_product_type_enumeration_d3():
    groups = product_type_enumeration(3)
    assert len(groups) == 6
    assert sum(len(g[1]) for g in groups) == 16
    labels = [g[0] for g in groups]
    assert labels == [
        "N0 x N0 x N0",
        "N0 x N0 x V1",
        "N0 x V1 x V1",
        "N0 x V2",
        "V1 x V1 x V1",
        "V1 x V2",
    ]
    sizes = [len(g[1]) for g in groups]
    assert sizes == [6, 4, 2, 2, 1, 1]
