"""Difference operators: form conversions, application, self-adjointness, compatibility."""

import random
from fractions import Fraction

import oracles as O
from orthodiff import (
    Box,
    DiffForm,
    FamilySpec,
    Poly,
    ShiftForm,
    build_system,
    check_compatibility,
    check_self_adjoint,
    fit_admissible_form,
    operator_from_obj,
    to_diff_form,
    to_shift_form,
)


def random_poly(rng, nvars, deg=2, nterms=3):
    p = Poly.zero(nvars)
    for _ in range(nterms):
        exps = tuple(rng.randint(0, deg) for _ in range(nvars))
        p = p + Poly.monomial(nvars, exps, O.random_fraction(rng))
    return p


def random_shift_form(rng, nvars):
    alpha = tuple(
        tuple(
            Poly.zero(nvars) if i == j else random_poly(rng, nvars)
            for j in range(nvars)
        )
        for i in range(nvars)
    )
    beta = tuple(random_poly(rng, nvars) for _ in range(nvars))
    gamma = tuple(random_poly(rng, nvars) for _ in range(nvars))
    delta0 = random_poly(rng, nvars)
    return ShiftForm(nvars, alpha, beta, gamma, delta0)


def strip_tag(obj):
    return {k: v for k, v in obj.items() if k != "tag"}


def test_shift_diff_round_trip_on_random_operators():
    rng = random.Random(31)
    for nvars in (1, 2, 3):
        for _ in range(8):
            op = random_shift_form(rng, nvars)
            back = to_shift_form(to_diff_form(op))
            assert strip_tag(back.to_obj()) == strip_tag(op.to_obj())


def test_diff_shift_round_trip_on_family_operators():
    specs = [
        FamilySpec("hahn", alpha1=Fraction(1, 2), beta1=Fraction(1, 3), N=5),
        FamilySpec("charlier", s=2),
        FamilySpec("meixner-d", s=Fraction(3, 2), c=[Fraction(1, 4), Fraction(1, 3)]),
        FamilySpec("simplex-hahn", sigma=[0, 0, 0], N=3),
    ]
    for spec in specs:
        op = build_system(spec, checks=False).shift
        back = to_shift_form(to_diff_form(op))
        assert strip_tag(back.to_obj()) == strip_tag(op.to_obj())


def test_both_forms_apply_identically_including_constants():
    rng = random.Random(32)
    for nvars in (1, 2):
        for _ in range(6):
            op = random_shift_form(rng, nvars)
            diff = to_diff_form(op)
            for p in (Poly.const(nvars, Fraction(5, 3)), random_poly(rng, nvars)):
                out_shift = op.apply(p)
                out_diff = diff.apply(p)
                assert (out_shift - out_diff).is_zero()


def test_apply_matches_stencil_evaluation():
    rng = random.Random(33)
    for nvars in (1, 2):
        for _ in range(6):
            op = random_shift_form(rng, nvars)
            obj = op.to_obj()
            p = random_poly(rng, nvars)
            terms = O.terms_from_obj(p.to_obj())
            f = lambda x: O.peval(terms, x)
            applied = O.terms_from_obj(op.apply(p).to_obj())
            for _ in range(5):
                x = tuple(rng.randint(-2, 3) for _ in range(nvars))
                assert O.peval(applied, x) == O.shift_apply_obj(obj, f, x)


def test_constant_annihilation_for_eigen_operators():
    for spec in (
        FamilySpec("charlier", s=2),
        FamilySpec("krawtchouk-d", p=[Fraction(1, 4), Fraction(1, 4)], N=5),
        FamilySpec("simplex-hahn", sigma=[0, 0, 0], N=3),
    ):
        op = build_system(spec, checks=False).shift
        out = op.apply(Poly.const(op.nvars, 1))
        assert out.is_zero()


def test_check_self_adjoint_accepts_family_and_brute_force_agrees():
    system = build_system(FamilySpec("krawtchouk", p=Fraction(1, 4), N=5), checks=False)
    rep = check_self_adjoint(system.shift, system.lattice, system.weight)
    assert rep.ok and not rep.violations
    rng = random.Random(34)
    pts = sorted(system.lattice.points())
    for _ in range(10):
        u = random_poly(rng, 1)
        v = random_poly(rng, 1)
        du = O.terms_from_obj(system.shift.apply(u).to_obj())
        dv = O.terms_from_obj(system.shift.apply(v).to_obj())
        tu, tv = O.terms_from_obj(u.to_obj()), O.terms_from_obj(v.to_obj())
        left = sum(system.weight(x) * O.peval(du, x) * O.peval(tv, x) for x in pts)
        right = sum(system.weight(x) * O.peval(tu, x) * O.peval(dv, x) for x in pts)
        assert left == right


def test_check_self_adjoint_flags_broken_weight():
    system = build_system(FamilySpec("krawtchouk", p=Fraction(1, 4), N=5), checks=False)

    def bad_weight(x):
        w = system.weight(x)
        return w * 2 if x == (3,) else w

    rep = check_self_adjoint(system.shift, system.lattice, bad_weight)
    assert not rep.ok
    assert rep.violations


def test_check_compatibility_passes_families_and_detects_perturbation():
    system = build_system(
        FamilySpec("meixner-d", s=Fraction(3, 2), c=[Fraction(1, 4), Fraction(1, 3)]),
        checks=False,
    )
    op = system.shift
    assert check_compatibility(op).ok
    bumped_beta = list(op.beta)
    bumped_beta[0] = bumped_beta[0] + Poly.const(2, Fraction(1, 7))
    broken = ShiftForm(op.nvars, op.alpha, tuple(bumped_beta), op.gamma, op.delta0)
    rep = check_compatibility(broken)
    assert not rep.ok
    assert rep.violations


def test_fit_admissible_form_recovers_eigenvalue_law():
    system = build_system(
        FamilySpec("hahn", alpha1=Fraction(1, 2), beta1=Fraction(1, 3), N=5),
        checks=False,
    )
    fit = fit_admissible_form(to_diff_form(system.shift))
    assert fit.ok and not fit.problems
    for k in range(4):
        assert system.eigenvalue(k) == k * ((k - 1) * fit.a + fit.b)


def test_operator_serialization_round_trip():
    rng = random.Random(35)
    op = random_shift_form(rng, 2)
    again = operator_from_obj(op.to_obj())
    assert strip_tag(again.to_obj()) == strip_tag(op.to_obj())
    diff = to_diff_form(op)
    diff_again = operator_from_obj(diff.to_obj())
    assert diff_again.to_obj() == diff.to_obj()


def test_boundary_vanishing_for_finite_supports():
    system = build_system(FamilySpec("box-hahn", l=[2, 2], beta=0, r=1), checks=False)
    op, lat = system.shift, system.lattice
    for x in lat.points():
        for i in range(op.nvars):
            if lat.on_boundary_upper(x, i):
                up = O.terms_from_obj(op.beta[i].to_obj())
                assert O.peval(up, x) == 0
            if lat.on_boundary_lower(x, i):
                down = O.terms_from_obj(op.gamma[i].to_obj())
                assert O.peval(down, x) == 0
