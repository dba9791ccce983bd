"""Operator classification: case resolution, linear block splitting, weight recovery."""

import random
from fractions import Fraction

import pytest

import oracles as O
from orthodiff import (
    ClassifyError,
    FamilySpec,
    Poly,
    ShiftForm,
    WeightlessOperatorError,
    build_system,
    check_compatibility,
    linear_operator,
    quadratic_operator,
    resolve_quadratic_case,
    split_linear_blocks,
    weight_from_operator,
)

F = Fraction


def test_resolve_simplex_case():
    res = resolve_quadratic_case(F(13, 2), F(-3, 2), [F(-3, 2), F(-3, 2)])
    assert res.kind == "simplex_hahn"
    assert res.params["N"] == 5
    assert list(res.params["sigma"]) == [F(1, 2), F(1, 2), F(-21, 2)]
    assert res.lattice.to_obj() == {"shape": "simplex", "d": 2, "N": 5}


def test_resolve_box_case():
    res = resolve_quadratic_case(F(20, 3), F(-3, 2), [F(2), F(2)])
    assert res.kind == "box_hahn"
    assert res.params["caps"] == [2, 2]
    assert res.params["beta"] == F(-37, 6)
    assert res.params["r"] == F(-3, 2)


def test_resolve_grid_case():
    res = resolve_quadratic_case(F(1, 2), F(-29), [F(-3, 2), F(-3, 2)])
    assert res.kind == "grid_hahn"
    assert list(res.params["sigma"]) == [F(1, 2), F(1, 2)]
    assert res.params["beta"] == F(55, 2)
    assert res.params["gamma"] == 32


def test_resolve_truncated_case():
    res = resolve_quadratic_case(F(13, 2), F(-3, 2), [F(2), F(-3, 2)])
    assert res.kind == "truncated_simplex_hahn"
    assert res.params["N"] == 5
    assert res.params["trunc"] == {0: 2}
    assert list(res.params["sigma"]) == [F(-3), F(1, 2), F(-7)]


def test_fully_capped_simplex_collapses_to_box():
    res = resolve_quadratic_case(F(13, 2), F(-3, 2), [F(2), F(3)])
    assert res.kind == "box_hahn"
    assert res.params["caps"] == [2, 3]
    assert any("box" in note for note in res.notes)


def test_quadratic_operator_satisfies_compatibility():
    rng = random.Random(41)
    for _ in range(10):
        d = rng.choice((2, 3))
        b = O.random_fraction(rng) + F(rng.randint(4, 9))
        caps = [O.random_fraction(rng) - 2 for _ in range(d)]
        r = O.random_fraction(rng) - F(1, 3)
        op = quadratic_operator(b, r, caps, variant=1)
        assert check_compatibility(op).ok


def test_quadratic_operator_variant_two_needs_matching_b():
    caps = [F(-3, 2), F(-3, 2)]
    with pytest.raises(ValueError):
        quadratic_operator(F(1), [F(1, 3), F(1, 3)], caps, variant=2)
    op = quadratic_operator(F(-4), [F(1, 3), F(1, 3)], caps, variant=2)
    assert op.tag == "no_weight"
    assert check_compatibility(op).ok


def test_variant_two_has_no_weight():
    caps = [F(-3, 2), F(-3, 2)]
    op = quadratic_operator(F(-4), [F(1, 3), F(1, 3)], caps, variant=2)
    lat = build_system(FamilySpec("simplex-hahn", sigma=[0, 0, 0], N=3), checks=False).lattice
    with pytest.raises(WeightlessOperatorError):
        weight_from_operator(op, lat)


def test_linear_operator_compatibility_and_blocks():
    lmat = [[F(-1, 4) + 1, F(-1, 4)], [F(-1, 4), F(-1, 4) + 1]]
    svec = [F(5, 4), F(5, 4)]
    op = linear_operator(lmat, svec)
    assert check_compatibility(op).ok
    blocks = split_linear_blocks(lmat, svec)
    assert len(blocks) == 1
    block = blocks[0]
    assert block.coords == (0, 1)
    assert block.kind == "krawtchouk_multi"
    assert list(block.params["p"]) == [F(1, 4), F(1, 4)]
    assert block.params["N"] == 5


def test_split_mixed_independent_blocks():
    lmat = [
        [F(2), 0, 0],
        [0, F(1, 3) + 1, F(1, 3)],
        [0, F(1, 3), F(1, 3) + 1],
    ]
    svec = [F(2), F(1, 2), F(1, 2)]
    blocks = split_linear_blocks(lmat, svec)
    kinds = sorted((b.coords, b.kind) for b in blocks)
    assert len(blocks) == 2
    assert kinds[0][0] == (0,)
    assert kinds[1][0] == (1, 2)


def test_split_rejects_asymmetric_zero_pattern():
    lmat = [[F(2), F(0)], [F(1, 3), F(2)]]
    with pytest.raises(ClassifyError):
        split_linear_blocks(lmat, [F(1), F(1)])


def test_weight_recovery_matches_closed_form_charlier():
    system = build_system(FamilySpec("charlier", s=2), checks=False)
    table = weight_from_operator(system.shift, system.lattice, window=[5])
    assert table.sign == "positive"
    want = {str(x): O.w_charlier(x, 2) for x in range(6)}
    got = {k: F(v) for k, v in table.to_obj()["values"].items()}
    assert got == want


def test_weight_recovery_matches_closed_form_meixner_d():
    system = build_system(
        FamilySpec("meixner-d", s=F(3, 2), c=[F(1, 4), F(1, 3)]), checks=False
    )
    table = weight_from_operator(system.shift, system.lattice, window=[3, 3])
    obj = table.to_obj()
    for key, val in obj["values"].items():
        x = tuple(int(t) for t in key.split(","))
        assert F(val) == O.w_meix_d(x, F(3, 2), [F(1, 4), F(1, 3)])


def test_weight_recovery_detects_path_dependence():
    system = build_system(
        FamilySpec("meixner-d", s=F(3, 2), c=[F(1, 4), F(1, 3)]), checks=False
    )
    op = system.shift
    bumped = list(op.beta)
    bumped[0] = bumped[0] + Poly.const(2, F(1, 7))
    broken = ShiftForm(op.nvars, op.alpha, tuple(bumped), op.gamma, op.delta0)
    with pytest.raises(ValueError, match="path dependent"):
        weight_from_operator(broken, system.lattice, window=[3, 3])


def test_resolved_cases_chain_into_buildable_systems():
    res = resolve_quadratic_case(F(13, 2), F(-3, 2), [F(-3, 2), F(-3, 2)])
    spec = FamilySpec(
        "simplex-hahn", sigma=list(res.params["sigma"]), N=res.params["N"], unchecked=True
    )
    system = build_system(spec, checks=False)
    assert system.lattice.to_obj() == res.lattice.to_obj()
    op = quadratic_operator(F(13, 2), F(-3, 2), [F(-3, 2), F(-3, 2)], variant=1)
    recovered = weight_from_operator(op, system.lattice)
    ratio_op = F(recovered.to_obj()["values"]["1,0"])
    assert ratio_op == system.weight((1, 0)) / system.weight((0, 0))
