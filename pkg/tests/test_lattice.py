"""Lattice supports: enumeration, membership, boundaries, index sets, rank profiles."""

import itertools

import pytest

import oracles as O
from orthodiff import Box, FullGrid, Simplex, TruncatedSimplex


def test_box_points_match_product_enumeration():
    box = Box([2, 3])
    assert sorted(box.points()) == O.grid_points([2, 3])
    assert box.size() == 12
    assert box.is_finite


def test_simplex_points_match_filter_enumeration():
    for d, N in [(1, 4), (2, 4), (3, 3)]:
        lat = Simplex(d, N)
        assert sorted(lat.points()) == O.simplex_points(d, N)
        assert lat.size() == len(O.simplex_points(d, N))


def test_truncated_simplex_points_match_filter_enumeration():
    lat = TruncatedSimplex(2, 4, {0: 2})
    assert sorted(lat.points()) == O.trunc_points(2, 4, {0: 2})
    lat2 = TruncatedSimplex(3, 3, {0: 1, 2: 2})
    assert sorted(lat2.points()) == O.trunc_points(3, 3, {0: 1, 2: 2})


def test_membership_agrees_with_enumeration():
    lat = TruncatedSimplex(2, 4, {0: 2})
    members = set(lat.points())
    for x in itertools.product(range(-1, 6), repeat=2):
        assert lat.contains(x) == (x in members)
    grid = FullGrid(2)
    assert grid.contains((0, 5)) and not grid.contains((-1, 0))


def test_full_grid_window_enumeration():
    grid = FullGrid(2)
    assert sorted(grid.window_points([2, 2])) == O.grid_points([2, 2])
    assert grid.max_total_degree() is None
    with pytest.raises(Exception):
        grid.size()


def test_index_sets_and_degree_slices():
    lat = Simplex(2, 4)
    upto = lat.index_set_upto(2)
    assert set(upto) == {p for p in O.simplex_points(2, 4) if sum(p) <= 2}
    assert lat.degree_indices(2) == [(0, 2), (1, 1), (2, 0)]


def test_rank_profiles_match_combinatorial_counts():
    cases = [
        (Simplex(2, 3), O.simplex_points(2, 3), 3),
        (Box([1, 1]), O.grid_points([1, 1]), 3),
        (TruncatedSimplex(2, 3, {0: 1}), O.trunc_points(2, 3, {0: 1}), 3),
        (Box([2, 3]), O.grid_points([2, 3]), 5),
    ]
    for lat, pts, k_max in cases:
        assert lat.rank_profile(k_max) == O.count_by_degree(pts, k_max)


def test_boundary_predicates():
    box = Box([2, 3])
    for x in box.points():
        assert box.on_boundary_upper(x, 0) == (x[0] == 2)
        assert box.on_boundary_lower(x, 0) == (x[0] == 0)
    sim = Simplex(2, 4)
    for x in sim.points():
        assert sim.on_boundary_upper(x, 0) == (sum(x) == 4)
        assert sim.on_boundary_lower(x, 1) == (x[1] == 0)


def test_boundary_upper_listing_matches_predicate():
    box = Box([2, 3])
    listed = sorted(box.boundary_upper(0))
    from_predicate = sorted(x for x in box.points() if box.on_boundary_upper(x, 0))
    assert listed == from_predicate


def test_ideal_generators_vanish_on_lattice():
    for lat in (Simplex(2, 3), Box([2, 2]), TruncatedSimplex(2, 3, {0: 1})):
        gens = lat.ideal_generators()
        assert gens
        for g in gens:
            terms = O.terms_from_obj(g.to_obj())
            for x in lat.points():
                assert O.peval(terms, x) == 0


def test_serialization_round_trip_shapes():
    assert Box([2, 3]).to_obj() == {"shape": "box", "caps": [2, 3]}
    obj = TruncatedSimplex(2, 4, {0: 2}).to_obj()
    assert obj["shape"] == "truncated_simplex"
    assert obj["N"] == 4 and obj["caps"] == {"1": 2}
    assert FullGrid(3).to_obj()["shape"] == "full_grid"


def test_rank_profile_beyond_max_degree_is_zero():
    box = Box([1, 1])
    prof = box.rank_profile(4)
    assert prof == [1, 2, 1, 0, 0]
