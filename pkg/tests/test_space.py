"""Spaces, observables, collections, and the collection distance."""

import itertools

import numpy as np
import pytest

from bistoch import Collection, Observable, collection_distance, make_space, uniform_space
from bistoch.errors import MassNotOne, NonPositiveWeight, SpaceMismatch, ValidationError
from bistoch.space import _bottleneck_minimax, _exhaustive_minimax

from conftest import random_collection, random_space


def test_make_space_uniform_two_points():
    space = make_space([0.5, 0.5])
    assert space.point_count == 2
    assert space.weights == (0.5, 0.5)


def test_make_space_single_point():
    space = make_space([1.0])
    assert space.point_count == 1


def test_make_space_rejects_bad_mass():
    with pytest.raises(MassNotOne):
        make_space([0.5, 0.6])


def test_make_space_rejects_nonpositive():
    with pytest.raises(NonPositiveWeight):
        make_space([1.0, 0.0])
    with pytest.raises(NonPositiveWeight):
        make_space([1.5, -0.5])


def test_make_space_rejects_empty():
    with pytest.raises(ValidationError):
        make_space([])


def test_weights_not_normalized_silently():
    # 0.3 + 0.7 is fine and stays bit-exact as given
    space = make_space([0.3, 0.7])
    assert space.weights == (0.3, 0.7)


def test_observable_range_validation():
    space = uniform_space(2)
    with pytest.raises(ValidationError):
        Observable(space, [1.5, 0.0])
    with pytest.raises(ValidationError):
        Observable(space, [-0.2, 0.0])


def test_observable_same_as_weighted():
    space = make_space([0.9, 0.1])
    f = Observable(space, [0.5, 0.0])
    g = Observable(space, [0.5, 1e-14])
    assert f.same_as(g)


def test_collection_requires_shared_space():
    f = Observable(uniform_space(2), [1.0, 0.0])
    g = Observable(uniform_space(3), [1.0, 0.0, 0.0])
    with pytest.raises(SpaceMismatch):
        Collection([f, g])


def test_collection_nonempty():
    with pytest.raises(ValidationError):
        Collection([])


def test_distance_to_self_is_zero():
    space = make_space([0.25, 0.75])
    coll = Collection([Observable(space, [0.4, 0.9]), Observable(space, [0.0, 1.0])])
    assert collection_distance(coll, coll) == 0.0


def test_distance_constant_one_vs_zero():
    space = uniform_space(3)
    ones = Collection([Observable.constant(space, 1.0)])
    zeros = Collection([Observable.zero(space)])
    assert collection_distance(ones, zeros) == 1.0


def test_distance_swapped_pair_is_zero():
    # Independent oracle: brute force over both permutations of two items.
    space = uniform_space(2)
    one = Observable.constant(space, 1.0)
    zero = Observable.zero(space)
    F = Collection([one, zero])
    G = Collection([zero, one])
    mu = space.weight_array()
    costs = {
        perm: max(
            float(mu @ np.abs(F[i].values - G[perm[i]].values)) for i in range(2)
        )
        for perm in itertools.permutations(range(2))
    }
    assert min(costs.values()) == 0.0
    assert collection_distance(F, G) == 0.0


def test_distance_pads_with_zero_functions():
    space = uniform_space(4)
    F = Collection([Observable.constant(space, 0.5)])
    G = Collection([Observable.zero(space), Observable.zero(space)])
    # F padded to two members with a zero function: the bottleneck is 1/2
    assert collection_distance(F, G) == pytest.approx(0.5, abs=1e-15)
    half = Collection([Observable.constant(space, 0.5), Observable.zero(space)])
    assert collection_distance(F, G) == collection_distance(half, G)


def test_distance_space_mismatch():
    F = Collection([Observable.zero(uniform_space(2))])
    G = Collection([Observable.zero(uniform_space(3))])
    with pytest.raises(SpaceMismatch):
        collection_distance(F, G)


def test_distance_pseudometric_properties():
    rng = np.random.default_rng(42)
    for _ in range(300):
        space = random_space(rng)
        F = random_collection(rng, space)
        G = random_collection(rng, space)
        H = random_collection(rng, space)
        d_fg = collection_distance(F, G)
        d_gf = collection_distance(G, F)
        d_fh = collection_distance(F, H)
        d_gh = collection_distance(G, H)
        assert abs(d_fg - d_gf) <= 1e-12
        assert d_fg >= 0.0
        assert d_fg <= d_fh + d_gh + 1e-12


def test_distance_zero_iff_equal_up_to_reordering():
    space = uniform_space(3)
    f = Observable(space, [0.2, 0.7, 0.1])
    g = Observable(space, [0.9, 0.0, 0.4])
    F = Collection([f, g])
    G = Collection([g, f])
    assert collection_distance(F, G) == 0.0
    H = Collection([f, Observable(space, [0.9, 0.0, 0.5])])
    assert collection_distance(F, H) > 0.0


def test_padding_consistency():
    rng = np.random.default_rng(7)
    for _ in range(100):
        space = random_space(rng)
        F = random_collection(rng, space, max_size=3)
        smaller = random_collection(rng, space, max_size=2)
        padded = Collection(
            list(smaller.functions)
            + [Observable.zero(space)] * (max(len(F), len(smaller)) - len(smaller))
        )
        assert collection_distance(F, smaller) == pytest.approx(
            collection_distance(F, padded), abs=1e-15
        )


def test_exhaustive_and_bottleneck_agree():
    rng = np.random.default_rng(11)
    for r in (2, 3, 5, 8):
        for _ in range(25):
            cost = rng.random((r, r))
            assert _exhaustive_minimax(cost) == _bottleneck_minimax(cost)


def test_bottleneck_route_used_for_large_collections():
    rng = np.random.default_rng(5)
    space = random_space(rng)
    F = Collection([Observable(space, rng.random(space.point_count)) for _ in range(10)])
    G = Collection([Observable(space, rng.random(space.point_count)) for _ in range(10)])
    auto = collection_distance(F, G)
    forced = collection_distance(F, G, method="bottleneck")
    assert auto == forced
