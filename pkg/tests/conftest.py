"""Shared fixtures: random spaces, collections, and the operator corpus."""

import numpy as np
import pytest

from bistoch import (
    Collection,
    Observable,
    annulus_operator,
    contraction_rotation_operator,
    convex_combination,
    koopman_from_map,
    make_space,
    mean_projection,
    sample_doubly_stochastic,
    uniform_space,
)


def random_space(rng, max_points=6):
    n = int(rng.integers(2, max_points + 1))
    raw = rng.random(n) + 0.1
    return make_space(raw / raw.sum())


def random_observable(rng, space):
    return Observable(space, rng.random(space.point_count))


def random_collection(rng, space, max_size=3):
    size = int(rng.integers(1, max_size + 1))
    return Collection([random_observable(rng, space) for _ in range(size)])


@pytest.fixture(scope="session")
def gallery_operators():
    """The dense flagship operators, used across property suites."""
    three = uniform_space(3)
    cycle3 = koopman_from_map(three, [1, 2, 0])
    return {
        "mean_projection": mean_projection(uniform_space(8)),
        "cycle4": koopman_from_map(uniform_space(4), [1, 2, 3, 0]),
        "cycle3": cycle3,
        "half_mixed_cycle": convex_combination(0.5, cycle3, mean_projection(three)),
        "circulant": _circulant(),
        "contraction_rotation": contraction_rotation_operator(64, 1),
        "annulus_plain": annulus_operator(8, 4, 3, "plain"),
        "annulus_modified": annulus_operator(8, 4, 3, "modified"),
    }


def _circulant():
    return_matrix = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]
    from bistoch import from_matrix

    return from_matrix(uniform_space(3), return_matrix)


@pytest.fixture(scope="session")
def random_corpus():
    """200 sampled doubly stochastic operators, sizes 2 through 12."""
    rng = np.random.default_rng(12345)
    ops = []
    for i in range(200):
        size = 2 + (i % 11)
        ops.append(sample_doubly_stochastic(size, rng))
    return ops
