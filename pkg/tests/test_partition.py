"""Threshold partitions, their entropies, and the join identity."""

import math

import numpy as np
import pytest

from bistoch import (
    Collection,
    Observable,
    cell_measures,
    collection_distance,
    conditional_entropy,
    join_partitions,
    make_space,
    static_entropy,
    uniform_space,
)
from bistoch.errors import SpaceMismatch

from conftest import random_collection, random_space

LOG2 = math.log(2.0)


def test_cell_measures_two_point_indicator():
    # Hand enumeration: at a the fiber (0,1] lies inside the graph region,
    # at b it lies outside.
    space = uniform_space(2)
    F = Collection([Observable(space, [1.0, 0.0])])
    part = cell_measures(space, F)
    assert part.cells == {1: 0.5, 0: 0.5}


def test_cell_measures_constant_one():
    space = uniform_space(3)
    F = Collection([Observable.constant(space, 1.0)])
    part = cell_measures(space, F)
    assert part.cells == {1: 1.0}


def test_cell_measures_duplicate_function():
    space = uniform_space(2)
    f = Observable(space, [1.0, 0.0])
    single = cell_measures(space, Collection([f]))
    double = cell_measures(space, Collection([f, f]))
    # keys differ ({both} vs {first}) but the measures match
    assert sorted(single.cells.values()) == sorted(double.cells.values())
    assert set(double.cells) == {0b11, 0b00}


def test_cell_measures_space_mismatch():
    F = Collection([Observable.zero(uniform_space(2))])
    with pytest.raises(SpaceMismatch):
        cell_measures(uniform_space(3), F)


def test_cell_count_bound():
    rng = np.random.default_rng(0)
    for _ in range(50):
        space = random_space(rng)
        F = random_collection(rng, space)
        part = cell_measures(space, F)
        assert part.cell_count <= space.point_count * (len(F) + 1)
        assert part.total_mass() == pytest.approx(1.0, abs=1e-12)


def test_static_entropy_trivial_cases():
    space = uniform_space(2)
    assert static_entropy(space, Collection([Observable.constant(space, 1.0)])) == 0.0
    F = Collection([Observable(space, [1.0, 0.0])])
    assert static_entropy(space, F) == pytest.approx(LOG2, abs=1e-14)


def test_static_entropy_half_constant():
    # cells of mass 1/2 and 1/2 regardless of the space
    space = make_space([0.2, 0.3, 0.5])
    F = Collection([Observable.constant(space, 0.5)])
    assert static_entropy(space, F) == pytest.approx(LOG2, abs=1e-14)


def test_conditional_entropy_examples():
    space = uniform_space(2)
    f = Observable(space, [1.0, 0.0])
    F = Collection([f])
    assert conditional_entropy(space, F, F) == 0.0
    zero = Collection([Observable.zero(space)])
    assert conditional_entropy(space, F, zero) == pytest.approx(
        static_entropy(space, F), abs=1e-14
    )
    G = Collection([Observable(space, [0.0, 1.0])])
    assert conditional_entropy(space, F, G) == pytest.approx(0.0, abs=1e-12)


def test_join_identity_exact():
    # The concatenated partition and the join of the two partitions must
    # agree as exact cell-measure maps, bit for bit.
    rng = np.random.default_rng(123)
    for _ in range(200):
        space = random_space(rng)
        F = random_collection(rng, space)
        G = random_collection(rng, space)
        joined = join_partitions(cell_measures(space, F), cell_measures(space, G))
        direct = cell_measures(space, F.concat(G))
        assert joined.cells == direct.cells


def test_subadditivity_and_monotonicity():
    rng = np.random.default_rng(321)
    for _ in range(300):
        space = random_space(rng)
        F = random_collection(rng, space)
        G = random_collection(rng, space)
        h_f = static_entropy(space, F)
        h_g = static_entropy(space, G)
        h_fg = static_entropy(space, F.concat(G))
        assert h_fg <= h_f + h_g + 1e-9
        assert h_fg >= max(h_f, h_g) - 1e-9
        assert h_f >= 0.0


def test_continuity_in_collection_distance():
    # Aggregate Rokhlin-style distance H(F|G) + H(G|F) over a fixed corpus
    # must decrease as the perturbation scale shrinks by factors of ten.
    rng = np.random.default_rng(99)
    corpus = []
    for _ in range(20):
        space = random_space(rng)
        F = random_collection(rng, space)
        H = random_collection(rng, space, max_size=len(F))
        corpus.append((space, F, H))
    totals = {}
    for delta in (1e-2, 1e-3, 1e-4):
        total = 0.0
        for space, F, H in corpus:
            perturbed = []
            for i, f in enumerate(F):
                other = H[i % len(H)].values
                perturbed.append(
                    Observable(space, (1 - delta) * f.values + delta * other)
                )
            G = Collection(perturbed)
            assert collection_distance(F, G) <= delta + 1e-12
            total += conditional_entropy(space, F, G) + conditional_entropy(
                space, G, F
            )
        totals[delta] = total
    assert totals[1e-4] <= totals[1e-3] <= totals[1e-2]


def test_degenerate_equal_values_no_special_case():
    space = uniform_space(3)
    F = Collection([Observable.constant(space, 0.4)])
    part = cell_measures(space, F)
    assert part.cells[1] == pytest.approx(0.4, abs=1e-15)
    assert part.cells[0] == pytest.approx(0.6, abs=1e-15)


def test_key_decoding():
    space = uniform_space(2)
    F = Collection(
        [Observable(space, [1.0, 0.0]), Observable(space, [0.5, 0.5])]
    )
    part = cell_measures(space, F)
    for key in part.cells:
        indices = part.key_indices(key)
        assert all(0 <= i < 2 for i in indices)


def test_debug_csv_dump():
    space = uniform_space(2)
    part = cell_measures(space, Collection([Observable(space, [1.0, 0.0])]))
    lines = part.to_csv().strip().splitlines()
    assert lines[0] == "cell_key,measure"
    parsed = {row.split(",")[0]: float(row.split(",")[1]) for row in lines[1:]}
    assert parsed == {"0": 0.5, "": 0.5}
