"""Entropy traces, estimates, sequence entropy, and the supremum search."""

import math

import numpy as np
import pytest

from bistoch import (
    Collection,
    Observable,
    SequenceSpec,
    convex_combination,
    coordinate_indicator,
    dynamic_entropy_estimate,
    entropy_supremum_search,
    entropy_trace,
    koopman_from_map,
    mean_projection,
    sequence_entropy_trace,
    shift_average_operator,
    static_entropy,
    uniform_space,
)
from bistoch.errors import CellBudgetExceeded, ValidationError

LOG2 = math.log(2.0)


def _two_point_indicator():
    space = uniform_space(2)
    return space, Collection([Observable(space, [1.0, 0.0])])


def test_identity_trace_constant():
    space, F = _two_point_indicator()
    ident = koopman_from_map(space, [0, 1])
    trace = entropy_trace(ident, F, 8)
    for row in trace.rows:
        assert row.entropy == pytest.approx(LOG2, abs=1e-12)
    assert trace.final_slope() == pytest.approx(LOG2 / 8, abs=1e-12)


def test_mean_projection_trace_saturates():
    # Hand enumeration: joining with the constant-1/2 threshold partition
    # doubles the cells, then nothing changes: H_1 = log 2, H_n = 2 log 2.
    space, F = _two_point_indicator()
    op = mean_projection(space)
    trace = entropy_trace(op, F, 6)
    assert trace.rows[0].entropy == pytest.approx(LOG2, abs=1e-12)
    for row in trace.rows[1:]:
        assert row.entropy == pytest.approx(2 * LOG2, abs=1e-12)


def test_bernoulli_shift_trace_exact():
    # cylinder-count oracle: the join of n independent fair indicators has
    # 2^n cells of mass 2^-n, so H_n = n log 2 exactly
    op = shift_average_operator(2, averaging=False)
    F = [coordinate_indicator(2, 1, 1)]
    trace = entropy_trace(op, F, 12)
    for row in trace.rows:
        oracle = -sum((0.5 ** row.n) * math.log(0.5 ** row.n) for _ in range(2 ** row.n))
        assert row.entropy == pytest.approx(oracle, abs=1e-12)
        assert abs(row.entropy - row.n * LOG2) <= 1e-12


def test_monotone_refinement_exact():
    rng = np.random.default_rng(77)
    space = uniform_space(4)
    op = convex_combination(
        0.3, koopman_from_map(space, [1, 2, 3, 0]), mean_projection(space)
    )
    F = Collection([Observable(space, rng.random(4))])
    trace = entropy_trace(op, F, 10)
    hs = trace.entropies()
    for a, b in zip(hs, hs[1:]):
        assert b >= a - 1e-12


def test_time_subadditivity():
    # H_{m+n} <= H_m + H of the block shifted by m, exactly up to float
    space = uniform_space(4)
    op = convex_combination(
        0.5, koopman_from_map(space, [1, 2, 3, 0]), mean_projection(space)
    )
    F = Collection([Observable(space, [1.0, 0.0, 0.0, 0.5])])
    blocks = [F]
    for _ in range(7):
        blocks.append(op.apply_collection(blocks[-1]))

    def joined(parts):
        out = parts[0]
        for p in parts[1:]:
            out = out.concat(p)
        return static_entropy(space, out)

    for m in (1, 2, 4):
        for n in (1, 3):
            assert joined(blocks[: m + n]) <= joined(blocks[:m]) + joined(
                blocks[m : m + n]
            ) + 1e-9


def test_dynamic_estimate_identity_converges():
    space, F = _two_point_indicator()
    ident = koopman_from_map(space, [0, 1])
    result = dynamic_entropy_estimate(ident, F, 32, tol=1e-2)
    assert result.estimate == pytest.approx(LOG2 / 32, abs=1e-12)
    assert result.converged


def test_dynamic_estimate_bernoulli_exact():
    op = shift_average_operator(2, averaging=False)
    result = dynamic_entropy_estimate(op, [coordinate_indicator(2, 1, 1)], 10)
    assert result.estimate == pytest.approx(LOG2, abs=1e-12)
    assert result.converged


def test_dynamic_estimate_mixed_cycle_saturates():
    # Oracle run: the trace saturates at H ~ 2.2572 nats, so the slope is
    # ~0.141 at horizon 16 and drops below 0.1 beyond horizon 23.
    space = uniform_space(3)
    op = convex_combination(
        0.5, koopman_from_map(space, [1, 2, 0]), mean_projection(space)
    )
    F = Collection([Observable.indicator(space, [0])])
    at16 = dynamic_entropy_estimate(op, F, 16)
    assert at16.estimate == pytest.approx(0.14107, abs=5e-4)
    at24 = dynamic_entropy_estimate(op, F, 24)
    assert at24.estimate < 0.1


def test_dynamic_estimate_requires_horizon():
    space, F = _two_point_indicator()
    with pytest.raises(ValidationError):
        dynamic_entropy_estimate(mean_projection(space), F, 3)


def test_sequence_spec_generators():
    assert SequenceSpec.powers_of_two().terms(4) == (2, 4, 8, 16)
    assert SequenceSpec.arithmetic(3).terms(4) == (3, 6, 9, 12)
    assert SequenceSpec.primes().terms(5) == (2, 3, 5, 7, 11)
    assert SequenceSpec.explicit([1, 4, 9]).terms(2) == (1, 4)
    assert SequenceSpec.parse("arithmetic:2").terms(3) == (2, 4, 6)
    assert SequenceSpec.parse("1,5,9").terms(3) == (1, 5, 9)


def test_sequence_spec_validation():
    with pytest.raises(ValidationError):
        SequenceSpec.explicit([3, 2, 1])
    with pytest.raises(ValidationError):
        SequenceSpec.explicit([0, 1])
    with pytest.raises(ValidationError):
        SequenceSpec.explicit([1, 4]).terms(3)


def test_sequence_entropy_cycle_bound():
    # cell-count bound: at most 4(n+1) cells, so H_n <= log(4(n+1))
    space = uniform_space(4)
    op = koopman_from_map(space, [1, 2, 3, 0])
    F = Collection([Observable.indicator(space, [0])])
    trace = sequence_entropy_trace(op, F, SequenceSpec.powers_of_two(), 8)
    for row in trace.rows:
        assert row.entropy <= math.log(4 * (row.n + 1)) + 1e-12
    assert trace.rows[-1].slope < 0.6


def test_sequence_entropy_shift_independent_coordinates():
    # iterates at times 2, 4, 8, 16 read distinct coordinates, so the
    # refinements are independent and entropy adds exactly
    op = shift_average_operator(2, averaging=False)
    F = [coordinate_indicator(2, 1, 1)]
    trace = sequence_entropy_trace(op, F, SequenceSpec.powers_of_two(), 4)
    for row in trace.rows:
        assert abs(row.entropy - row.n * LOG2) <= 1e-12
    assert trace.limsup_estimate == pytest.approx(LOG2, abs=1e-12)


def test_sequence_entropy_mean_projection_stabilizes():
    space, F = _two_point_indicator()
    op = mean_projection(space)
    trace = sequence_entropy_trace(op, F, SequenceSpec.arithmetic(1), 12)
    # partitions stabilize after the first iterate: H_n constant
    hs = trace.entropies()
    assert max(hs) - min(hs) < 1e-12
    assert trace.rows[-1].slope < 0.1


def test_search_saturating_operator_small_bound():
    op = mean_projection(uniform_space(2))
    result = entropy_supremum_search(op, budget=6, seed=2, horizon=32)
    assert result.bound < 0.05


def test_search_shift_includes_coordinate_indicator():
    op = shift_average_operator(2, averaging=False)
    result = entropy_supremum_search(op, budget=1, seed=0, horizon=10)
    assert result.samples[0].kind == "coordinate_indicator"
    assert result.bound == pytest.approx(LOG2, abs=1e-12)


def test_search_identity_bound_shrinks_with_horizon():
    space = uniform_space(2)
    ident = koopman_from_map(space, [0, 1])
    bounds = [
        entropy_supremum_search(ident, budget=4, seed=9, horizon=h).bound
        for h in (8, 16, 32)
    ]
    assert bounds[0] > bounds[1] > bounds[2]
    assert bounds[2] < 0.1


def test_search_determinism():
    op = mean_projection(uniform_space(5))
    a = entropy_supremum_search(op, budget=5, seed=123, horizon=8)
    b = entropy_supremum_search(op, budget=5, seed=123, horizon=8)
    assert a == b


def test_singleton_reduction_verdicts_agree():
    # zero/nonzero verdicts of singleton vs multi-function searches agree
    shift = shift_average_operator(2, averaging=False)
    seq = SequenceSpec.powers_of_two()
    cases = [
        (mean_projection(uniform_space(4)), 12),
        (koopman_from_map(uniform_space(4), [1, 2, 3, 0]), 12),
        (shift, 6),
    ]
    for op, horizon in cases:
        single = entropy_supremum_search(
            op, budget=4, seed=3, horizon=horizon, sequence=seq, collection_size=1
        )
        multi = entropy_supremum_search(
            op, budget=4, seed=3, horizon=horizon, sequence=seq, collection_size=2
        )
        assert (single.bound > 0.05) == (multi.bound > 0.05)


def test_cell_budget_guard():
    op = shift_average_operator(2, averaging=False)
    F = [coordinate_indicator(2, 1, 1)]
    with pytest.raises(CellBudgetExceeded) as err:
        entropy_trace(op, F, 12, cell_budget=200)
    partial = err.value.partial_trace
    assert partial is not None
    assert len(partial.rows) >= 1
    assert partial.rows[0].entropy == pytest.approx(LOG2, abs=1e-12)


def test_trace_metadata():
    space, F = _two_point_indicator()
    trace = entropy_trace(mean_projection(space), F, 5)
    assert trace.collection_size == 1
    assert trace.horizon == 5
    assert trace.log_base == "nat"
    assert all(row.slope >= 0.0 for row in trace.rows)
