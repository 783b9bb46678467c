"""Dynamic entropy, sequence entropy, and a randomized lower-bound search.

The dynamic entropy of an operator relative to a collection F is the slope
of H(F v TF v ... v T^(n-1)F); along an increasing integer sequence the
iterates are taken at the prescribed times instead and the limsup is
estimated by the running maximum of H_n / n over a trailing window.  The
supremum over all collections is not computable; a seeded sampler provides
a lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CellBudgetExceeded, ValidationError
from .operator import DenseOperator, ShiftOperator, WindowObservable, coordinate_indicator
from .partition import static_entropy
from .space import Collection, FiniteSpace, Observable, make_space

DEFAULT_CELL_BUDGET = 10_000_000

_PRIME_CANDIDATES_START = 2


@dataclass(frozen=True)
class TraceRow:
    n: int
    entropy: float
    slope: float


@dataclass
class EntropyTrace:
    """Rows (n, H_n, H_n / n) of a join-entropy computation."""

    rows: list[TraceRow]
    collection_size: int
    horizon: int
    log_base: str = "nat"
    sequence: tuple[int, ...] | None = None
    limsup_estimate: float | None = None

    def entropies(self) -> list[float]:
        return [row.entropy for row in self.rows]

    def slopes(self) -> list[float]:
        return [row.slope for row in self.rows]

    def final_slope(self) -> float:
        return self.rows[-1].slope


class SequenceSpec:
    """Strictly increasing positive integers, explicit or generated."""

    __slots__ = ("name", "_terms", "_step")

    def __init__(self, name: str, terms=None, step: int | None = None):
        self.name = name
        self._terms = tuple(int(t) for t in terms) if terms is not None else None
        self._step = step
        if self._terms is not None:
            self._validate(self._terms)

    @staticmethod
    def _validate(terms):
        if not terms:
            raise ValidationError("sequence must be non-empty")
        if terms[0] < 1:
            raise ValidationError("sequence terms must be positive")
        for a, b in zip(terms, terms[1:]):
            if b <= a:
                raise ValidationError("sequence must be strictly increasing")

    @classmethod
    def explicit(cls, terms) -> "SequenceSpec":
        return cls("explicit", terms=terms)

    @classmethod
    def powers_of_two(cls) -> "SequenceSpec":
        return cls("powers_of_two")

    @classmethod
    def arithmetic(cls, step: int) -> "SequenceSpec":
        if step < 1:
            raise ValidationError("arithmetic step must be >= 1")
        return cls("arithmetic", step=step)

    @classmethod
    def primes(cls) -> "SequenceSpec":
        return cls("primes")

    @classmethod
    def parse(cls, text: str) -> "SequenceSpec":
        """Parse 'powers_of_two', 'primes', 'arithmetic:<step>' or a comma list."""
        text = text.strip()
        if text == "powers_of_two":
            return cls.powers_of_two()
        if text == "primes":
            return cls.primes()
        if text.startswith("arithmetic:"):
            return cls.arithmetic(int(text.split(":", 1)[1]))
        try:
            terms = [int(part) for part in text.split(",")]
        except ValueError as exc:
            raise ValidationError(f"cannot parse sequence spec {text!r}") from exc
        return cls.explicit(terms)

    def terms(self, count: int) -> tuple[int, ...]:
        if count < 1:
            raise ValidationError("need at least one term")
        if self._terms is not None:
            if count > len(self._terms):
                raise ValidationError(
                    f"explicit sequence has only {len(self._terms)} terms"
                )
            return self._terms[:count]
        if self.name == "powers_of_two":
            return tuple(2 ** k for k in range(1, count + 1))
        if self.name == "arithmetic":
            return tuple(self._step * k for k in range(1, count + 1))
        if self.name == "primes":
            out: list[int] = []
            candidate = _PRIME_CANDIDATES_START
            while len(out) < count:
                if all(candidate % p for p in out if p * p <= candidate):
                    out.append(candidate)
                candidate += 1
            return tuple(out)
        raise ValidationError(f"unknown sequence generator {self.name!r}")


def _varying_axes(obs: WindowObservable) -> tuple[list[int], np.ndarray]:
    """Coordinates the tensor actually varies along, plus the tensor reduced
    to those axes (constant axes are sliced away; this is exact)."""
    vals = obs.values
    varying = []
    index: list = []
    for axis in range(obs.width):
        moved = np.moveaxis(vals, axis, 0)
        spread = moved.max(axis=0) - moved.min(axis=0)
        if np.any(spread > 0.0):
            varying.append(obs.start + axis)
            index.append(slice(None))
        else:
            index.append(0)
    return varying, vals[tuple(index)]


def _embedded_collection(
    observables: Sequence[WindowObservable], cell_budget: int
) -> tuple[FiniteSpace, Collection]:
    """Realize window observables on the finite product over the coordinates
    they actually depend on."""
    grid = observables[0].grid_size
    for obs in observables:
        if obs.grid_size != grid:
            raise ValidationError("window observables use different grids")
    reduced = [_varying_axes(obs) for obs in observables]
    coords = sorted({c for varying, _ in reduced for c in varying})
    count = grid ** len(coords)
    if count * (len(observables) + 1) > cell_budget:
        raise CellBudgetExceeded(
            f"joint window over {len(coords)} coordinates needs up to "
            f"{count * (len(observables) + 1)} cells"
        )
    position = {c: i for i, c in enumerate(coords)}
    weight = 1.0 / count
    space = make_space([weight] * count)
    shape = (grid,) * len(coords) if coords else (1,)
    functions = []
    for varying, tensor in reduced:
        if not varying:
            values = np.full(shape, float(tensor)).ravel()
        else:
            idx_shape = [1] * len(coords)
            for c in varying:
                idx_shape[position[c]] = grid
            values = np.broadcast_to(tensor.reshape(idx_shape), shape).ravel()
        functions.append(Observable(space, values))
    return space, Collection(functions)


def _block_entropy_dense(
    operator: DenseOperator, blocks: list[Collection]
) -> float:
    joined = blocks[0]
    for block in blocks[1:]:
        joined = joined.concat(block)
    return static_entropy(operator.space, joined)


def _check_dense_budget(
    operator: DenseOperator, size: int, cell_budget: int, trace: EntropyTrace
):
    if operator.space.point_count * (size + 1) > cell_budget:
        raise CellBudgetExceeded(
            f"join of {size} functions on {operator.space.point_count} points "
            "exceeds the cell budget",
            partial_trace=trace,
        )


def entropy_trace(
    operator,
    collection,
    horizon: int,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> EntropyTrace:
    """Entropies of F v TF v ... v T^(n-1)F for n = 1..horizon.

    Dense backend: ``collection`` is a Collection over the operator's
    space.  Shift backend: a sequence of WindowObservable; the join is
    evaluated on the finite product over the coordinates in play.
    """
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    if isinstance(operator, DenseOperator):
        return _entropy_trace_dense(operator, collection, horizon, cell_budget)
    if isinstance(operator, ShiftOperator):
        return _entropy_trace_shift(operator, collection, horizon, cell_budget)
    raise ValidationError(f"unsupported operator type {type(operator).__name__}")


def _entropy_trace_dense(operator, collection, horizon, cell_budget):
    if collection.space != operator.space:
        raise ValidationError("collection does not live on the operator's space")
    rows: list[TraceRow] = []
    trace = EntropyTrace(rows, len(collection), horizon)
    blocks = [collection]
    for n in range(1, horizon + 1):
        _check_dense_budget(operator, n * len(collection), cell_budget, trace)
        h = _block_entropy_dense(operator, blocks)
        rows.append(TraceRow(n, h, h / n))
        if n < horizon:
            blocks.append(operator.apply_collection(blocks[-1]))
    return trace


def _entropy_trace_shift(operator, observables, horizon, cell_budget):
    obs = list(observables)
    if not obs:
        raise ValidationError("need at least one window observable")
    rows: list[TraceRow] = []
    trace = EntropyTrace(rows, len(obs), horizon)
    current = obs
    joined: list[WindowObservable] = []
    for n in range(1, horizon + 1):
        joined.extend(current)
        try:
            space, coll = _embedded_collection(joined, cell_budget)
        except CellBudgetExceeded as exc:
            exc.partial_trace = trace
            raise
        h = static_entropy(space, coll)
        rows.append(TraceRow(n, h, h / n))
        if n < horizon:
            current = [operator.apply(f) for f in current]
    return trace


@dataclass(frozen=True)
class EntropyEstimate:
    estimate: float
    converged: bool
    trace: EntropyTrace


def dynamic_entropy_estimate(
    operator,
    collection,
    horizon: int,
    tol: float = 1e-2,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> EntropyEstimate:
    """Finite-horizon slope H_N / N with a stabilization flag.

    Convergence is declared when the last three slope increments all stay
    below ``tol``; the limit is known to exist, so stabilized slopes are
    meaningful.
    """
    if horizon < 4:
        raise ValidationError("horizon must be >= 4")
    trace = entropy_trace(operator, collection, horizon, cell_budget)
    slopes = trace.slopes()
    diffs = [abs(slopes[i] - slopes[i - 1]) for i in range(len(slopes) - 3, len(slopes))]
    converged = all(d < tol for d in diffs)
    return EntropyEstimate(slopes[-1], converged, trace)


def sequence_entropy_trace(
    operator,
    collection,
    sequence: SequenceSpec,
    horizon: int,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> EntropyTrace:
    """Entropies of the joins along T^(t_1)F, ..., T^(t_n)F.

    The reported ``limsup_estimate`` is the running maximum of H_n / n over
    the final ceil(horizon / 3) rows; finite horizons cannot certify a
    limsup, and the trailing-window maximum is the conservative choice.
    """
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    terms = sequence.terms(horizon)
    if isinstance(operator, DenseOperator):
        trace = _sequence_trace_dense(operator, collection, terms, horizon, cell_budget)
    elif isinstance(operator, ShiftOperator):
        trace = _sequence_trace_shift(operator, collection, terms, horizon, cell_budget)
    else:
        raise ValidationError(f"unsupported operator type {type(operator).__name__}")
    window = max(1, math.ceil(horizon / 3))
    trace.limsup_estimate = max(row.slope for row in trace.rows[-window:])
    return trace


def _sequence_trace_dense(operator, collection, terms, horizon, cell_budget):
    if collection.space != operator.space:
        raise ValidationError("collection does not live on the operator's space")
    rows: list[TraceRow] = []
    trace = EntropyTrace(rows, len(collection), horizon, sequence=terms)
    values = collection.values_matrix()
    blocks: list[Collection] = []
    previous = 0
    for n, t in enumerate(terms, start=1):
        step = operator.power_matrix(t - previous)
        values = values @ step.T
        previous = t
        blocks.append(
            Collection([Observable(operator.space, row) for row in values])
        )
        _check_dense_budget(operator, n * len(collection), cell_budget, trace)
        h = _block_entropy_dense(operator, blocks)
        rows.append(TraceRow(n, h, h / n))
    return trace


def _sequence_trace_shift(operator, observables, terms, horizon, cell_budget):
    obs = list(observables)
    if not obs:
        raise ValidationError("need at least one window observable")
    rows: list[TraceRow] = []
    trace = EntropyTrace(rows, len(obs), horizon, sequence=terms)
    current = obs
    joined: list[WindowObservable] = []
    previous = 0
    for n, t in enumerate(terms, start=1):
        current = [operator.iterate(f, t - previous) for f in current]
        previous = t
        joined.extend(current)
        try:
            space, coll = _embedded_collection(joined, cell_budget)
        except CellBudgetExceeded as exc:
            exc.partial_trace = trace
            raise
        h = static_entropy(space, coll)
        rows.append(TraceRow(n, h, h / n))
    return trace


@dataclass(frozen=True)
class SearchSample:
    kind: str
    estimate: float


@dataclass(frozen=True)
class SearchResult:
    bound: float
    samples: tuple[SearchSample, ...]


def _dense_candidates(operator, budget, rng, collection_size):
    space = operator.space
    n = space.point_count
    yield "point_indicator", Collection([Observable.indicator(space, [0])])
    produced = 1
    kinds = ("set_indicator", "uniform_values", "eigenvector_magnitude")
    eigvecs = None
    while produced < budget:
        members = []
        for _ in range(collection_size):
            kind = kinds[produced % len(kinds)]
            if kind == "set_indicator":
                mask = rng.integers(0, 2, size=n)
                if mask.sum() in (0, n):
                    mask[rng.integers(0, n)] ^= 1
                members.append(Observable(space, mask.astype(float)))
            elif kind == "uniform_values":
                members.append(Observable(space, rng.random(n)))
            else:
                if eigvecs is None:
                    _, eigvecs = np.linalg.eig(operator.matrix)
                col = np.abs(eigvecs[:, rng.integers(0, n)].real)
                top = col.max()
                members.append(
                    Observable(space, col / top if top > 0 else np.zeros(n))
                )
        yield kind, Collection(members)
        produced += 1


def _shift_candidates(operator, budget, rng, collection_size):
    g = operator.grid_size
    yield "coordinate_indicator", [coordinate_indicator(g, 1, g - 1)]
    produced = 1
    while produced < budget:
        members = []
        for _ in range(collection_size):
            if produced % 2 == 0:
                atom = int(rng.integers(0, g))
                members.append(coordinate_indicator(g, 1, atom))
            else:
                members.append(WindowObservable(1, rng.random(g)))
        yield "random_window", members
        produced += 1


def entropy_supremum_search(
    operator,
    budget: int,
    seed: int,
    horizon: int = 32,
    tol: float = 1e-2,
    sequence: SequenceSpec | None = None,
    collection_size: int = 1,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> SearchResult:
    """Randomized lower bound for the entropy supremum over collections.

    Samples mix indicator functions, uniform values, and eigenvector
    magnitudes (dense backend); singleton collections suffice to detect a
    nonzero supremum, and are the default.  Deterministic under the seed.
    """
    if budget < 1:
        raise ValidationError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(operator, DenseOperator):
        candidates = _dense_candidates(operator, budget, rng, collection_size)
    elif isinstance(operator, ShiftOperator):
        candidates = _shift_candidates(operator, budget, rng, collection_size)
    else:
        raise ValidationError(f"unsupported operator type {type(operator).__name__}")
    samples = []
    for kind, coll in candidates:
        if sequence is None:
            est = dynamic_entropy_estimate(operator, coll, horizon, tol, cell_budget)
            samples.append(SearchSample(kind, est.estimate))
        else:
            trace = sequence_entropy_trace(operator, coll, sequence, horizon, cell_budget)
            samples.append(SearchSample(kind, trace.limsup_estimate))
    bound = max(s.estimate for s in samples)
    return SearchResult(bound, tuple(samples))
