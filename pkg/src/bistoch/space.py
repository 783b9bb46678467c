"""Finite probability spaces, unit-interval observables, and collections.

A collection is a finite ordered list of functions X -> [0, 1] over one
space; it plays the role a finite partition plays for pointwise dynamics.
The distance between two collections is the smallest achievable bottleneck
(min over pairings of the max mu-weighted L1 gap), with the shorter
collection padded by zero functions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import MassNotOne, NonPositiveWeight, SpaceMismatch, ValidationError

MASS_TOL = 1e-12
EQUALITY_TOL = 1e-12

# Values produced by averaging kernels can overshoot [0, 1] by float dust;
# anything inside this slack is clipped, anything outside is rejected.
RANGE_SLACK = 1e-9

EXHAUSTIVE_LIMIT = 8


@dataclass(frozen=True)
class FiniteSpace:
    """Finite set of points carrying strictly positive probability weights."""

    weights: tuple[float, ...]

    @property
    def point_count(self) -> int:
        return len(self.weights)

    @cached_property
    def _weight_array(self) -> np.ndarray:
        arr = np.asarray(self.weights, dtype=float)
        arr.flags.writeable = False
        return arr

    def weight_array(self) -> np.ndarray:
        return self._weight_array

    def integrate(self, values) -> float:
        """Integral of a point-indexed value vector against the weights."""
        return float(self._weight_array @ np.asarray(values, dtype=float))

    def l1_norm(self, values) -> float:
        return float(self._weight_array @ np.abs(np.asarray(values, dtype=float)))

    def l2_norm(self, values) -> float:
        v = np.asarray(values, dtype=float)
        return float(math.sqrt(self._weight_array @ (v * v)))


def make_space(weights: Sequence[float]) -> FiniteSpace:
    """Validate weights and build a space.

    Weights are stored exactly as given: a mass defect is rejected, never
    repaired by normalization.
    """
    ws = tuple(float(w) for w in weights)
    if not ws:
        raise ValidationError("a space needs at least one point")
    for i, w in enumerate(ws):
        if not math.isfinite(w) or w <= 0.0:
            raise NonPositiveWeight(f"weight {w!r} at point {i} is not positive")
    total = math.fsum(ws)
    if abs(total - 1.0) > MASS_TOL:
        raise MassNotOne(f"weights sum to {total!r}, not 1")
    return FiniteSpace(ws)


def uniform_space(point_count: int) -> FiniteSpace:
    """Uniform probability on ``point_count`` points."""
    if point_count < 1:
        raise ValidationError("point_count must be >= 1")
    return make_space([1.0 / point_count] * point_count)


class Observable:
    """A function X -> [0, 1] given by its values at the points of a space."""

    __slots__ = ("space", "values")

    def __init__(self, space: FiniteSpace, values):
        vals = np.array(values, dtype=float)
        if vals.shape != (space.point_count,):
            raise ValidationError(
                f"expected {space.point_count} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValidationError("observable values must be finite")
        if vals.min(initial=0.0) < -RANGE_SLACK or vals.max(initial=1.0) > 1.0 + RANGE_SLACK:
            raise ValidationError("observable values must lie in [0, 1]")
        np.clip(vals, 0.0, 1.0, out=vals)
        vals.flags.writeable = False
        self.space = space
        self.values = vals

    @classmethod
    def zero(cls, space: FiniteSpace) -> "Observable":
        return cls(space, np.zeros(space.point_count))

    @classmethod
    def constant(cls, space: FiniteSpace, value: float) -> "Observable":
        return cls(space, np.full(space.point_count, float(value)))

    @classmethod
    def indicator(cls, space: FiniteSpace, points) -> "Observable":
        vals = np.zeros(space.point_count)
        vals[list(points)] = 1.0
        return cls(space, vals)

    def same_as(self, other: "Observable", tol: float = EQUALITY_TOL) -> bool:
        """Equality in the mu-weighted L1 sense."""
        if self.space != other.space:
            raise SpaceMismatch("observables live on different spaces")
        return self.space.l1_norm(self.values - other.values) <= tol

    def __repr__(self) -> str:
        return f"Observable({self.values.tolist()!r})"


class Collection:
    """Non-empty ordered list of observables over a single space."""

    __slots__ = ("functions",)

    def __init__(self, functions: Sequence[Observable]):
        funcs = tuple(functions)
        if not funcs:
            raise ValidationError("a collection must contain at least one function")
        space = funcs[0].space
        for f in funcs[1:]:
            if f.space != space:
                raise SpaceMismatch("collection members live on different spaces")
        self.functions = funcs

    @property
    def space(self) -> FiniteSpace:
        return self.functions[0].space

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self) -> Iterator[Observable]:
        return iter(self.functions)

    def __getitem__(self, i: int) -> Observable:
        return self.functions[i]

    def values_matrix(self) -> np.ndarray:
        """Stack values as a (len, point_count) array."""
        return np.array([f.values for f in self.functions], dtype=float)

    def concat(self, other: "Collection") -> "Collection":
        if self.space != other.space:
            raise SpaceMismatch("cannot concatenate collections on different spaces")
        return Collection(self.functions + other.functions)

    def __repr__(self) -> str:
        return f"Collection(size={len(self)}, points={self.space.point_count})"


def concat(first: Collection, second: Collection) -> Collection:
    return first.concat(second)


def _padded_values(coll: Collection, size: int) -> np.ndarray:
    mat = coll.values_matrix()
    if len(coll) < size:
        pad = np.zeros((size - len(coll), coll.space.point_count))
        mat = np.vstack([mat, pad])
    return mat


def _exhaustive_minimax(cost: np.ndarray) -> float:
    r = cost.shape[0]
    idx = np.arange(r)
    best = math.inf
    for perm in itertools.permutations(range(r)):
        m = float(cost[idx, list(perm)].max())
        if m < best:
            best = m
    return best


def _has_perfect_matching(mask: np.ndarray) -> bool:
    graph = csr_matrix(mask.astype(np.uint8))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool((match != -1).all())


def _bottleneck_minimax(cost: np.ndarray) -> float:
    """Min over pairings of the max entry, as a bottleneck assignment.

    Binary search over the sorted entry values; feasibility at a threshold
    is a bipartite perfect-matching question.
    """
    levels = np.unique(cost)
    lo, hi = 0, len(levels) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(cost <= levels[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(levels[lo])


def collection_distance(
    first: Collection, second: Collection, method: str = "auto"
) -> float:
    """Bottleneck matching distance between two collections.

    The shorter collection is padded with zero functions up to the larger
    cardinality r; the value is the minimum over pairings of the maximum
    mu-weighted L1 gap.  Exhaustive search is exact for r <= 8; larger r
    uses a bottleneck-assignment search, which computes the same value.
    """
    if first.space != second.space:
        raise SpaceMismatch("collections live on different spaces")
    r = max(len(first), len(second))
    mu = first.space.weight_array()
    fm = _padded_values(first, r)
    gm = _padded_values(second, r)
    cost = np.abs(fm[:, None, :] - gm[None, :, :]) @ mu
    if method == "auto":
        method = "exhaustive" if r <= EXHAUSTIVE_LIMIT else "bottleneck"
    if method == "exhaustive":
        return _exhaustive_minimax(cost)
    if method == "bottleneck":
        return _bottleneck_minimax(cost)
    raise ValidationError(f"unknown distance method {method!r}")
