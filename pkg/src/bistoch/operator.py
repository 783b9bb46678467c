"""Doubly stochastic operators: dense kernels and a symbolic shift backend.

A dense operator is a row-stochastic kernel P with the space's measure as a
stationary (left) vector; this is exactly positivity, T1 = 1, and integral
preservation.  The shift backend realizes the averaging left shift on an
infinite product of unit intervals, discretized to a uniform grid per
coordinate: observables carry an explicit coordinate window and one
application moves the window right by one, so iteration is exact without
truncating the measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    AlphaRange,
    BadParameters,
    NegativeEntry,
    NotInvariant,
    RowMassError,
    SpaceMismatch,
    StationarityError,
    ValidationError,
    WindowOverflow,
)
from .space import Collection, FiniteSpace, Observable, make_space, uniform_space

KERNEL_TOL = 1e-12

DEFAULT_MAX_WINDOW = 12


class DenseOperator:
    """Doubly stochastic operator given by an explicit transition kernel."""

    __slots__ = ("space", "matrix")

    def __init__(self, space: FiniteSpace, kernel):
        mat = np.array(kernel, dtype=float)
        n = space.point_count
        if mat.shape != (n, n):
            raise ValidationError(f"kernel shape {mat.shape} does not match {n} points")
        if not np.all(np.isfinite(mat)):
            raise ValidationError("kernel entries must be finite")
        if mat.min() < 0.0:
            raise NegativeEntry(f"kernel has a negative entry ({mat.min()!r})")
        row_dev = np.abs(mat.sum(axis=1) - 1.0).max()
        if row_dev > KERNEL_TOL:
            raise RowMassError(f"row mass deviates from 1 by {row_dev:.3e}")
        mu = space.weight_array()
        stat_dev = np.abs(mu @ mat - mu).max()
        if stat_dev > KERNEL_TOL:
            raise StationarityError(f"mu^T P deviates from mu^T by {stat_dev:.3e}")
        mat.flags.writeable = False
        self.space = space
        self.matrix = mat

    def apply(self, values) -> np.ndarray:
        """(Tf)(x) = sum_y P[x, y] f(y)."""
        return self.matrix @ np.asarray(values, dtype=float)

    def apply_observable(self, f: Observable) -> Observable:
        if f.space != self.space:
            raise SpaceMismatch("observable lives on a different space")
        return Observable(self.space, self.apply(f.values))

    def apply_collection(self, coll: Collection) -> Collection:
        if coll.space != self.space:
            raise SpaceMismatch("collection lives on a different space")
        return Collection([Observable(self.space, row) for row in
                           coll.values_matrix() @ self.matrix.T])

    def power_matrix(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValidationError("power must be nonnegative")
        return np.linalg.matrix_power(self.matrix, n)

    def iterate(self, values, n: int) -> np.ndarray:
        return self.power_matrix(n) @ np.asarray(values, dtype=float)

    def __repr__(self) -> str:
        return f"DenseOperator(points={self.space.point_count})"


def from_matrix(space: FiniteSpace, kernel) -> DenseOperator:
    """Validate a kernel against the space and wrap it."""
    return DenseOperator(space, kernel)


def koopman_from_map(space: FiniteSpace, point_map: Sequence[int]) -> DenseOperator:
    """Composition operator Tf = f o phi of a measure-preserving point map."""
    phi = [int(v) for v in point_map]
    n = space.point_count
    if len(phi) != n or any(v < 0 or v >= n for v in phi):
        raise ValidationError("point map must send every point into the space")
    mu = space.weight_array()
    push = np.zeros(n)
    for x, y in enumerate(phi):
        push[y] += mu[x]
    if np.abs(push - mu).max() > KERNEL_TOL:
        raise NotInvariant("the measure is not invariant under the point map")
    kernel = np.zeros((n, n))
    kernel[np.arange(n), phi] = 1.0
    return DenseOperator(space, kernel)


def mean_projection(space: FiniteSpace) -> DenseOperator:
    """The rank-one operator Sf = integral of f (a constant function)."""
    mu = space.weight_array()
    return DenseOperator(space, np.tile(mu, (space.point_count, 1)))


def convex_combination(
    alpha: float, first: DenseOperator, second: DenseOperator
) -> DenseOperator:
    """Entrywise mixture (1 - alpha) * first + alpha * second."""
    if not 0.0 <= alpha <= 1.0:
        raise AlphaRange(f"alpha={alpha!r} outside [0, 1]")
    if first.space != second.space:
        raise SpaceMismatch("operators live on different spaces")
    return DenseOperator(
        first.space, (1.0 - alpha) * first.matrix + alpha * second.matrix
    )


def l1_operator_norm(matrix: np.ndarray, space: FiniteSpace) -> float:
    """Operator norm on L1(mu) of a kernel-style matrix.

    The L1(mu) unit ball has the scaled signed point masses e_y / mu(y) as
    its extreme points, so the norm is the exact maximum of the image norm
    over that finite family.
    """
    mu = space.weight_array()
    column_norms = (mu @ np.abs(matrix)) / mu
    return float(column_norms.max())


def l1_operator_distance(first: DenseOperator, second: DenseOperator) -> float:
    if first.space != second.space:
        raise SpaceMismatch("operators live on different spaces")
    return l1_operator_norm(first.matrix - second.matrix, first.space)


def contraction_rotation_operator(q: int, p: int) -> DenseOperator:
    """Half rotation plus half mean on the q-point discretized circle.

    Tf = (1/2) f o R + (1/2) integral(f), R the rotation by p grid steps.
    Every character e_n is an eigenfunction with eigenvalue of modulus 1/2,
    so the operator has no unimodular spectrum off the constants.
    """
    if q < 1:
        raise BadParameters("q must be >= 1")
    space = uniform_space(q)
    rotation = koopman_from_map(space, [(x + p) % q for x in range(q)])
    return convex_combination(0.5, rotation, mean_projection(space))


def annulus_layout(q: int, m: int, variant: str = "plain") -> list[tuple[int, int]]:
    """Point labels (circle index, fiber index) of the annulus spaces."""
    if variant == "plain":
        return [(z, x) for z in range(q) for x in range(m)]
    if variant == "modified":
        half = q // 2
        labels = [(z, x) for z in range(half) for x in range(m)]
        labels += [(z, 0) for z in range(half, q)]
        return labels
    raise BadParameters(f"unknown annulus variant {variant!r}")


def annulus_operator(
    q: int, m: int, p: int, variant: str = "plain"
) -> DenseOperator:
    """Rotation of a circle of fibers with fiber averaging.

    Plain variant: uniform measure on a q-point circle times an m-point
    fiber; T averages over the fiber above the rotated base point.

    Modified variant (q even): the measure is fiber-uniform over one half
    of the circle and a point mass at fiber index 0 over the other half;
    rows landing on the degenerate half evaluate at that point mass instead
    of averaging.  Both variants keep the whole transition mass on the
    fiber above the rotated base point.
    """
    if q < 1 or m < 1:
        raise BadParameters("q and m must be >= 1")
    if variant == "plain":
        labels = annulus_layout(q, m, variant)
        index = {lab: i for i, lab in enumerate(labels)}
        n = q * m
        space = uniform_space(n)
        kernel = np.zeros((n, n))
        for (z, x), row in index.items():
            w = (z + p) % q
            for y in range(m):
                kernel[row, index[(w, y)]] = 1.0 / m
        return DenseOperator(space, kernel)
    if variant == "modified":
        if q % 2 != 0:
            raise BadParameters("modified variant needs an even circle size q")
        labels = annulus_layout(q, m, variant)
        index = {lab: i for i, lab in enumerate(labels)}
        half = q // 2
        weights = [1.0 / (q * m) if z < half else 1.0 / q for z, _ in labels]
        space = make_space(weights)
        n = len(labels)
        kernel = np.zeros((n, n))
        for (z, x), row in index.items():
            w = (z + p) % q
            if w < half:
                for y in range(m):
                    kernel[row, index[(w, y)]] = 1.0 / m
            else:
                kernel[row, index[(w, 0)]] = 1.0
        return DenseOperator(space, kernel)
    raise BadParameters(f"unknown annulus variant {variant!r}")


@dataclass(frozen=True)
class WindowObservable:
    """Function of finitely many product coordinates, as a value tensor.

    ``start`` is the 1-based index of the first coordinate the function
    depends on; axis k of ``values`` runs over the grid of coordinate
    start + k.  Entropy computations additionally require values in [0, 1];
    orbit and norm diagnostics accept any finite tensor.
    """

    start: int
    values: np.ndarray

    def __post_init__(self):
        if self.start < 1:
            raise ValidationError("window must start at coordinate >= 1")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim < 1:
            raise ValidationError("window tensor needs at least one axis")
        sizes = set(vals.shape)
        if len(sizes) != 1:
            raise ValidationError("every axis must run over the same grid")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("window tensor must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def width(self) -> int:
        return self.values.ndim

    @property
    def stop(self) -> int:
        return self.start + self.width - 1

    @property
    def grid_size(self) -> int:
        return self.values.shape[0]

    @property
    def coordinates(self) -> range:
        return range(self.start, self.stop + 1)

    def mean(self) -> float:
        """Integral against the uniform product measure."""
        return float(self.values.mean())

    def l1_norm(self) -> float:
        return float(np.abs(self.values).mean())

    def l2_norm(self) -> float:
        return float(math.sqrt((self.values ** 2).mean()))


def single_coordinate_observable(
    grid_size: int, coordinate: int, values
) -> WindowObservable:
    vals = np.asarray(values, dtype=float)
    if vals.shape != (grid_size,):
        raise ValidationError(f"expected {grid_size} values on one coordinate")
    return WindowObservable(coordinate, vals)


def coordinate_indicator(grid_size: int, coordinate: int, atom: int) -> WindowObservable:
    """Indicator of one grid atom of a single coordinate."""
    if not 0 <= atom < grid_size:
        raise ValidationError("atom index outside the grid")
    vals = np.zeros(grid_size)
    vals[atom] = 1.0
    return WindowObservable(coordinate, vals)


def product_observable(factors: Sequence[WindowObservable]) -> WindowObservable:
    """Tensor product of single-coordinate factors on consecutive coordinates."""
    if not factors:
        raise ValidationError("need at least one factor")
    start = factors[0].start
    tensor = np.array(factors[0].values)
    for k, f in enumerate(factors[1:], start=1):
        if f.start != start + k or f.width != 1:
            raise ValidationError("factors must sit on consecutive single coordinates")
        tensor = np.multiply.outer(tensor, f.values)
    return WindowObservable(start, tensor)


def _pairwise_tensors(f: WindowObservable, g: WindowObservable):
    """Broadcast two window tensors over the union of their coordinates.

    Overlapping or adjacent windows embed into the covering interval;
    disjoint windows use the product structure directly, so the joint
    tensor never grows beyond the two window widths combined.
    """
    if f.grid_size != g.grid_size:
        raise ValidationError("grids differ")
    if f.start > g.start:
        f, g = g, f
    if g.start <= f.stop + 1:
        start = f.start
        stop = max(f.stop, g.stop)
        width = stop - start + 1
        gsz = f.grid_size
        shape = (gsz,) * width

        def embed(obs):
            lead = obs.start - start
            idx_shape = (1,) * lead + obs.values.shape + (1,) * (
                width - lead - obs.width
            )
            return np.broadcast_to(obs.values.reshape(idx_shape), shape)

        return embed(f), embed(g)
    fv = f.values.reshape(f.values.shape + (1,) * g.width)
    gv = g.values.reshape((1,) * f.width + g.values.shape)
    return np.broadcast_to(fv, f.values.shape + g.values.shape), np.broadcast_to(
        gv, f.values.shape + g.values.shape
    )


def window_distance_l1(f: WindowObservable, g: WindowObservable) -> float:
    a, b = _pairwise_tensors(f, g)
    return float(np.abs(a - b).mean())


def window_distance_l2(f: WindowObservable, g: WindowObservable) -> float:
    a, b = _pairwise_tensors(f, g)
    return float(math.sqrt(((a - b) ** 2).mean()))


class ShiftOperator:
    """Averaging left shift on the product of discretized unit intervals.

    Coordinate k carries the affine map R_k f = ((k-1)/k) f + (1/k) * mean;
    one application applies R coordinatewise over the current window and
    then shifts the window right by one.  With ``averaging=False`` the R
    step is skipped, leaving the plain composition operator of the left
    shift (the Bernoulli case).
    """

    __slots__ = ("grid_size", "averaging", "start_coordinate", "max_window")

    def __init__(
        self,
        grid_size: int,
        averaging: bool = True,
        start_coordinate: int = 1,
        max_window: int = DEFAULT_MAX_WINDOW,
    ):
        if grid_size < 1:
            raise BadParameters("grid_size must be >= 1")
        if start_coordinate < 1:
            raise BadParameters("start_coordinate must be >= 1")
        if max_window < 1:
            raise BadParameters("max_window must be >= 1")
        self.grid_size = grid_size
        self.averaging = averaging
        self.start_coordinate = start_coordinate
        self.max_window = max_window

    # Dense-backend interface slots these deliberately do not provide.
    space = None
    matrix = None

    def apply(self, f: WindowObservable) -> WindowObservable:
        if f.grid_size != self.grid_size:
            raise ValidationError("observable grid does not match the operator")
        if f.start < self.start_coordinate:
            raise ValidationError(
                f"window starts at {f.start}, below coordinate {self.start_coordinate}"
            )
        if f.width > self.max_window:
            raise WindowOverflow(
                f"window width {f.width} exceeds the configured maximum "
                f"{self.max_window}"
            )
        tensor = np.array(f.values)
        if self.averaging:
            for axis, coord in enumerate(f.coordinates):
                keep = (coord - 1.0) / coord
                mean_slice = tensor.mean(axis=axis, keepdims=True)
                tensor = keep * tensor + (1.0 - keep) * mean_slice
        return WindowObservable(f.start + 1, tensor)

    def iterate(self, f: WindowObservable, n: int) -> WindowObservable:
        """n-fold application in closed form.

        The affine averaging maps along one axis share their fixed point
        (the axis mean), so n steps compose to a single affine map with
        coefficient prod_{i=j}^{j+n-1} (i-1)/i = (j-1)/(j+n-1) on the axis
        that starts at coordinate j; the window then shifts by n at once.
        """
        if n < 0:
            raise ValidationError("power must be nonnegative")
        if n == 0:
            return f
        if f.grid_size != self.grid_size:
            raise ValidationError("observable grid does not match the operator")
        if f.start < self.start_coordinate:
            raise ValidationError(
                f"window starts at {f.start}, below coordinate {self.start_coordinate}"
            )
        if f.width > self.max_window:
            raise WindowOverflow(
                f"window width {f.width} exceeds the configured maximum "
                f"{self.max_window}"
            )
        tensor = np.array(f.values)
        if self.averaging:
            for axis, coord in enumerate(f.coordinates):
                keep = (coord - 1.0) / (coord + n - 1.0)
                mean_slice = tensor.mean(axis=axis, keepdims=True)
                tensor = keep * tensor + (1.0 - keep) * mean_slice
        return WindowObservable(f.start + n, tensor)

    def __repr__(self) -> str:
        kind = "averaging" if self.averaging else "koopman"
        return f"ShiftOperator(grid={self.grid_size}, {kind})"


def shift_average_operator(
    grid_size: int,
    start_coordinate: int = 1,
    averaging: bool = True,
    max_window: int = DEFAULT_MAX_WINDOW,
) -> ShiftOperator:
    """Build the averaging shift; ``averaging=False`` gives the plain
    composition operator of the left shift."""
    return ShiftOperator(grid_size, averaging, start_coordinate, max_window)


def shift_apply(operator: ShiftOperator, f: WindowObservable) -> WindowObservable:
    return operator.apply(f)


def sample_doubly_stochastic(
    size: int,
    rng: np.random.Generator,
    target_weights=None,
    tol: float = 1e-13,
    max_rounds: int = 10_000,
) -> DenseOperator:
    """Random doubly stochastic operator by alternating row/column scaling.

    Starts from a strictly positive random matrix and scales rows to mass 1
    and columns to the stationary masses until both deviations fall below
    ``tol``.  The uniform target (default) is the well-behaved case; a
    prescribed non-uniform target is supported but experimental.
    """
    if size < 1:
        raise BadParameters("size must be >= 1")
    if target_weights is None:
        space = uniform_space(size)
    else:
        space = make_space(target_weights)
    mu = space.weight_array()
    mat = rng.random((size, size)) + 0.1
    for _ in range(max_rounds):
        mat /= mat.sum(axis=1, keepdims=True)
        col = mu @ mat
        mat *= (mu / col)[None, :]
        row_dev = np.abs(mat.sum(axis=1) - 1.0).max()
        col_dev = np.abs(mu @ mat - mu).max()
        if row_dev < tol and col_dev < tol:
            break
    else:
        raise ValidationError("alternating scaling did not converge")
    mat /= mat.sum(axis=1, keepdims=True)
    return DenseOperator(space, mat)
