"""Threshold partitions of X x [0, 1] and their Shannon entropies.

For f : X -> [0, 1] the region {(x, t) : t <= f(x)} and its complement
partition X x [0, 1] under mu x lambda (lambda = Lebesgue on [0, 1]).  A
collection partitions by all of its functions at once.  At a fixed point x
the subsets S = {f : f(x) >= t} realized as t runs through (0, 1] form a
chain, so a collection of r functions stores at most point_count * (r + 1)
cells.  Cell keys are bit masks over function indices.

The closed condition t <= f(x) is fixed throughout; the open variant
differs only on a lambda-null set and never changes a measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SpaceMismatch
from .space import Collection, FiniteSpace

# Cells lighter than this are dropped before entropy summation; their mass
# goes back to the largest cell so the total stays exactly 1.
DROP_TOL = 1e-15

CLAMP_TOL = 1e-12

# A chain interval: (cell key, upper bound, lower bound), t in (lo, hi].
ChainInterval = tuple[int, float, float]


@dataclass(frozen=True)
class CellPartition:
    """Measure-labelled cells of the threshold partition of a collection.

    ``cells`` maps a bit mask over function indices (bit i set means
    function i is satisfied on the cell) to the cell's mu x lambda mass.
    ``point_chains`` keeps, per point, the descending interval chain the
    cell masses were accumulated from; joins use it to stay exact.
    """

    cells: dict[int, float]
    collection_size: int
    point_chains: tuple[tuple[ChainInterval, ...], ...]
    space: FiniteSpace

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    def total_mass(self) -> float:
        return math.fsum(self.cells.values())

    def key_indices(self, key: int) -> tuple[int, ...]:
        """Decode a cell key into the sorted indices of satisfied functions."""
        return tuple(i for i in range(self.collection_size) if key >> i & 1)

    def to_csv(self) -> str:
        """Debug dump with header cell_key,measure; keys are the satisfied
        function indices joined by '|' (empty for the all-unsatisfied cell)."""
        lines = ["cell_key,measure"]
        for key, mass in self.cells.items():
            label = "|".join(str(i) for i in self.key_indices(key))
            lines.append(f"{label},{mass!r}")
        return "\n".join(lines) + "\n"


def cell_measures(space: FiniteSpace, collection: Collection) -> CellPartition:
    """Exact cell masses of the threshold partition of a collection.

    At each point the r values are sorted once; the chain of realized
    subsets gets the interval lengths between consecutive sorted values
    (with 1 above the largest and 0 below the smallest).  Ties produce
    empty intervals and are skipped, so duplicates add no refinement.
    """
    if collection.space != space:
        raise SpaceMismatch("collection does not live on the given space")
    mu = space.weight_array()
    values = collection.values_matrix()
    r = len(collection)
    cells: dict[int, float] = {}
    chains: list[tuple[ChainInterval, ...]] = []
    for x in range(space.point_count):
        vals = values[:, x]
        order = np.argsort(-vals, kind="stable")
        svals = vals[order]
        w = float(mu[x])
        chain: list[ChainInterval] = []
        mask = 0
        hi = 1.0
        for k in range(r + 1):
            lo = float(svals[k]) if k < r else 0.0
            if hi > lo:
                chain.append((mask, hi, lo))
                cells[mask] = cells.get(mask, 0.0) + w * (hi - lo)
            if k < r:
                mask |= 1 << int(order[k])
                hi = lo
        chains.append(tuple(chain))
    assert len(cells) <= space.point_count * (r + 1)
    return CellPartition(cells, r, tuple(chains), space)


def join_partitions(first: CellPartition, second: CellPartition) -> CellPartition:
    """Common refinement of two partitions of the same space.

    Keys of the second partition are shifted past the first collection's
    index range, so the result's cell map is bitwise identical to
    ``cell_measures`` of the concatenated collection.
    """
    if first.space != second.space:
        raise SpaceMismatch("partitions live on different spaces")
    shift = first.collection_size
    mu = first.space.weight_array()
    cells: dict[int, float] = {}
    chains: list[tuple[ChainInterval, ...]] = []
    for x in range(first.space.point_count):
        w = float(mu[x])
        a = first.point_chains[x]
        b = second.point_chains[x]
        merged: list[ChainInterval] = []
        i = j = 0
        while i < len(a) and j < len(b):
            ka, hia, loa = a[i]
            kb, hib, lob = b[j]
            hi = hia if hia < hib else hib
            lo = loa if loa > lob else lob
            if hi > lo:
                key = ka | (kb << shift)
                merged.append((key, hi, lo))
                cells[key] = cells.get(key, 0.0) + w * (hi - lo)
            if loa >= lob:
                i += 1
            if lob >= loa:
                j += 1
        chains.append(tuple(merged))
    size = first.collection_size + second.collection_size
    assert len(cells) <= first.space.point_count * (size + 1)
    return CellPartition(cells, size, tuple(chains), first.space)


def entropy_of_cells(partition: CellPartition) -> float:
    """Shannon entropy -sum m log m (natural log), with 0 log 0 = 0.

    Cells below DROP_TOL are removed and their mass is re-added to the
    largest cell, keeping the distribution normalized.
    """
    masses = [m for m in partition.cells.values() if m > 0.0]
    kept = [m for m in masses if m >= DROP_TOL]
    if not kept:
        return 0.0
    dropped = math.fsum(m for m in masses if m < DROP_TOL)
    if dropped > 0.0:
        top = max(range(len(kept)), key=kept.__getitem__)
        kept[top] += dropped
    h = -math.fsum(m * math.log(m) for m in kept)
    return max(h, 0.0)


def static_entropy(space: FiniteSpace, collection: Collection) -> float:
    """Entropy of the threshold partition of a collection, in nats."""
    return entropy_of_cells(cell_measures(space, collection))


def conditional_entropy(
    space: FiniteSpace, collection: Collection, given: Collection
) -> float:
    """H(F | G) = H(F joined with G) - H(G), clamped at tiny negatives."""
    if collection.space != given.space:
        raise SpaceMismatch("collections live on different spaces")
    value = static_entropy(space, collection.concat(given)) - static_entropy(
        space, given
    )
    if -CLAMP_TOL < value < 0.0:
        return 0.0
    return value
