"""Nullity verdicts, orbit diagnostics, and rotation-factor extraction.

An operator is null when every sequence entropy vanishes; equivalently all
orbits are norm-precompact, equivalently iterates die on the almost weakly
stable part.  On dense backends the verdict is spectral whenever the
interior spectral radius is safely below 1 (automatic in finite dimension);
the symbolic shift backend has no spectrum, so evidence comes from orbit
decay and orbit separation on a test family, with an explicit inconclusive
verdict when neither is established at the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    NotErgodic,
    NotMarkovEmbeddingOnRev,
    SpaceMismatch,
    ValidationError,
)
from .operator import (
    DenseOperator,
    ShiftOperator,
    WindowObservable,
    coordinate_indicator,
    window_distance_l1,
)
from .space import Observable
from .spectral import SpectralSplit, jdlg_decompose, nf_decompose

SPECTRAL_GAP = 1e-6
ERGODIC_GAP = 1e-8
ATOM_TOL = 1e-8
INDICATOR_TOL = 1e-6
MASS_TOL = 1e-10

DEFAULT_HORIZON = 64
DEFAULT_DECAY_TOL = 0.05
DEFAULT_SEPARATION = 0.25
MAX_EVIDENCE_CURVES = 8


def conditional_expectation_rev(split: SpectralSplit, f) -> np.ndarray:
    """mu-orthogonal projection onto the reversible span.

    When the reversible part is spanned by atom indicators this is exactly
    averaging over atoms, i.e. the conditional expectation onto the
    sub-sigma-algebra the reversible part generates.
    """
    values = f.values if isinstance(f, Observable) else np.asarray(f, dtype=float)
    if isinstance(f, Observable) and f.space != split.space:
        raise SpaceMismatch("observable does not live on the split's space")
    basis = split.rev_basis
    if basis.shape[0] != values.shape[0]:
        raise SpaceMismatch("observable does not match the split's space")
    mu = split.space.weight_array()
    coeff = basis.T @ (mu * values)
    return basis @ coeff


@dataclass(frozen=True)
class NullityReport:
    verdict: str
    route: str
    evidence: dict

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "route": self.route, "evidence": self.evidence}


@dataclass(frozen=True)
class DecayReport:
    curve: tuple[float, ...]
    decayed: bool

    def final(self) -> float:
        return self.curve[-1]


@dataclass(frozen=True)
class PrecompactnessReport:
    net_sizes: tuple[int, ...]
    min_pairwise_distance: float
    precompact_evidence: bool


@dataclass(frozen=True)
class RotationFactor:
    """Finite cyclic rotation factor of an ergodic null operator.

    ``atoms`` lists the point indices of each atom of the reversible
    sub-sigma-algebra; ``rotation`` is the permutation R as an index array
    (atom i maps to atom rotation[i]); ``projection`` sends each point to
    its atom.  The factor equation T(g o pi) = g o R o pi holds on atom
    indicators up to ``residuals['factor_equation']``.
    """

    atoms: tuple[tuple[int, ...], ...]
    rotation: tuple[int, ...]
    projection: tuple[int, ...]
    residuals: dict[str, float]

    @property
    def atom_count(self) -> int:
        return len(self.atoms)


def _decay_curve_dense(operator, vector, horizon):
    space = operator.space
    current = np.asarray(vector, dtype=float)
    curve = [space.l2_norm(current)]
    for _ in range(horizon):
        current = operator.apply(current)
        curve.append(space.l2_norm(current))
    return curve


def orbit_decay_test(operator, f, horizon: int, tol: float) -> DecayReport:
    """Norms of the iterates of the non-reversible component of f.

    Dense backend: the reversible component is removed by conditional
    expectation before iterating.  Shift backend: the mean is removed,
    matching the constant reversible part of the averaging shift.
    """
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    if isinstance(operator, DenseOperator):
        values = f.values if isinstance(f, Observable) else np.asarray(f, dtype=float)
        split = jdlg_decompose(operator)
        centered = values - conditional_expectation_rev(split, values)
        curve = _decay_curve_dense(operator, centered, horizon)
    elif isinstance(operator, ShiftOperator):
        if not isinstance(f, WindowObservable):
            raise ValidationError("shift backend expects a WindowObservable")
        mean = f.mean()
        current = f
        curve = []
        for n in range(horizon + 1):
            centered = WindowObservable(current.start, current.values - mean)
            curve.append(centered.l2_norm())
            if n < horizon:
                current = operator.apply(current)
    else:
        raise ValidationError(f"unsupported operator type {type(operator).__name__}")
    return DecayReport(tuple(curve), curve[-1] < tol)


def orbit_precompactness_diagnostic(
    operator, f, horizon: int, eps: float
) -> PrecompactnessReport:
    """Greedy eps-net growth and minimal pairwise L1 distance of an orbit.

    The net is built first-fit in orbit order, so it is deterministic.  A
    net size that stops growing over the trailing third of the horizon is
    evidence of precompactness; linear growth is evidence against.
    """
    if horizon < 2:
        raise ValidationError("horizon must be >= 2")
    if isinstance(operator, DenseOperator):
        values = f.values if isinstance(f, Observable) else np.asarray(f, dtype=float)
        orbit = [np.array(values)]
        for _ in range(horizon):
            orbit.append(operator.apply(orbit[-1]))
        space = operator.space

        def distance(a, b):
            return space.l1_norm(a - b)

    elif isinstance(operator, ShiftOperator):
        if not isinstance(f, WindowObservable):
            raise ValidationError("shift backend expects a WindowObservable")
        orbit = [f]
        for _ in range(horizon):
            orbit.append(operator.apply(orbit[-1]))
        distance = window_distance_l1
    else:
        raise ValidationError(f"unsupported operator type {type(operator).__name__}")

    centers: list = []
    net_sizes = []
    for g in orbit:
        if not centers or min(distance(g, c) for c in centers) > eps:
            centers.append(g)
        net_sizes.append(len(centers))
    min_pairwise = min(
        (
            distance(orbit[i], orbit[j])
            for i in range(len(orbit))
            for j in range(i + 1, len(orbit))
        ),
        default=math.inf,
    )
    tail = max(2, horizon // 3)
    stabilized = len(set(net_sizes[-tail:])) == 1
    return PrecompactnessReport(tuple(net_sizes), float(min_pairwise), stabilized)


def _default_shift_family(operator: ShiftOperator) -> list[WindowObservable]:
    g = operator.grid_size
    family = []
    for k in (1, 2, 3):
        if g > 1:
            family.append(coordinate_indicator(g, k, g - 1))
        else:
            family.append(WindowObservable(k, np.ones(1)))
    return family


def nullity_check(
    operator,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_DECAY_TOL,
    separation: float = DEFAULT_SEPARATION,
    test_family: Sequence[WindowObservable] | None = None,
) -> NullityReport:
    """Classify an operator as null / not_null / inconclusive.

    Dense route: null by spectrum when the almost-weakly-stable radius is
    below 1 - 1e-6 (the reversible part always carries discrete spectrum in
    finite dimension); in the borderline band the verdict falls back to
    iterate decay of the stable basis at the horizon, and stays
    inconclusive when decay is not reached.  Shift route: orbit decay /
    orbit separation on a test family, since no spectrum is available.
    """
    if isinstance(operator, DenseOperator):
        split = jdlg_decompose(operator)
        radius = split.aws_spectral_radius
        curves = [
            _decay_curve_dense(operator, split.aws_basis[:, idx], horizon)
            for idx in range(min(split.aws_dim, MAX_EVIDENCE_CURVES))
        ]
        evidence = {
            "aws_spectral_radius": radius,
            "rev_dim": split.rev_dim,
            "aws_dim": split.aws_dim,
            "decay_curves": curves,
        }
        if radius < 1.0 - SPECTRAL_GAP:
            return NullityReport("null", "spectral", evidence)
        finals = []
        for idx in range(split.aws_dim):
            curve = _decay_curve_dense(operator, split.aws_basis[:, idx], horizon)
            finals.append(curve[-1])
        evidence["decay_finals"] = finals
        if all(v < tol for v in finals):
            return NullityReport("null", "orbit_decay", evidence)
        return NullityReport("inconclusive", "orbit_decay", evidence)
    if isinstance(operator, ShiftOperator):
        family = list(test_family) if test_family is not None else _default_shift_family(operator)
        finals = []
        separations = []
        curves = []
        for f in family:
            decay = orbit_decay_test(operator, f, horizon, tol)
            diag = orbit_precompactness_diagnostic(operator, f, horizon, eps=tol)
            finals.append(decay.final())
            separations.append(diag.min_pairwise_distance)
            curves.append(list(decay.curve))
        evidence = {
            "decay_finals": finals,
            "min_pairwise_distances": separations,
            "decay_curves": curves,
        }
        if all(v < tol for v in finals):
            return NullityReport("null", "orbit_decay", evidence)
        for final, sep in zip(finals, separations):
            if sep >= separation and final >= tol:
                return NullityReport("not_null", "orbit_separation", evidence)
        return NullityReport("inconclusive", "orbit_separation", evidence)
    raise ValidationError(f"unsupported operator type {type(operator).__name__}")


def nullity_audit(
    operator: DenseOperator, horizon: int = 200, tol: float = 1e-3
) -> dict[str, bool]:
    """Three independent nullity routes that must agree on dense backends.

    spectral: interior spectral radius below 1; decay: every stable basis
    vector dies at the horizon; nf: the unitary part is isometric (hence
    has discrete spectrum in finite dimension) and every completely
    non-unitary basis vector dies at the horizon.
    """
    split = jdlg_decompose(operator)
    spectral = split.aws_spectral_radius < 1.0 - SPECTRAL_GAP
    decay = all(
        _decay_curve_dense(operator, split.aws_basis[:, i], horizon)[-1] < tol
        for i in range(split.aws_dim)
    )
    unitary = nf_decompose(operator)
    nf = unitary.residuals["isometry"] <= 1e-9 and all(
        _decay_curve_dense(operator, unitary.cnu_basis[:, i], horizon)[-1] < tol
        for i in range(unitary.cnu_dim)
    )
    return {"spectral": spectral, "decay": decay, "nf": nf}


def _cluster_points(coords: np.ndarray, tol: float) -> list[list[int]]:
    """Greedy clustering of rows by max-abs distance, first-fit in order."""
    atoms: list[list[int]] = []
    reps: list[np.ndarray] = []
    for x in range(coords.shape[0]):
        row = coords[x]
        for i, rep in enumerate(reps):
            if np.abs(row - rep).max() <= tol:
                atoms[i].append(x)
                break
        else:
            atoms.append([x])
            reps.append(row)
    return atoms


def hvn_factor(operator: DenseOperator, split: SpectralSplit | None = None) -> RotationFactor:
    """Extract the cyclic rotation the reversible part is isomorphic to.

    Points are clustered by their coordinates in the reversible basis; the
    operator must send every atom indicator to an atom indicator, which
    pins a permutation sigma with T 1_A = 1_{A_sigma}; the rotation is its
    inverse, so that T(g o pi) = g o R o pi for all atom functions g.
    """
    eigenvalues = np.linalg.eigvals(operator.matrix)
    gaps = np.sort(np.abs(eigenvalues - 1.0))
    if len(gaps) > 1 and gaps[1] <= ERGODIC_GAP:
        raise NotErgodic("eigenvalue 1 is not simple")
    if split is None:
        split = jdlg_decompose(operator)
    atoms = _cluster_points(split.rev_basis, ATOM_TOL)
    if len(atoms) != split.rev_dim:
        raise NotMarkovEmbeddingOnRev(
            f"{len(atoms)} atoms for a reversible part of dimension {split.rev_dim}"
        )
    n = operator.space.point_count
    projection = np.empty(n, dtype=int)
    for idx, atom in enumerate(atoms):
        projection[atom] = idx
    indicators = np.zeros((len(atoms), n))
    for idx, atom in enumerate(atoms):
        indicators[idx, atom] = 1.0
    sigma = np.full(len(atoms), -1, dtype=int)
    factor_residual = 0.0
    space = operator.space
    for i in range(len(atoms)):
        image = operator.apply(indicators[i])
        deviations = np.abs(image[None, :] - indicators).max(axis=1)
        j = int(deviations.argmin())
        if deviations[j] > INDICATOR_TOL:
            raise NotMarkovEmbeddingOnRev(
                f"image of atom {i} is {deviations[j]:.3e} away from any indicator"
            )
        sigma[i] = j
        factor_residual = max(factor_residual, space.l2_norm(image - indicators[j]))
    if len(set(sigma.tolist())) != len(atoms):
        raise NotMarkovEmbeddingOnRev("atom images do not form a permutation")
    rotation = np.empty(len(atoms), dtype=int)
    rotation[sigma] = np.arange(len(atoms))
    masses = np.array([space.weight_array()[atom].sum() for atom in atoms])
    if np.abs(masses - masses.mean()).max() > MASS_TOL:
        raise NotErgodic("atom masses are not equal; no Haar rotation factor")
    # A permutation with equal-mass atoms under an ergodic operator must be
    # a single cycle; verify rather than trust.
    seen = {0}
    cursor = int(rotation[0])
    while cursor not in seen:
        seen.add(cursor)
        cursor = int(rotation[cursor])
    if len(seen) != len(atoms):
        raise NotErgodic("rotation splits into several cycles")
    return RotationFactor(
        atoms=tuple(tuple(a) for a in atoms),
        rotation=tuple(int(v) for v in rotation),
        projection=tuple(int(v) for v in projection),
        residuals={"factor_equation": factor_residual, "atom_mass_spread": float(
            np.abs(masses - masses.mean()).max()
        )},
    )


def transition_support_check(operator: DenseOperator, factor: RotationFactor) -> float:
    """Largest leak of transition mass off the predicted target atom.

    Returns max over x of |1 - sum_{y in atom R(pi(x))} P[x, y]|; a null
    ergodic operator concentrates each row on the fiber above the rotated
    base point, so the deviation is zero.
    """
    kernel = operator.matrix
    worst = 0.0
    for x in range(operator.space.point_count):
        target = factor.rotation[factor.projection[x]]
        mass = kernel[x, list(factor.atoms[target])].sum()
        worst = max(worst, abs(1.0 - float(mass)))
    return worst
