"""Spectral splits of doubly stochastic operators in the mu-weighted geometry.

All computations run on the symmetrized matrix M = D^(1/2) P D^(-1/2)
(D = diag(mu)), where the mu-weighted inner product becomes Euclidean and
the mu-adjoint becomes the plain transpose.  The reversible/almost-weakly-
stable split is read off the peripheral spectrum via an ordered real Schur
form with Sylvester decoupling; the unitary/completely-non-unitary split is
the largest reducing subspace on which the operator is isometric, found by
kernel-intersection iteration.  Complex conjugate eigenpairs surface as
real 2-dimensional rotation blocks, so the public API stays real.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    EigenFailure,
    IllConditionedSplit,
    NotInvariant,
    RankToleranceFailure,
    REqualsEigenvalueModulus,
    ValidationError,
)
from .operator import DenseOperator
from .space import FiniteSpace

DEFAULT_EPS_SPEC = 1e-8
SPLIT_RESIDUAL_TOL = 1e-6
INVARIANCE_TOL = 1e-9
RANK_RTOL = 1e-10
ANGLE_TOL = 1e-10
RADIUS_GUARD = 1e-10


def mu_adjoint(operator: DenseOperator) -> DenseOperator:
    """Adjoint with respect to the mu-weighted inner product.

    P*[y][x] = mu(x) P[x][y] / mu(y); the adjoint is again doubly
    stochastic for the same measure, which the constructor re-asserts.
    """
    mu = operator.space.weight_array()
    adj = (operator.matrix * mu[:, None] / mu[None, :]).T
    return DenseOperator(operator.space, adj)


def _symmetrized(operator: DenseOperator) -> tuple[np.ndarray, np.ndarray]:
    d = np.sqrt(operator.space.weight_array())
    m = operator.matrix * d[:, None] / d[None, :]
    return m, d


def _orthonormalize(basis: np.ndarray) -> np.ndarray:
    if basis.shape[1] == 0:
        return basis
    q, _ = np.linalg.qr(basis)
    return q


def _null_space(matrix: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the (numerical) null space.

    The cutoff is rtol times the largest singular value, floored at rtol
    itself: every matrix here is built from contractions, so a matrix whose
    largest singular value is far below 1 is a numerical zero and its null
    space is everything.
    """
    if matrix.size == 0:
        return np.eye(matrix.shape[1])
    _, s, vt = np.linalg.svd(matrix)
    cutoff = rtol * max(float(s[0]) if s.size else 0.0, 1.0)
    rank = int(np.sum(s > cutoff))
    return vt[rank:].T


def _intersect(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Intersection of two subspaces given by orthonormal column bases,
    via principal angles (cosine above 1 - ANGLE_TOL counts as shared)."""
    if first.shape[1] == 0 or second.shape[1] == 0:
        return np.zeros((first.shape[0], 0))
    u, s, _ = np.linalg.svd(first.T @ second)
    keep = s >= 1.0 - ANGLE_TOL
    return first @ u[:, : int(keep.sum())]


def principal_angle(first: np.ndarray, second: np.ndarray) -> float:
    """Largest principal angle (radians) between equal-dimension subspaces.

    Uses the sine form (norm of the projection defect), which stays
    accurate for nearly identical subspaces where arccos loses half the
    digits.
    """
    if first.shape[1] != second.shape[1]:
        return float(np.pi / 2)
    if first.shape[1] == 0:
        return 0.0
    defect = second - first @ (first.T @ second)
    sine = min(1.0, float(np.linalg.norm(defect, 2)))
    return float(np.arcsin(sine))


@dataclass(frozen=True)
class SpectralSplit:
    """Reversible / almost weakly stable decomposition.

    ``rev_basis`` columns are mu-orthonormal and span the peripheral
    spectral subspace; ``aws_basis`` columns span the complementary
    spectral subspace.  Bases are in function coordinates.
    """

    space: FiniteSpace
    rev_basis: np.ndarray
    aws_basis: np.ndarray
    peripheral_eigenvalues: tuple[complex, ...]
    aws_spectral_radius: float
    residuals: dict[str, float]

    @property
    def rev_dim(self) -> int:
        return self.rev_basis.shape[1]

    @property
    def aws_dim(self) -> int:
        return self.aws_basis.shape[1]


def _invariance_residual(m: np.ndarray, q: np.ndarray) -> float:
    """How far M fails to map span(q) into itself (q orthonormal)."""
    if q.shape[1] == 0:
        return 0.0
    image = m @ q
    residual = image - q @ (q.T @ image)
    return float(np.linalg.norm(residual, 2))


def jdlg_decompose(
    operator: DenseOperator, eps_spec: float = DEFAULT_EPS_SPEC
) -> SpectralSplit:
    """Split the space along the peripheral spectrum.

    Eigenvalues of modulus >= 1 - eps_spec form the leading cluster of an
    ordered real Schur form; a Sylvester solve decouples the complementary
    invariant subspace.  Power-bounded matrices keep all eigenvalues in the
    closed unit disk, so the cluster is well separated in practice.
    """
    if not 0.0 < eps_spec < 0.5:
        raise ValidationError("eps_spec must lie in (0, 0.5)")
    m, d = _symmetrized(operator)
    n = m.shape[0]
    threshold = (1.0 - eps_spec) ** 2
    try:
        r, q, sdim = scipy.linalg.schur(
            m, output="real", sort=lambda re, im: re * re + im * im >= threshold
        )
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise EigenFailure(f"Schur decomposition failed: {exc}") from exc
    k = int(sdim)
    if k == 0:
        raise EigenFailure("no peripheral eigenvalue found; T1 = 1 guarantees one")
    a = r[:k, :k]
    rev_m = q[:, :k]
    peripheral = tuple(complex(v) for v in np.linalg.eigvals(a))
    if k < n:
        b = r[k:, k:]
        c = r[:k, k:]
        try:
            y = scipy.linalg.solve_sylvester(a, -b, -c)
        except (scipy.linalg.LinAlgError, ValueError) as exc:
            raise IllConditionedSplit(
                f"could not decouple the peripheral cluster: {exc}"
            ) from exc
        aws_m = _orthonormalize(q @ np.vstack([y, np.eye(n - k)]))
        aws_radius = float(np.abs(np.linalg.eigvals(b)).max())
    else:
        aws_m = np.zeros((n, 0))
        aws_radius = 0.0
    rev_res = _invariance_residual(m, rev_m)
    aws_res = _invariance_residual(m, aws_m)
    if max(rev_res, aws_res) > SPLIT_RESIDUAL_TOL:
        raise IllConditionedSplit(
            f"decoupling residual {max(rev_res, aws_res):.3e} above tolerance"
        )
    combined = np.hstack([rev_m, aws_m])
    smin = np.linalg.svd(combined, compute_uv=False).min()
    if smin < INVARIANCE_TOL:
        raise IllConditionedSplit("reversible and stable spans overlap numerically")
    constants = d / np.linalg.norm(d)
    const_res = float(
        np.linalg.norm(constants - rev_m @ (rev_m.T @ constants))
    )
    if const_res > INVARIANCE_TOL:
        raise IllConditionedSplit("constants missing from the reversible span")
    residuals = {
        "rev_invariance": rev_res,
        "aws_invariance": aws_res,
        "constants": const_res,
    }
    return SpectralSplit(
        space=operator.space,
        rev_basis=rev_m / d[:, None],
        aws_basis=aws_m / d[:, None],
        peripheral_eigenvalues=peripheral,
        aws_spectral_radius=aws_radius,
        residuals=residuals,
    )


@dataclass(frozen=True)
class UnitarySplit:
    """Unitary / completely non-unitary decomposition (mu-orthogonal)."""

    space: FiniteSpace
    uni_basis: np.ndarray
    cnu_basis: np.ndarray
    residuals: dict[str, float]

    @property
    def uni_dim(self) -> int:
        return self.uni_basis.shape[1]

    @property
    def cnu_dim(self) -> int:
        return self.cnu_basis.shape[1]


def nf_decompose(operator: DenseOperator) -> UnitarySplit:
    """Find the largest reducing subspace on which the operator is unitary.

    Start from ker(I - M^T M) intersect ker(I - M M^T) — the vectors whose
    norm survives one step in both directions — and iterate
    V <- V n M^-1 V n (M^T)^-1 V until the dimension stabilizes; the limit
    reduces M and M restricted to it is an isometry, hence unitary.
    """
    m, d = _symmetrized(operator)
    n = m.shape[0]
    k_forward = _null_space(np.eye(n) - m.T @ m)
    k_backward = _null_space(np.eye(n) - m @ m.T)
    v = _intersect(k_forward, k_backward)
    for _ in range(n + 1):
        if v.shape[1] == 0:
            break
        pre_m = _null_space((np.eye(n) - v @ v.T) @ m)
        pre_mt = _null_space((np.eye(n) - v @ v.T) @ m.T)
        v_new = _intersect(_intersect(v, pre_m), pre_mt)
        if v_new.shape[1] > v.shape[1]:
            raise RankToleranceFailure("reducing-subspace iteration grew a subspace")
        if v_new.shape[1] == v.shape[1]:
            break
        v = v_new
    else:
        raise RankToleranceFailure("reducing-subspace iteration did not stabilize")
    uni = v
    cnu = _null_space(uni.T) if uni.shape[1] else np.eye(n)
    residuals = {
        "uni_invariance": max(
            _invariance_residual(m, uni), _invariance_residual(m.T, uni)
        ),
        "cnu_invariance": max(
            _invariance_residual(m, cnu), _invariance_residual(m.T, cnu)
        ),
    }
    if uni.shape[1]:
        compressed = uni.T @ m @ uni
        residuals["isometry"] = float(
            np.linalg.norm(compressed.T @ compressed - np.eye(uni.shape[1]), 2)
        )
    else:
        residuals["isometry"] = 0.0
    if max(residuals.values()) > INVARIANCE_TOL:
        raise RankToleranceFailure(
            f"unitary split residual {max(residuals.values()):.3e} above tolerance"
        )
    return UnitarySplit(
        space=operator.space,
        uni_basis=uni / d[:, None],
        cnu_basis=cnu / d[:, None],
        residuals=residuals,
    )


def subspace_spectral_radius(operator: DenseOperator, basis: np.ndarray) -> float:
    """Spectral radius of the compression of the operator to a subspace.

    The basis (function coordinates, columns) must span an invariant
    subspace; invariance is checked with residual tolerance 1e-8.
    """
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2 or basis.shape[0] != operator.space.point_count:
        raise ValidationError("basis must be a (points, dim) array")
    if basis.shape[1] == 0:
        return 0.0
    m, d = _symmetrized(operator)
    q = _orthonormalize(basis * d[:, None])
    residual = _invariance_residual(m, q)
    if residual > 1e-8:
        raise NotInvariant(f"subspace invariance residual {residual:.3e}")
    compressed = q.T @ m @ q
    return float(np.abs(np.linalg.eigvals(compressed)).max())


@dataclass(frozen=True)
class QuasiCompactReport:
    is_quasi_compact: bool
    f_dim: int
    peripheral_moduli: tuple[float, ...]
    interior_radius: float
    split_residual: float


def quasi_compact_classify(operator: DenseOperator, r: float) -> QuasiCompactReport:
    """Finitely many eigenvalues outside radius r, remainder strictly inside.

    Raises when some eigenvalue modulus sits on the requested radius within
    1e-10, since the classification is then ill-posed for this r.
    """
    if not 0.0 < r < 1.0:
        raise ValidationError("r must lie in (0, 1)")
    m, _ = _symmetrized(operator)
    moduli = np.abs(np.linalg.eigvals(m))
    if np.any(np.abs(moduli - r) <= RADIUS_GUARD):
        raise REqualsEigenvalueModulus(
            f"an eigenvalue modulus coincides with r={r}; move the radius"
        )
    outer = moduli > r
    f_dim = int(outer.sum())
    interior = moduli[~outer]
    interior_radius = float(interior.max()) if interior.size else 0.0
    threshold = r * r
    try:
        _, q, sdim = scipy.linalg.schur(
            m, output="real", sort=lambda re, im: re * re + im * im > threshold
        )
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise EigenFailure(f"Schur decomposition failed: {exc}") from exc
    residual = _invariance_residual(m, q[:, : int(sdim)])
    return QuasiCompactReport(
        is_quasi_compact=interior_radius < r,
        f_dim=f_dim,
        peripheral_moduli=tuple(sorted(float(v) for v in moduli[outer])),
        interior_radius=interior_radius,
        split_residual=residual,
    )
