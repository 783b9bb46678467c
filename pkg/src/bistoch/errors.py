"""Exception hierarchy.

The CLI maps these onto exit codes: ValidationError -> 2 (bad input),
BudgetError -> 3 (resource guard tripped), HypothesisError -> 4 (the
operator does not satisfy what the requested computation assumes).
"""


class BistochError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(BistochError):
    """Malformed input, broken precondition, or mismatched spaces."""


class NonPositiveWeight(ValidationError):
    """A probability weight is zero or negative."""


class MassNotOne(ValidationError):
    """Weights do not sum to one within tolerance."""


class SpaceMismatch(ValidationError):
    """Two objects built over different probability spaces were combined."""


class RowMassError(ValidationError):
    """A kernel row does not sum to one within tolerance."""


class StationarityError(ValidationError):
    """The measure is not stationary for the kernel (mu^T P != mu^T)."""


class NegativeEntry(ValidationError):
    """A kernel entry is negative."""


class NotInvariant(ValidationError):
    """A map does not preserve the measure, or a basis does not span an
    invariant subspace."""


class AlphaRange(ValidationError):
    """Mixing coefficient outside [0, 1]."""


class BadParameters(ValidationError):
    """Constructor parameters outside their legal range."""


class UnknownEntry(ValidationError):
    """No gallery entry registered under the requested name."""


class BudgetError(BistochError):
    """A configured resource budget would be exceeded."""


class WindowOverflow(BudgetError):
    """A window observable grew past the configured maximum width."""


class CellBudgetExceeded(BudgetError):
    """A join would store more cells than the configured budget allows.

    Carries the rows computed so far in ``partial_trace`` when raised from
    an entropy trace.
    """

    def __init__(self, message, partial_trace=None):
        super().__init__(message)
        self.partial_trace = partial_trace


class HypothesisError(BistochError):
    """The operator fails a hypothesis of the requested computation."""


class EigenFailure(HypothesisError):
    """The eigenvalue / Schur computation did not converge."""


class IllConditionedSplit(HypothesisError):
    """Spectral decoupling produced residuals above tolerance."""


class RankToleranceFailure(HypothesisError):
    """A rank decision could not be made reliably at the configured cutoff."""


class NotErgodic(HypothesisError):
    """Eigenvalue 1 is not simple (or the peripheral structure is not a
    single cycle), so no rotation factor exists."""


class NotMarkovEmbeddingOnRev(HypothesisError):
    """The operator does not act as a lattice homomorphism on the reversible
    part: some atom indicator is not mapped to an atom indicator."""


class REqualsEigenvalueModulus(HypothesisError):
    """The quasi-compactness radius coincides with an eigenvalue modulus;
    the caller must move the radius."""
