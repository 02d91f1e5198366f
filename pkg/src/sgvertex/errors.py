"""Package-level error types."""


class SGVertexError(Exception):
    """Base class for package errors."""


class SingularTransferMatrixError(SGVertexError):
    """Transfer matrix too ill-conditioned to invert at the requested point."""


class ConventionMismatchError(SGVertexError):
    """Hermiticity residual of the log-derivative operator above tolerance."""


class ReconciliationError(SGVertexError):
    """No affine map brings the two Hamiltonian constructions together."""


class DimensionExceededError(SGVertexError):
    """Sector dimension above the configured cap."""


class NonConvergenceError(SGVertexError):
    """Iterative routine failed to converge within its iteration cap."""


class ResonanceError(SGVertexError):
    """Anisotropy sits on a resonant point where the pole formula degenerates."""


class IrrelevantOperatorError(SGVertexError):
    """Scaling dimension >= 2: the perturbing operator is not relevant."""
