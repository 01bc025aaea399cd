class EcsSimulatorError(Exception):
    """Base class for all simulator errors."""


class DimensionError(EcsSimulatorError, ValueError):
    """Raised when cutoffs disagree or a Fock index falls outside the truncated grid."""


class TruncationError(EcsSimulatorError):
    """Raised when the truncated state discards more probability than allowed."""

    def __init__(self, tail_mass: float, tail_tol: float, cutoff: int):
        self.tail_mass = tail_mass
        self.tail_tol = tail_tol
        self.cutoff = cutoff

        super().__init__(f"Tail mass {tail_mass:.3e} at cutoff {cutoff} exceeds the tolerance {tail_tol:.3e}.")


class DomainError(EcsSimulatorError, ValueError):
    """Raised when an input lies outside the domain of an operation (zero norm, empty support)."""
