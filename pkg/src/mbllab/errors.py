"""Exception types shared across the package."""


class LabError(Exception):
    """Base class for all package errors."""


class InvalidSector(LabError):
    """Sector counts violate 0 <= n_excitations <= n_sites <= 32."""


class NotInSector(LabError):
    """Fock state does not belong to the basis sector."""


class IndexOutOfRange(LabError):
    """Ordinal outside the basis range."""


class DivisionByZeroDetuning(LabError):
    """Device detuning is zero; exchange couplings undefined."""


class NegativeAmplitude(LabError):
    """Disorder amplitude must be nonnegative."""


class ShapeMismatch(LabError):
    """Operands defined on incompatible bases or site counts."""


class ConvergenceFailure(LabError):
    """Iterative eigensolver failed to converge within the iteration cap."""

    def __init__(self, residual: float, message: str = ""):
        self.residual = residual
        super().__init__(message or f"not converged, residual={residual:.3e}")


class DegenerateSpectrum(LabError):
    """Spectral width is zero; energy density undefined."""


class DimensionTooLarge(LabError):
    """Sector dimension exceeds the configured dense-diagonalization cap."""


class InsufficientStatistics(LabError):
    """Too few levels in the requested spectral window."""

    def __init__(self, count: int, message: str = ""):
        self.count = count
        super().__init__(message or f"only {count} levels in window, need >= 10")


class EmptyInput(LabError):
    """Empty or all-zero input where data is required."""


class TargetEnergyUnreachable(LabError):
    """No Fock state hits the target energy density within tolerance."""

    def __init__(self, best_gap: float, message: str = ""):
        self.best_gap = best_gap
        super().__init__(message or f"closest achievable density misses target by {best_gap:.4f}")


class PropagationFailure(LabError):
    """Adaptive step-size control failed during Krylov propagation."""

    def __init__(self, t: float, residual: float, message: str = ""):
        self.t = t
        self.residual = residual
        super().__init__(message or f"step failed at t={t:.1f} ns, residual={residual:.3e}")


class AllShotsRejected(LabError):
    """Post-selection discarded every sampled bitstring."""


class GridMismatch(LabError):
    """Series do not share a common time grid."""


class LogDomainError(LabError):
    """Too few positive points in the fit window for a log-log fit."""

    def __init__(self, n_nonpositive: int, n_positive: int, message: str = ""):
        self.n_nonpositive = n_nonpositive
        self.n_positive = n_positive
        super().__init__(
            message
            or f"{n_nonpositive} nonpositive points in window, only {n_positive} positive remain"
        )


class NoCrossing(LabError):
    """Exponent curve never reaches the large-V baseline."""


class VectorsRequired(LabError):
    """Operation needs eigenvectors but the EigenSystem carries none."""


class SubsetTooSmall(LabError):
    """Finite-size subset has fewer than 4 sites."""


class IoError(LabError):
    """Output location cannot be created or written."""
