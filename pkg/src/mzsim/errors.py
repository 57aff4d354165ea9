"""Exception types raised across the package."""


class MZSimError(Exception):
    """Base class for all package errors."""


class InvalidState(MZSimError, ValueError):
    """A state vector is not normalized or holds non-finite amplitudes."""


class InvalidDensityMatrix(MZSimError, ValueError):
    """A matrix fails the Hermitian / unit-trace / PSD checks."""


class NonUnitaryEvolution(MZSimError, ValueError):
    """Applying an operator changed the norm of a state."""


class InvalidSplitter(MZSimError, ValueError):
    """Beamsplitter coefficients violate the lossless constraints."""


class InvalidWeights(MZSimError, ValueError):
    """Ensemble weights are out of range or do not sum to one."""


class LengthMismatch(MZSimError, ValueError):
    """Two sequences that must align have different lengths."""


class MixedPlans(MZSimError, ValueError):
    """Records from different experiment plans were combined."""
