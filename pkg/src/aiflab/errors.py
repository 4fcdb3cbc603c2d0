"""Exception types shared across the package."""


class AifError(Exception):
    """Base class for all package errors."""


class InvalidDistribution(AifError):
    """A probability container violates its normalization or positivity invariant."""


class DimensionMismatch(AifError):
    """Operands have incompatible support sizes or shapes."""


class AbsoluteContinuityViolation(AifError):
    """p puts mass where q has none, so a log-ratio expectation diverges."""


class NonFiniteInput(AifError):
    """An input contains NaN or infinity."""


class ImpossibleObservation(AifError):
    """The observation has zero marginal probability under the model."""


class IndexOutOfRange(AifError):
    """An action, state or observation index exceeds its declared range."""


class PolicySpaceTooLarge(AifError):
    """A^T exceeds the enumeration cap."""

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"policy space of size {size} exceeds cap {cap}")


class TrajectorySpaceTooLarge(AifError):
    """O^T exceeds the enumeration cap."""

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"trajectory space of size {size} exceeds cap {cap}")


class MixedFunctionals(AifError):
    """Policy evaluations built from different objective functionals were combined."""


class ParseError(AifError):
    """A model file is syntactically malformed or missing a required field."""


class ValidationError(AifError):
    """A parsed model violates stochasticity invariants; carries the full report."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"model validation failed: {lines}")
