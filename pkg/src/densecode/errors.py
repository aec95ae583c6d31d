"""Exception types raised by densecode."""


class DenseCodingError(ValueError):
    """Base class for invalid inputs and failed preconditions."""


class InvalidStateError(DenseCodingError):
    """A matrix violates the density-matrix invariants."""


class NotHermitianError(DenseCodingError):
    """Input to a Hermitian routine is not Hermitian within tolerance."""


class ChannelError(DenseCodingError):
    """A channel is malformed or unsuitable for the requested operation."""


class ConditionViolatedError(DenseCodingError):
    """The entropy condition failed, so the unital capacity formula is only a lower bound.

    Attributes
    ----------
    residual : float
        Largest sampled entropy deviation.
    """

    def __init__(self, residual: float, message: str | None = None):
        self.residual = residual
        super().__init__(
            message
            or f"entropy condition violated (residual {residual:.3e}); "
            "formula value is only an achievable lower bound"
        )


class BracketError(DenseCodingError):
    """Bisection bracket does not straddle a sign change."""
