"""Exception hierarchy for the MTJ stochastic-number toolkit."""


class MtjSngError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(MtjSngError, ValueError):
    """A physical parameter or pulse violates its invariants."""


class SubcriticalDrive(MtjSngError):
    """The drive current density does not exceed the critical density.

    Precessional switching is undefined at or below J_c0, so the pulse
    cannot switch the device.
    """

    def __init__(self, bias: float, j: float, j_c0: float, transition: str):
        self.bias = bias
        self.j = j
        self.j_c0 = j_c0
        self.transition = transition
        super().__init__(
            f"bias {bias:g} V is subcritical for {transition}: "
            f"J = {j / 1e10:.4g} MA/cm^2 <= J_c0 = {j_c0 / 1e10:.4g} MA/cm^2"
        )


class NumericalError(MtjSngError):
    """Base class for failures of the numerical kernels."""


class QuadratureFailure(NumericalError):
    """Adaptive quadrature could not meet its tolerance."""


class NoBracket(NumericalError):
    """A root-finding target lies outside the searchable interval."""


class UndefinedConditional(MtjSngError):
    """A conditional expectation was requested on a zero-probability event."""


class DomainError(MtjSngError, ValueError):
    """An argument lies outside the domain of the operation."""


class LengthMismatch(MtjSngError, ValueError):
    """Two bitstreams that must be aligned have different lengths."""


class InvariantViolation(MtjSngError, ValueError):
    """An input does not satisfy a structural precondition."""


class ConfigError(MtjSngError, ValueError):
    """A run configuration is malformed or names unknown keys."""
