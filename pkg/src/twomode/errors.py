"""Exception hierarchy shared by all twomode modules."""


class TwoModeError(Exception):
    """Base class for every error raised by this package."""


class InvalidLabelError(TwoModeError, ValueError):
    """Fock label outside ``0 <= k <= n_total`` or a bad particle number."""


class DomainError(TwoModeError, ValueError):
    """A scalar or vector argument lies outside its mathematical domain."""


class InvalidBipartitionError(TwoModeError, ValueError):
    """Mode-mixing matrix is not a 2x2 unitary."""


class InvariantError(TwoModeError, ValueError):
    """A density matrix violates Hermiticity, unit trace or positivity."""


class BasisMismatchError(TwoModeError, ValueError):
    """Operation requires a state expressed in a different mode basis."""


class NumericError(TwoModeError, ArithmeticError):
    """A numerical routine failed to produce a trustworthy result."""


class IntegrationError(NumericError):
    """ODE step refinement did not converge."""


class QuadratureError(NumericError):
    """Gauss-Hermite node doubling did not converge before the cap."""

    def __init__(self, message, residual=None, nodes=None):
        super().__init__(message)
        self.residual = residual
        self.nodes = nodes


class UndefinedSqueezingError(TwoModeError, ValueError):
    """Mean spin along the reference direction vanishes."""


class PremiseError(TwoModeError, ValueError):
    """Initial state is squeezed along some direction pair."""
