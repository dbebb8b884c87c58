"""Exception hierarchy shared by all modules."""


class BoggioError(Exception):
    """Base class for every error raised by this package."""


class PoleError(BoggioError, ZeroDivisionError):
    """Gamma function evaluated at a non-positive integer."""


class DomainError(BoggioError, ValueError):
    """Argument outside the domain where a formula is valid."""


class DivergenceError(BoggioError, ArithmeticError):
    """A series that is asked to converge does not."""


class NonConvergence(BoggioError, RuntimeError):
    """Quadrature budget exhausted before the tolerance was met.

    The partial result is kept on ``self.result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SlowConvergence(BoggioError, RuntimeError):
    """A series did not reach its tolerance within the term budget."""


class CoincidentPoints(BoggioError, ValueError):
    """Kernel evaluated on the diagonal x == y."""


class OriginError(BoggioError, ZeroDivisionError):
    """Inversion or Kelvin transform evaluated at the origin."""


class FitFailure(BoggioError, RuntimeError):
    """A fitted decomposition does not reproduce its target."""
