"""Green function of the fractional Laplacian (-Delta)^s on the unit ball.

Kernel evaluation, the Dirichlet solver, a pointwise fractional Laplacian,
Moebius covariance utilities and a verification suite.
"""
__version__ = "0.1.0"

from .errors import (
    BoggioError,
    CoincidentPoints,
    DivergenceError,
    DomainError,
    FitFailure,
    NonConvergence,
    OriginError,
    PoleError,
    SlowConvergence,
)
from .specfun import FracOrder, boggio_constant, gamma, hyp2f1_terminating, pochhammer
from .quadrature import QuadratureSpec, IntegralResult, integrate_ball, tanh_sinh
from .kernel import BallPoint, RadialGreenProfile, green, green_many, green_tilde
from .fraclap import dyda_power_fraclap, fraclap_pointwise, gsharp, gsharp_decompose
from .mobius import BallAutomorphism, kelvin
from .solver import SolutionField, SourceFunction, solve_at
from .report import CheckRecord, VerificationReport

__all__ = [
    "__version__",
    "BoggioError", "CoincidentPoints", "DivergenceError", "DomainError", "FitFailure",
    "NonConvergence", "OriginError", "PoleError", "SlowConvergence",
    "FracOrder", "boggio_constant", "gamma", "hyp2f1_terminating", "pochhammer",
    "QuadratureSpec", "IntegralResult", "integrate_ball", "tanh_sinh",
    "BallPoint", "RadialGreenProfile", "green", "green_many", "green_tilde",
    "dyda_power_fraclap", "fraclap_pointwise", "gsharp", "gsharp_decompose",
    "BallAutomorphism", "kelvin",
    "SolutionField", "SourceFunction", "solve_at",
    "CheckRecord", "VerificationReport",
]
