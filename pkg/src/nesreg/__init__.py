"""Special relativity in a non-orthogonal Euclidean space and an intrinsically regularized one-loop integral."""

from nesreg.blurred_lt import BlurredLorentzEstimator
from nesreg.effective_dimension import (
    DEFAULT_CONSTANTS,
    EnergyState,
    PhysicalConstants,
    effective_dim,
    normalized_eigenvalues,
    q_jump,
    q_of_energy,
)
from nesreg.errors import (
    DomainError,
    NESError,
    NumericError,
    QuadratureError,
    SingularityError,
)
from nesreg.kinematics import (
    Branch,
    BoostNES,
    MetricNES,
    VelocityRatio,
    boost_from_sigma,
    metric_from_rho,
    rho_from_sigma,
)
from nesreg.loop import Mode, dzero, kstar, mass_correction

__version__ = "0.1.0"

__all__ = [
    "BlurredLorentzEstimator",
    "BoostNES",
    "Branch",
    "DEFAULT_CONSTANTS",
    "DomainError",
    "EnergyState",
    "MetricNES",
    "Mode",
    "NESError",
    "NumericError",
    "PhysicalConstants",
    "QuadratureError",
    "SingularityError",
    "VelocityRatio",
    "boost_from_sigma",
    "dzero",
    "effective_dim",
    "kstar",
    "mass_correction",
    "metric_from_rho",
    "normalized_eigenvalues",
    "q_jump",
    "q_of_energy",
    "rho_from_sigma",
]
