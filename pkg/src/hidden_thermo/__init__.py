"""Classical statistical thermodynamics with a hidden ultrarelativistic velocity.

Submodules: :mod:`numerics` (Bessel K_n, quadrature, random streams),
:mod:`kinematics`, :mod:`juttner`, :mod:`fluctuations`, :mod:`thermodynamics`
and :mod:`cli`.
"""
from .fluctuations import (
    FluctuationEstimate,
    KappaStats,
    PointMass,
    Tabulated,
    ThermalJuttner,
    conditional_second_moment,
    excess_moments,
    kappa_stats,
    monte_carlo_moments,
    thermal_variance_exact,
    thermal_variance_zeroth,
)
from .juttner import JuttnerDist, MassMoments, mass_moments, moment_ratio_deviation, pdf_gamma, sample_gamma
from .kinematics import EnergyConvention, compose_velocity, gamma, kinetic_energy, momentum
from .numerics import QuadratureSpec, RandomStream, bessel_k, integrate, split_stream
from .thermodynamics import (
    ThermoModel,
    build_model,
    family_constants,
    fluctuation_residual,
    heat_capacity,
    kappa_tilde,
    mean_energy,
)

__version__ = "0.1.0"
