"""Fluctuation temperature, the equipartition baseline and the non-equipartition law.

Units: k_B = 1; energies and temperatures share one unit (m0 c^2 unless the
caller rescales). The mean-energy law

    E(theta) = (eps0 / kappa_tilde) / (exp(2 eps0 / (3 theta)) - 1)

solves ``-dE/d(1/theta) = A E^2 + B E`` with ``A = (16/9)(1 + kappa) - 1``,
``B = (2/3) eps0``, under the condition that E diverges as theta -> infinity.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .fluctuations import ThermalDist, kappa_stats, thermal_variance_zeroth
from .juttner import JuttnerDist, mass_moments
from .numerics import DEFAULT_QUAD, ConvergenceError, DomainError, QuadratureSpec, integrate, integrate_tabulated, require_finite

__all__ = [
    "ConfigurationError",
    "ZerothOrderWarning",
    "EquipartitionWarning",
    "OneParamFamily",
    "ThermoModel",
    "family_constants",
    "fluctuation_residual",
    "kappa_tilde",
    "mean_energy",
    "heat_capacity",
    "zeroth_order_variance",
    "build_model",
    "ALPHA_WARN",
]

ALPHA_WARN = 0.1
DEGENERATE_D = 1e-4


class ConfigurationError(ValueError):
    """Inputs are individually valid but cannot be combined as requested."""


class ZerothOrderWarning(UserWarning):
    """The hidden bath is not hot enough for the alpha -> 0 formulas."""


class EquipartitionWarning(UserWarning):
    """Relative energy variance ``d`` is ~0, so ``E = theta / d`` blows up."""


@dataclass(frozen=True)
class OneParamFamily:
    """Moments of a one-parameter energy law ``F(E/E0)``."""

    a: float
    b: float

    @property
    def d(self) -> float:
        return self.b / self.a ** 2 - 1.0

    def mean_energy(self, theta):
        """Equipartition-type baseline ``E = theta / d``."""
        return np.asarray(theta, dtype=float) / self.d


def family_constants(F, spec: QuadratureSpec = DEFAULT_QUAD) -> OneParamFamily:
    """Moment constants ``a = <x>``, ``b = <x^2>`` of the density ``F`` on ``[0, inf)``.

    ``F`` is either a callable or a tabulated ``(x, F(x))`` pair of arrays.
    """
    if callable(F):
        def mom(k):
            # split at x = 1: integrable endpoint singularities converge faster
            return integrate(lambda x: x ** k * F(x), 0.0, math.inf, spec, points=[1.0])[0]
    else:
        x, y = (np.asarray(v, dtype=float) for v in F)
        if np.any(y < 0):
            raise DomainError("density must be non-negative")

        def mom(k):
            return integrate_tabulated(x, x ** k * y)

    try:
        z, m1, m2 = mom(0), mom(1), mom(2)
    except (OverflowError, FloatingPointError, ConvergenceError) as exc:
        raise DomainError(f"density moments diverge: {exc}") from exc
    if not all(math.isfinite(v) for v in (z, m1, m2)) or z <= 0 or m1 <= 0:
        raise DomainError("density is not normalizable or has no finite first two moments")
    fam = OneParamFamily(m1 / z, m2 / z)
    if fam.d < DEGENERATE_D:
        warnings.warn(f"relative variance d = {fam.d:.3g} ~ 0: theta/d diverges", EquipartitionWarning, stacklevel=2)
    return fam


def _five_point(f, x, h):
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def fluctuation_residual(
    curve: Callable[[np.ndarray], np.ndarray],
    variance_fn: Callable[[np.ndarray], np.ndarray],
    theta_grid: Sequence[float],
    step_ratio: float = 1e-3,
) -> float:
    """Worst relative mismatch of ``-dE/d(1/theta)`` against ``variance_fn(E)``.

    The derivative is a 5-point central difference in ``1/theta`` with a step
    of ``step_ratio`` times the local grid spacing in ``1/theta``.
    """
    theta = np.asarray(theta_grid, dtype=float)
    require_finite("theta_grid", theta)
    if theta.ndim != 1 or theta.size < 2:
        raise ConfigurationError("need at least two temperatures for a finite-difference stencil")
    if np.any(theta <= 0) or np.any(np.diff(theta) <= 0):
        raise ConfigurationError("theta grid must be positive and strictly increasing")
    beta = 1.0 / theta
    spacing = np.abs(np.gradient(beta))
    h = step_ratio * spacing
    if np.any(2 * h >= beta):
        raise ConfigurationError("stencil reaches 1/theta <= 0; refine the grid")

    def energy(b):
        return np.asarray(curve(1.0 / b), dtype=float)

    lhs = -_five_point(energy, beta, h)
    rhs = np.asarray(variance_fn(energy(beta)), dtype=float)
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


def kappa_tilde(kappa: float) -> float:
    """``(3/2) [(16/9)(1 + kappa) - 1]``."""
    require_finite("kappa", kappa)
    if kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    return 1.5 * (16.0 / 9.0 * (1.0 + kappa) - 1.0)


@dataclass(frozen=True)
class ThermoModel:
    epsilon0: float
    kappa: float

    def __post_init__(self):
        require_finite("ThermoModel", self.epsilon0, self.kappa)
        if self.epsilon0 <= 0 or self.kappa < 0:
            raise DomainError("ThermoModel needs epsilon0 > 0 and kappa >= 0")

    @property
    def kappa_tilde(self) -> float:
        return kappa_tilde(self.kappa)

    @property
    def mc2(self) -> float:
        return 0.75 * self.epsilon0


def _theta(theta_T):
    t = np.asarray(theta_T, dtype=float)
    require_finite("theta_T", t)
    if np.any(t <= 0):
        raise DomainError("theta_T must be positive")
    return t


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def mean_energy(tm: ThermoModel, theta_T):
    """Mean observable kinetic energy at apparent temperature ``theta_T``."""
    t = _theta(theta_T)
    x = tm.epsilon0 / (1.5 * t)
    with np.errstate(under="ignore"):
        v = tm.epsilon0 / tm.kappa_tilde * np.exp(-x) / -np.expm1(-x)
    return _out(v)


def heat_capacity(tm: ThermoModel, theta_T):
    """``d(mean_energy)/d(theta_T)``; vanishes as theta_T -> 0, tends to 3/(2 kappa_tilde)."""
    t = _theta(theta_T)
    x = tm.epsilon0 / (1.5 * t)
    with np.errstate(under="ignore"):
        v = 2.0 / (3.0 * tm.kappa_tilde) * (tm.epsilon0 / t) ** 2 * np.exp(-x) / np.expm1(-x) ** 2
    return _out(v)


def zeroth_order_variance(tm: ThermoModel) -> Callable:
    """Energy variance as a function of mean energy, at lowest order in alpha."""
    return lambda e: thermal_variance_zeroth(tm.kappa, e, tm.mc2)


def build_model(hidden: JuttnerDist, td: ThermalDist) -> ThermoModel:
    """Model with ``eps0 = (4/3) <m> c^2`` and ``kappa`` taken from the thermal law."""
    if hidden.alpha > ALPHA_WARN:
        warnings.warn(
            f"alpha = {hidden.alpha} > {ALPHA_WARN}: lowest-order variance is inaccurate",
            ZerothOrderWarning,
            stacklevel=2,
        )
    eps0 = 4.0 / 3.0 * mass_moments(hidden).mean_mass
    return ThermoModel(eps0, kappa_stats(td).kappa)
