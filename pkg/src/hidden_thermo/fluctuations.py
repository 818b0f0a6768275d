"""Second moments of the kinetic energy under hidden and thermal averaging.

Units: m0 = c = 1 throughout, so masses are in m0 and energies in m0 c^2.

Two averages are involved. ``<...>`` runs over the hidden motion (isotropic
direction, Juttner magnitude). The overline runs over the thermal law of the
observable Lorentz factor ``gamma_T``. The thermal law enters only through

    x1 = E[gamma_T - 1],   x2 = E[(gamma_T - 1)^2],   kappa = x2 / x1^2 - 1.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .juttner import (
    JuttnerDist,
    _k_ratio,
    _check_domain,
    gamma_from_uniform,
    juttner_expect,
    mass_moments,
)
from .kinematics import EnergyConvention, kinetic_energy
from .numerics import (
    DEFAULT_QUAD,
    DomainError,
    QuadratureSpec,
    RandomStream,
    require_finite,
    split_stream,
)

__all__ = [
    "ThermalJuttner",
    "PointMass",
    "Tabulated",
    "ThermalDist",
    "KappaStats",
    "FluctuationEstimate",
    "DegenerateDistributionError",
    "excess_moments",
    "thermal_expect",
    "kappa_stats",
    "conditional_second_moment",
    "thermal_variance_exact",
    "thermal_variance_zeroth",
    "sphere_rule",
    "velocity_from_gamma",
    "hidden_average",
    "monte_carlo_moments",
]


class DegenerateDistributionError(DomainError):
    """The thermal law has no spread in ``gamma_T - 1`` (x1 = 0)."""


@dataclass(frozen=True)
class ThermalJuttner:
    """Juttner law for the observable Lorentz factor at ``alpha_T = m c^2 / theta_T``."""

    alpha_T: float

    def __post_init__(self):
        require_finite("alpha_T", self.alpha_T)
        if self.alpha_T <= 0:
            raise DomainError(f"alpha_T must be positive, got {self.alpha_T}")


@dataclass(frozen=True)
class PointMass:
    gamma_T: float

    def __post_init__(self):
        require_finite("gamma_T", self.gamma_T)
        if self.gamma_T < 1:
            raise DomainError(f"gamma_T must be >= 1, got {self.gamma_T}")


@dataclass(frozen=True)
class Tabulated:
    """Discrete law on Lorentz factors; weights are normalized on construction."""

    gammas: tuple
    weights: tuple

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if g.ndim != 1 or g.shape != w.shape or g.size == 0:
            raise DomainError("Tabulated needs equal-length, non-empty gammas and weights")
        require_finite("Tabulated", g, w)
        if np.any(g < 1) or np.any(w <= 0):
            raise DomainError("Tabulated gammas must be >= 1 and weights > 0")
        object.__setattr__(self, "gammas", tuple(g.tolist()))
        object.__setattr__(self, "weights", tuple((w / w.sum()).tolist()))


ThermalDist = Union[ThermalJuttner, PointMass, Tabulated]


@dataclass(frozen=True)
class KappaStats:
    x1: float
    x2: float
    kappa: float

    @property
    def kappa_in_unit_interval(self) -> bool:
        return 0.0 <= self.kappa <= 1.0


@dataclass(frozen=True)
class FluctuationEstimate:
    mean: float
    second_moment: float
    variance: float
    se_mean: float
    se_variance: float
    n: int
    seed: int


def excess_moments(td: ThermalDist) -> tuple[float, float]:
    """Return ``(x1, x2) = (E[gamma_T - 1], E[(gamma_T - 1)^2])``."""
    if isinstance(td, ThermalJuttner):
        a = _check_domain(JuttnerDist(td.alpha_T))
        r = _k_ratio(a)
        x1 = 3.0 / a + r - 1.0
        x2 = 12.0 / a ** 2 - 6.0 / a + 2.0 + (3.0 / a - 2.0) * r
        return x1, x2
    if isinstance(td, PointMass):
        e = td.gamma_T - 1.0
        return e, e * e
    if isinstance(td, Tabulated):
        e = np.asarray(td.gammas) - 1.0
        w = np.asarray(td.weights)
        return float(w @ e), float(w @ (e * e))
    raise TypeError(f"unsupported thermal distribution {td!r}")


def thermal_expect(td: ThermalDist, f: Callable[[float], float], spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Thermal average ``E[f(gamma_T)]`` (quadrature for the Juttner law)."""
    if isinstance(td, ThermalJuttner):
        return juttner_expect(JuttnerDist(td.alpha_T), f, spec)
    if isinstance(td, PointMass):
        return float(f(td.gamma_T))
    if isinstance(td, Tabulated):
        return float(sum(w * f(g) for g, w in zip(td.gammas, td.weights)))
    raise TypeError(f"unsupported thermal distribution {td!r}")


def kappa_stats(td: ThermalDist) -> KappaStats:
    """Relative dispersion ``kappa = x2 / x1^2 - 1`` of ``gamma_T - 1``."""
    x1, x2 = excess_moments(td)
    if x1 <= 0.0:
        raise DegenerateDistributionError("kappa undefined: gamma_T - 1 vanishes identically")
    return KappaStats(x1, x2, x2 / (x1 * x1) - 1.0)


def conditional_second_moment(hidden: JuttnerDist, gamma_T: float) -> float:
    """``<E_k^2>`` over the hidden motion at fixed ``gamma_T`` (HiddenRest energies).

    ``(4<m^2> - 1)/3 (gamma_T - 1)^2 + 2 (<m^2> - 1)/3 (gamma_T - 1)``.
    """
    require_finite("gamma_T", gamma_T)
    if gamma_T < 1:
        raise DomainError(f"gamma_T must be >= 1, got {gamma_T}")
    m2 = mass_moments(hidden).mean_mass_sq
    e = gamma_T - 1.0
    return (4.0 * m2 - 1.0) / 3.0 * e * e + 2.0 * (m2 - 1.0) / 3.0 * e


def thermal_variance_exact(hidden: JuttnerDist, td: ThermalDist) -> float:
    """Variance of the kinetic energy over hidden and thermal motion, to all orders in alpha."""
    mm = mass_moments(hidden)
    m, m2 = mm.mean_mass, mm.mean_mass_sq
    x1, x2 = excess_moments(td)
    mc2 = m  # c = m0 = 1
    return (
        (4.0 * m2 - 1.0) / (3.0 * m * m) * mc2 ** 2 * x2
        - mc2 ** 2 * x1 ** 2
        + 2.0 * (m2 - 1.0) / (3.0 * m * m) * mc2 * (mc2 * x1)
    )


def thermal_variance_zeroth(kappa: float, mean_Ek: float, mc2: float) -> float:
    """Lowest-order (alpha -> 0) variance as a function of the mean energy.

    ``[(4/3)^2 (1 + kappa) - 1] mean_Ek^2 + (2/3)(4/3) mc2 mean_Ek``.
    """
    require_finite("thermal_variance_zeroth", kappa, mean_Ek, mc2)
    if kappa < 0 or np.any(np.asarray(mean_Ek) < 0) or mc2 <= 0:
        raise DomainError("kappa and mean_Ek must be >= 0, mc2 > 0")
    return (16.0 / 9.0 * (1.0 + kappa) - 1.0) * mean_Ek ** 2 + 8.0 / 9.0 * mc2 * mean_Ek


# ---------------------------------------------------------------------------
# Quadrature oracle over the hidden motion


def sphere_rule(n_u: int = 16, n_phi: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Product rule on the unit sphere: Gauss-Legendre in cos(theta), trapezoid in phi.

    Returns ``(directions (k, 3), weights (k,))`` with weights summing to 1.
    Exact for spherical polynomials of degree < min(2 n_u, n_phi).
    """
    u, wu = np.polynomial.legendre.leggauss(n_u)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    uu, pp = np.meshgrid(u, phi, indexing="ij")
    st = np.sqrt(1.0 - uu * uu)
    dirs = np.stack([uu, st * np.cos(pp), st * np.sin(pp)], axis=-1).reshape(-1, 3)
    w = (np.repeat(wu, n_phi) / (2.0 * n_phi))
    return dirs, w


def velocity_from_gamma(g):
    """Speed ``sqrt(1 - 1/g^2)`` from a Lorentz factor, written to avoid cancellation."""
    g = np.asarray(g, dtype=float)
    return np.sqrt((g - 1.0) * (g + 1.0)) / g


def hidden_average(
    hidden: JuttnerDist,
    func: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec = DEFAULT_QUAD,
    n_u: int = 16,
    n_phi: int = 16,
) -> float:
    """Average of ``func(beta_0)`` over isotropic directions and Juttner speeds.

    ``func`` maps an ``(k, 3)`` array of hidden velocities to ``k`` values.
    Directions use :func:`sphere_rule`; the speed uses adaptive quadrature.
    """
    dirs, w = sphere_rule(n_u, n_phi)

    def over_directions(g0):
        b0 = float(velocity_from_gamma(g0))
        return float(w @ np.asarray(func(b0 * dirs), dtype=float))

    return juttner_expect(hidden, over_directions, spec)


# ---------------------------------------------------------------------------
# Monte Carlo

MC_BLOCK = 1 << 16
MC_BATCHES = 100


def _draw_thermal(td: ThermalDist, rs: RandomStream, n: int) -> np.ndarray:
    if isinstance(td, PointMass):
        return np.full(n, td.gamma_T)
    u = rs.generator().random(n)
    if isinstance(td, ThermalJuttner):
        return gamma_from_uniform(JuttnerDist(td.alpha_T), u)
    if isinstance(td, Tabulated):
        cum = np.cumsum(td.weights)
        idx = np.minimum(np.searchsorted(cum, u * cum[-1], side="right"), len(cum) - 1)
        return np.asarray(td.gammas)[idx]
    raise TypeError(f"unsupported thermal distribution {td!r}")


def _block_energies(hidden: JuttnerDist, td: ThermalDist, rs: RandomStream, n: int) -> np.ndarray:
    s_hidden, s_dir, s_thermal = split_stream(rs, 3)
    g0 = gamma_from_uniform(hidden, s_hidden.generator().random(n))
    ang = s_dir.generator().random((n, 2))
    u = 2.0 * ang[:, 0] - 1.0  # cos(theta) = cos(arccos(2U - 1))
    phi = 2.0 * np.pi * ang[:, 1]
    st = np.sqrt(1.0 - u * u)
    dirs = np.stack([u, st * np.cos(phi), st * np.sin(phi)], axis=-1)
    gT = _draw_thermal(td, s_thermal, n)
    beta_0 = velocity_from_gamma(g0)[:, None] * dirs
    beta_T = np.zeros((n, 3))
    beta_T[:, 0] = velocity_from_gamma(gT)
    return kinetic_energy(1.0, beta_T, beta_0, EnergyConvention.HIDDEN_REST)


def monte_carlo_moments(
    hidden: JuttnerDist,
    td: ThermalDist,
    rs: RandomStream,
    n: int,
    chunks: int = 1,
) -> FluctuationEstimate:
    """Brute-force moments of the HiddenRest kinetic energy.

    Samples are generated in fixed blocks of ``MC_BLOCK`` draws, each from its
    own child stream, and reduced in block order, so the result is bitwise
    identical for any ``chunks`` (number of worker threads). Standard errors
    come from ``MC_BATCHES`` batch means.
    """
    if isinstance(n, bool) or int(n) != n or n < 1000:
        raise DomainError(f"monte_carlo_moments needs n >= 1000, got {n!r}")
    if isinstance(chunks, bool) or int(chunks) != chunks or chunks < 1:
        raise DomainError(f"chunks must be a positive integer, got {chunks!r}")
    n = int(n)
    n_blocks = -(-n // MC_BLOCK)
    streams = split_stream(rs, n_blocks)
    sizes = [min(MC_BLOCK, n - i * MC_BLOCK) for i in range(n_blocks)]
    jobs = list(zip(streams, sizes))
    if chunks == 1:
        parts = [_block_energies(hidden, td, s, k) for s, k in jobs]
    else:
        with ThreadPoolExecutor(max_workers=int(chunks)) as pool:
            parts = list(pool.map(lambda job: _block_energies(hidden, td, *job), jobs))
    e = np.concatenate(parts)

    mean = float(np.mean(e))
    second = float(np.mean(e * e))
    dev2 = (e - mean) ** 2
    variance = float(np.mean(dev2))
    batch_mean = np.array([b.mean() for b in np.array_split(e, MC_BATCHES)])
    batch_var = np.array([b.mean() for b in np.array_split(dev2, MC_BATCHES)])
    se_mean = float(np.std(batch_mean, ddof=1) / math.sqrt(MC_BATCHES))
    se_var = float(np.std(batch_var, ddof=1) / math.sqrt(MC_BATCHES))
    return FluctuationEstimate(mean, second, variance, se_mean, se_var, n, int(rs.seed))
