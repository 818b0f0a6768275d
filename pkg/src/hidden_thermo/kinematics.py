"""Relativistic kinematics of a particle with an observable drift and a hidden velocity.

Velocities are dimensionless 3-vectors (units of c). Every function broadcasts
over leading axes, so an ``(n, 3)`` array is treated as ``n`` velocities.

Two kinetic-energy references are offered. ``BARE_REST`` subtracts the bare
rest energy ``m0 c^2``. ``HIDDEN_REST`` subtracts ``m0 gamma0 c^2``, the energy
of the particle carrying only its hidden motion. Only the second one averages
to ``m c^2 (gamma_T - 1)`` over isotropic hidden velocities, so it is the
default for all fluctuation formulas. It is a reconstruction, chosen because it
reproduces the averaged energy and second moment; the original derivation does
not state it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .numerics import DomainError, require_finite

__all__ = [
    "EnergyConvention",
    "Trajectory2Point",
    "as_beta",
    "mean_velocity",
    "gamma",
    "compose_velocity",
    "momentum",
    "momentum_terms",
    "kinetic_energy",
    "total_energy",
]


class EnergyConvention(enum.Enum):
    BARE_REST = "bare"
    HIDDEN_REST = "hidden"


def as_beta(b, name: str = "beta") -> np.ndarray:
    """Validate and return ``b`` as a float array of 3-velocities with norm < 1."""
    b = np.asarray(b, dtype=float)
    if b.shape[-1:] != (3,):
        raise DomainError(f"{name}: expected trailing dimension 3, got shape {b.shape}")
    require_finite(name, b)
    if np.any(np.einsum("...i,...i->...", b, b) >= 1.0):
        raise DomainError(f"{name}: speed must be strictly below c")
    return b


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


@dataclass(frozen=True)
class Trajectory2Point:
    """Two positions separated by an averaging window ``tau``."""

    r_now: tuple
    r_then: tuple
    tau: float
    c: float = 1.0

    def __post_init__(self):
        require_finite("Trajectory2Point", self.r_now, self.r_then, self.tau, self.c)
        if self.tau <= 0 or self.c <= 0:
            raise DomainError("tau and c must be positive")
        if np.shape(self.r_now) != (3,) or np.shape(self.r_then) != (3,):
            raise DomainError("positions must be 3-vectors")


def mean_velocity(t: Trajectory2Point) -> np.ndarray:
    """Window-averaged velocity ``(r_now - r_then) / (c tau)``."""
    beta = (np.asarray(t.r_now, float) - np.asarray(t.r_then, float)) / (t.c * t.tau)
    if _dot(beta, beta) >= 1.0:
        raise DomainError("displacement exceeds c * tau; mean velocity would be superluminal")
    return beta


def gamma(b) -> np.ndarray | float:
    """Lorentz factor ``(1 - |b|^2)^(-1/2)``."""
    b = as_beta(b)
    g = 1.0 / np.sqrt(1.0 - _dot(b, b))
    return float(g) if g.ndim == 0 else g


def _parallel_part(beta_0, beta_T):
    """Component of ``beta_0`` along ``beta_T``; zero when ``beta_T`` vanishes."""
    bt2 = _dot(beta_T, beta_T)
    safe = np.where(bt2 > 0.0, bt2, 1.0)
    coef = np.where(bt2 > 0.0, _dot(beta_0, beta_T) / safe, 0.0)
    return coef[..., None] * beta_T


def compose_velocity(beta_T, beta_0) -> np.ndarray:
    """Lab velocity of a particle moving at ``beta_0`` in a frame drifting at ``beta_T``.

    Parallel and perpendicular parts of ``beta_0`` are taken with respect to
    ``beta_T``; for zero drift the result is ``beta_0``.
    """
    beta_T = as_beta(beta_T, "beta_T")
    beta_0 = as_beta(beta_0, "beta_0")
    par = _parallel_part(beta_0, beta_T)
    perp = beta_0 - par
    inv_gT = np.sqrt(1.0 - _dot(beta_T, beta_T))[..., None]
    denom = (1.0 + _dot(beta_0, beta_T))[..., None]
    return (beta_T + par + perp * inv_gT) / denom


def momentum(m0: float, beta_T, beta_0, c: float = 1.0) -> np.ndarray:
    """Momentum ``m0 c gamma(beta) beta`` of the composed velocity.

    ``gamma(beta)`` is taken as ``gamma0 gamma_T (1 + beta0 . beta_T)``, which
    is exact and avoids forming ``1 - |beta|^2`` near the light cone.
    """
    beta = compose_velocity(beta_T, beta_0)
    g = total_energy(1.0, beta_T, beta_0)
    return m0 * c * np.asarray(g)[..., None] * beta


def momentum_terms(m0: float, beta_T, beta_0, c: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Split the momentum into a drift term and a hidden-velocity term.

    ``drift = m0 c gamma0 gamma_T beta_T`` and
    ``hidden = m0 c gamma_T gamma0 (beta0_par + beta0_perp / gamma_T)``.
    Their sum equals :func:`momentum`; the hidden term is odd in ``beta_0``
    and averages to zero over isotropic directions.
    """
    beta_T = as_beta(beta_T, "beta_T")
    beta_0 = as_beta(beta_0, "beta_0")
    gT = 1.0 / np.sqrt(1.0 - _dot(beta_T, beta_T))
    g0 = 1.0 / np.sqrt(1.0 - _dot(beta_0, beta_0))
    par = _parallel_part(beta_0, beta_T)
    perp = beta_0 - par
    drift = m0 * c * (g0 * gT)[..., None] * beta_T
    hidden = m0 * c * (g0 * gT)[..., None] * (par + perp / gT[..., None])
    return drift, hidden


def total_energy(m0: float, beta_T, beta_0, c: float = 1.0):
    """Total energy ``m0 c^2 gamma0 gamma_T (1 + beta0 . beta_T)``."""
    beta_T = as_beta(beta_T, "beta_T")
    beta_0 = as_beta(beta_0, "beta_0")
    gT = 1.0 / np.sqrt(1.0 - _dot(beta_T, beta_T))
    g0 = 1.0 / np.sqrt(1.0 - _dot(beta_0, beta_0))
    e = m0 * c * c * g0 * gT * (1.0 + _dot(beta_0, beta_T))
    return float(e) if np.ndim(e) == 0 else e


def kinetic_energy(
    m0: float,
    beta_T,
    beta_0,
    conv: EnergyConvention = EnergyConvention.HIDDEN_REST,
    c: float = 1.0,
):
    """Kinetic energy of the composed motion.

    ``BARE_REST``: ``m0 c^2 [(1 + beta0.beta_T) gamma0 gamma_T - 1]``, never negative.
    ``HIDDEN_REST``: ``m0 gamma0 c^2 [(1 + beta0.beta_T) gamma_T - 1]``; negative
    when the hidden velocity points against the drift strongly enough.
    """
    beta_T = as_beta(beta_T, "beta_T")
    beta_0 = as_beta(beta_0, "beta_0")
    bt2 = _dot(beta_T, beta_T)
    b02 = _dot(beta_0, beta_0)
    gT = 1.0 / np.sqrt(1.0 - bt2)
    g0 = 1.0 / np.sqrt(1.0 - b02)
    proj = _dot(beta_0, beta_T)
    # gamma - 1 written as b^2 / (sqrt(1-b^2) (1 + sqrt(1-b^2))) keeps precision at low speed
    gT_m1 = bt2 * gT / (1.0 + np.sqrt(1.0 - bt2))
    g0_m1 = b02 * g0 / (1.0 + np.sqrt(1.0 - b02))
    if conv is EnergyConvention.HIDDEN_REST:
        e = m0 * c * c * g0 * (gT_m1 + proj * gT)
    elif conv is EnergyConvention.BARE_REST:
        e = m0 * c * c * (g0 * (gT_m1 + proj * gT) + g0_m1)
    else:
        raise DomainError(f"unknown energy convention {conv!r}")
    return float(e) if np.ndim(e) == 0 else e
