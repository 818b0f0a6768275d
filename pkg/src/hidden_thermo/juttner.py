"""Maxwell-Juttner law for the hidden Lorentz factor.

The density over ``gamma >= 1`` is

    f(gamma) = alpha / K2(alpha) * gamma * sqrt(gamma^2 - 1) * exp(-alpha * gamma),

with ``alpha = m0 c^2 / theta0``. Its first two moments give the apparent mass
and mean squared mass (in units of m0 and m0^2):

    <m>   = 3/alpha + K1/K2
    <m^2> = 12/alpha^2 + 1 + 3 K1 / (alpha K2)

Internally many routines work in ``s = sqrt(alpha (gamma - 1))``. In that
variable the density is smooth at the origin and its tail is ``~ exp(-s^2)``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .numerics import (
    DEFAULT_QUAD,
    DomainError,
    QuadratureSpec,
    RandomStream,
    bessel_k012_scaled,
    integrate,
    require_finite,
)

__all__ = [
    "JuttnerDist",
    "MassMoments",
    "TabulationError",
    "pdf_gamma",
    "cdf_gamma",
    "mean_gamma",
    "mean_gamma_sq",
    "juttner_expect",
    "sample_gamma",
    "mass_moments",
    "moment_ratio_deviation",
    "gamma_max",
]

ALPHA_MIN = 1e-6
ALPHA_MAX = 700.0
# exp(-750) is below the smallest subnormal double
TAIL_EXPONENT = 750.0


class TabulationError(RuntimeError):
    """The tabulated inverse CDF failed a consistency check."""


@dataclass(frozen=True)
class JuttnerDist:
    alpha: float

    def __post_init__(self):
        require_finite("JuttnerDist.alpha", self.alpha)
        if self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class MassMoments:
    mean_mass: float
    mean_mass_sq: float

    @property
    def ratio(self) -> float:
        return self.mean_mass_sq / self.mean_mass ** 2


def _check_domain(d: JuttnerDist) -> float:
    if not ALPHA_MIN <= d.alpha <= ALPHA_MAX:
        raise DomainError(f"alpha={d.alpha} outside the Bessel accuracy domain [{ALPHA_MIN}, {ALPHA_MAX}]")
    return d.alpha


def gamma_max(d: JuttnerDist) -> float:
    """Upper truncation point beyond which the density is below 1e-300."""
    return 1.0 + TAIL_EXPONENT / d.alpha


def _k_ratio(alpha: float) -> float:
    _, k1, k2 = bessel_k012_scaled(alpha)
    return k1 / k2


def pdf_gamma(d: JuttnerDist, g):
    """Probability density of the hidden Lorentz factor."""
    alpha = _check_domain(d)
    g = np.asarray(g, dtype=float)
    require_finite("pdf_gamma", g)
    if np.any(g < 1.0):
        raise DomainError("pdf_gamma: gamma must be >= 1")
    k2s = bessel_k012_scaled(alpha)[2]
    gm1 = g - 1.0
    with np.errstate(under="ignore"):
        out = alpha / k2s * g * np.sqrt(gm1 * (g + 1.0)) * np.exp(-alpha * gm1)
    return float(out) if out.ndim == 0 else out


def _pdf_s(alpha: float, k2s: float, s: np.ndarray) -> np.ndarray:
    """Density in ``s = sqrt(alpha (gamma - 1))``."""
    g = 1.0 + s * s / alpha
    return 2.0 * s * s * g * np.sqrt(g + 1.0) * np.exp(-s * s) / (math.sqrt(alpha) * k2s)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def cdf_gamma(d: JuttnerDist, g):
    """Cumulative distribution at ``g`` by piecewise Gauss-Legendre quadrature.

    Arrays are integrated gap by gap between consecutive sorted points, which
    makes evaluation at many points (e.g. a sample for a KS test) cheap.
    """
    alpha = _check_domain(d)
    g = np.asarray(g, dtype=float)
    require_finite("cdf_gamma", g)
    if np.any(g < 1.0):
        raise DomainError("cdf_gamma: gamma must be >= 1")
    k2s = bessel_k012_scaled(alpha)[2]
    flat = g.ravel()
    order = np.argsort(flat, kind="stable")
    s = np.sqrt(alpha * (flat[order] - 1.0))
    s = np.minimum(s, math.sqrt(TAIL_EXPONENT))
    # insert unit-width breakpoints so no gap is wider than 0.25 in s
    fixed = np.arange(0.0, math.sqrt(TAIL_EXPONENT) + 0.25, 0.25)
    grid = np.union1d(fixed, s)
    lo, hi = grid[:-1], grid[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
    inc = half * (_pdf_s(alpha, k2s, nodes) @ _GL_W)
    cum = np.concatenate(([0.0], np.cumsum(inc)))
    out = np.empty_like(flat)
    out[order] = np.minimum(cum[np.searchsorted(grid, s)], 1.0)
    out = out.reshape(g.shape)
    return float(out) if out.ndim == 0 else out


def mean_gamma(d: JuttnerDist) -> float:
    """``<gamma> = 3/alpha + K1(alpha)/K2(alpha)``."""
    alpha = _check_domain(d)
    return 3.0 / alpha + _k_ratio(alpha)


def mean_gamma_sq(d: JuttnerDist) -> float:
    """``<gamma^2> = 12/alpha^2 + 1 + 3 K1 / (alpha K2)``."""
    alpha = _check_domain(d)
    return 12.0 / alpha ** 2 + 1.0 + 3.0 * _k_ratio(alpha) / alpha


def mass_moments(d: JuttnerDist) -> MassMoments:
    """Apparent mass ``<m0 gamma0>`` and ``<(m0 gamma0)^2>`` in units of m0."""
    return MassMoments(mean_gamma(d), mean_gamma_sq(d))


def moment_ratio_deviation(d: JuttnerDist) -> float:
    """``(<m^2>/<m>^2 - 4/3) / alpha^2``; stays bounded as alpha -> 0."""
    mm = mass_moments(d)
    return (mm.ratio - 4.0 / 3.0) / d.alpha ** 2


def juttner_expect(d: JuttnerDist, f, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``E[f(gamma)]`` under the Juttner density by adaptive quadrature in gamma."""
    alpha = _check_domain(d)
    pts = [1.0 + k / alpha for k in (0.5, 2.0, 5.0, 15.0, 40.0, 100.0)]
    val, _ = integrate(lambda g: f(g) * pdf_gamma(d, g), 1.0, gamma_max(d), spec, points=pts)
    return val


# ---------------------------------------------------------------------------
# Sampling by inverse CDF on a cubic Hermite table in s

_TABLE_S_MAX = 9.0  # tail mass beyond s = 9 is below 1e-30
_TABLE_S_KNEE = 0.05
_TABLE_S_MIN = 1e-11  # mass below s_min is below 1e-32
_TABLE_UNIFORM_CELLS = 2048


def _table_nodes() -> np.ndarray:
    # geometric near the origin, where the density goes like s^2 .. s^5
    n_geo = int(math.ceil(math.log(_TABLE_S_KNEE / _TABLE_S_MIN) / math.log(1.05)))
    geo = np.geomspace(_TABLE_S_MIN, _TABLE_S_KNEE, n_geo + 1)
    uni = np.linspace(_TABLE_S_KNEE, _TABLE_S_MAX, _TABLE_UNIFORM_CELLS + 1)
    return np.concatenate(([0.0], geo[:-1], uni))
_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class _InverseTable:
    s: np.ndarray
    cum: np.ndarray
    inc: np.ndarray
    slope_lo: np.ndarray  # pdf * h / inc at the left node
    slope_hi: np.ndarray


def _hermite_monotone(a, b, tol=1e-9):
    # Fritsch-Carlson region for a cubic Hermite with normalized end slopes a, b
    c = a + b - 2.0
    ok = (c <= tol) | (2 * a + b - 3.0 <= tol) | (a + 2 * b - 3.0 <= tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        ok |= a - (2 * a + b - 3.0) ** 2 / (3.0 * c) >= -tol
    return ok


@functools.lru_cache(maxsize=64)
def _inverse_table(alpha: float) -> _InverseTable:
    k2s = bessel_k012_scaled(alpha)[2]
    s = _table_nodes()
    h = np.diff(s)
    nodes = s[:-1, None] + 0.5 * h[:, None] * (1.0 + _GL8_X[None, :])
    inc = 0.5 * h * (_pdf_s(alpha, k2s, nodes) @ _GL8_W)
    total = inc.sum()
    if not abs(total - 1.0) < 1e-10:
        raise TabulationError(f"Juttner table for alpha={alpha} integrates to {total!r}")
    if np.any(inc <= 0.0):
        raise TabulationError(f"Juttner table for alpha={alpha} has empty cells")
    pdf = _pdf_s(alpha, k2s, s)
    slope_lo = pdf[:-1] * h / inc
    slope_hi = pdf[1:] * h / inc
    # the first cell carries < 1e-32 of the mass; interpolate it linearly
    slope_lo[0] = slope_hi[0] = 1.0
    if not np.all(_hermite_monotone(slope_lo, slope_hi)):
        raise TabulationError(f"Juttner table for alpha={alpha} is not monotone")
    cum = np.concatenate(([0.0], np.cumsum(inc)))
    return _InverseTable(s, cum, inc, slope_lo, slope_hi)


def _hermite_solve(a, b, r, iters=60):
    """Solve the normalized monotone cubic Hermite ``H(t) = r`` on [0, 1]."""
    t = r.copy()
    lo = np.zeros_like(r)
    hi = np.ones_like(r)
    active = np.arange(r.size)
    for _ in range(iters):
        if active.size == 0:
            break
        ta, aa, ba, ra = t[active], a[active], b[active], r[active]
        t2 = ta * ta
        val = aa * (t2 * ta - 2 * t2 + ta) + (3 * t2 - 2 * t2 * ta) + ba * (t2 * ta - t2) - ra
        der = aa * (3 * t2 - 4 * ta + 1) + 6 * (ta - t2) + ba * (3 * t2 - 2 * ta)
        la = np.where(val < 0, ta, lo[active])
        ha = np.where(val > 0, ta, hi[active])
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = ta - val / der
        bad = ~((newton > la) & (newton < ha))
        tn = np.where(bad, 0.5 * (la + ha), newton)
        t[active], lo[active], hi[active] = tn, la, ha
        active = active[(np.abs(tn - ta) > 1e-14) & (val != 0)]
    return t


def _invert(table: _InverseTable, u: np.ndarray) -> np.ndarray:
    n_cells = table.inc.size
    idx = np.clip(np.searchsorted(table.cum, u, side="right") - 1, 0, n_cells - 1)
    r = np.clip((u - table.cum[idx]) / table.inc[idx], 0.0, 1.0)
    t = _hermite_solve(table.slope_lo[idx], table.slope_hi[idx], r)
    return table.s[idx] + t * (table.s[idx + 1] - table.s[idx])


def sample_gamma(d: JuttnerDist, rs: RandomStream, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. hidden Lorentz factors; deterministic in ``(d, rs, n)``."""
    alpha = _check_domain(d)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    u = rs.generator().random(int(n))
    return gamma_from_uniform(d, u)


def gamma_from_uniform(d: JuttnerDist, u) -> np.ndarray:
    """Map uniforms in ``[0, 1)`` to Juttner-distributed Lorentz factors."""
    alpha = _check_domain(d)
    s = _invert(_inverse_table(float(alpha)), np.asarray(u, dtype=float))
    return 1.0 + s * s / alpha
