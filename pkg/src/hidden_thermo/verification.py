"""Self-checks behind ``hidden-thermo verify``.

Each suite returns a list of :class:`ReportRow`. A row passes when
``|measured - expected| <= tolerance``; relative checks report the relative
deviation as ``measured`` against an expected 0.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import fluctuations as fl
from . import juttner as ju
from . import kinematics as kin
from . import thermodynamics as th
from .numerics import QuadratureSpec, RandomStream, bessel_k, integrate, split_stream

SUITES = ("all", "bessel", "kinematics", "moments", "fluctuations", "thermo")
DEFAULT_SEED = 0x5EED


class Status(enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"
    WARN = "Warn"


@dataclass(frozen=True)
class ReportRow:
    check_name: str
    status: Status
    measured: float
    expected: float
    tolerance: float

    @classmethod
    def check(cls, name, measured, expected, tolerance, warn_only=False):
        ok = bool(abs(measured - expected) <= tolerance)
        status = Status.PASS if ok else (Status.WARN if warn_only else Status.FAIL)
        return cls(name, status, float(measured), float(expected), float(tolerance))

    def format(self) -> str:
        return (f"{self.status.value:<4}  {self.check_name:<52} measured={self.measured:.12g} "
                f"expected={self.expected:.12g} tol={self.tolerance:.3g}")


def rel(a, b):
    return abs(a - b) / abs(b)


def ks_statistic(sorted_cdf: np.ndarray) -> float:
    n = sorted_cdf.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - sorted_cdf), np.max(sorted_cdf - (i - 1) / n)))


def lorentz_boost_velocity(beta_T, beta_0):
    """Lab velocity from boosting the 4-velocity of ``beta_0`` by ``beta_T`` (matrix form)."""
    v = np.asarray(beta_T, float)
    v2 = v @ v
    g = 1.0 / math.sqrt(1.0 - v2)
    L = np.eye(4)
    L[0, 0] = g
    L[0, 1:] = L[1:, 0] = g * v
    if v2 > 0:
        L[1:, 1:] += (g - 1.0) * np.outer(v, v) / v2
    b0 = np.asarray(beta_0, float)
    U = np.concatenate(([1.0], b0)) / math.sqrt(1.0 - b0 @ b0)
    W = L @ U
    return W[1:] / W[0]


def hidden_beta(g0: float, u: np.ndarray, beta_T: np.ndarray) -> np.ndarray:
    """Hidden velocities of Lorentz factor ``g0`` at cosines ``u`` to ``beta_T`` (x axis)."""
    b0 = float(fl.velocity_from_gamma(g0))
    st = np.sqrt(1.0 - u * u)
    return b0 * np.stack([u, st, np.zeros_like(u)], axis=-1)


def direction_moment_oracle(hidden, gamma_T, power, conv=kin.EnergyConvention.HIDDEN_REST):
    """``<E_k^power>`` by nested quadrature: Gauss-Legendre in cos(theta), adaptive in gamma0.

    E_k depends on direction only through beta0 . beta_T, so one angle suffices.
    """
    u, wu = np.polynomial.legendre.leggauss(24)
    beta_T = np.array([float(fl.velocity_from_gamma(gamma_T)), 0.0, 0.0])

    def inner(g0):
        e = kin.kinetic_energy(1.0, beta_T, hidden_beta(g0, u, beta_T), conv)
        return 0.5 * float(wu @ e ** power)

    return ju.juttner_expect(hidden, inner, QuadratureSpec(rel_tol=1e-11))


def suite_bessel(seed: int) -> list[ReportRow]:
    rows = [ReportRow.check("K1(1)", bessel_k(1, 1.0), 0.6019072301972346, 1e-12 * 0.6019072301972346)]
    xs = np.geomspace(1e-6, 700, 10_000)
    k = np.array([[bessel_k(n, x) for n in range(3)] for x in xs])
    resid = np.max(np.abs(k[:, 2] - k[:, 0] - 2 * k[:, 1] / xs) / k[:, 2])
    rows.append(ReportRow.check("recurrence K2 = K0 + 2K1/x (max rel)", resid, 0.0, 1e-11))
    mono = min(float(np.min(-np.diff(k[:, n]) / k[1:, n])) for n in range(3))
    rows.append(ReportRow.check("K_n strictly decreasing (min rel drop > 0)", float(mono > 0), 1.0, 0.0))
    a = 1e-5
    rows.append(ReportRow.check("K2(a) a^2/2 -> 1 at a=1e-5", bessel_k(2, a) * a * a / 2, 1.0, 1e-4))
    rows.append(ReportRow.check("integral exp(-x) on [0,inf)", integrate(lambda x: math.exp(-x), 0, math.inf)[0], 1.0, 1e-10))
    for z in (0.01, 0.1, 1.0, 10.0):
        val, _ = integrate(lambda g: g * math.sqrt(g * g - 1) * math.exp(-z * g), 1.0, 1.0 + 750 / z,
                           points=[1 + c / z for c in (1, 5, 20, 100)])
        rows.append(ReportRow.check(f"Juttner normalization identity z={z}", rel(val, bessel_k(2, z) / z), 0.0, 1e-10))
    c0, c1 = split_stream(RandomStream(seed), 2)
    r = np.corrcoef(c0.generator().random(10_000), c1.generator().random(10_000))[0, 1]
    rows.append(ReportRow.check("split_stream child correlation |r|", abs(r), 0.0, 0.05))
    return rows


def suite_kinematics(seed: int) -> list[ReportRow]:
    rows = []
    v = kin.compose_velocity([0.5, 0, 0], [0.5, 0, 0])
    rows.append(ReportRow.check("collinear 0.5 (+) 0.5", v[0], 0.8, 1e-15))
    rows.append(ReportRow.check("gamma(|b|=0.6)", kin.gamma([0.6, 0, 0]), 1.25, 1e-15))

    rng = RandomStream(seed, 1).generator()

    def rand_beta(n, vmax=0.999):
        d = rng.normal(size=(n, 3))
        d /= np.linalg.norm(d, axis=1)[:, None]
        return d * (vmax * rng.random(n) ** (1 / 3))[:, None]

    bt, b0 = rand_beta(100_000), rand_beta(100_000)
    speed = np.linalg.norm(kin.compose_velocity(bt, b0), axis=1)
    rows.append(ReportRow.check("subluminal composition (1e5 pairs, max speed<1)", float(np.all(speed < 1)), 1.0, 0.0))

    bt, b0 = rand_beta(200, 0.99), rand_beta(200, 0.99)
    comp = kin.compose_velocity(bt, b0)
    boost = np.array([lorentz_boost_velocity(x, y) for x, y in zip(bt, b0)])
    rows.append(ReportRow.check("composition vs Lorentz boost (max rel)",
                                float(np.max(np.abs(comp - boost)) / np.min(np.linalg.norm(boost, axis=1))), 0.0, 1e-10))
    e = kin.total_energy(1.0, bt, b0)
    p = kin.momentum(1.0, bt, b0)
    rows.append(ReportRow.check("E^2 - p^2 = m0^2 (max rel)", float(np.max(np.abs(e * e - np.sum(p * p, axis=1) - 1.0))), 0.0, 1e-10))
    drift, hid = kin.momentum_terms(1.0, bt, b0)
    rows.append(ReportRow.check("momentum = drift + hidden terms (max rel)",
                                float(np.max(np.abs(drift + hid - p)) / np.min(np.linalg.norm(p, axis=1))), 0.0, 1e-12))

    hidden = ju.JuttnerDist(0.01)
    m = ju.mass_moments(hidden).mean_mass
    for gT in (1.5, 2.0, 5.0):
        mean_e = direction_moment_oracle(hidden, gT, 1)
        rows.append(ReportRow.check(f"<E_k> = m (gamma_T - 1), gamma_T={gT}", rel(mean_e, m * (gT - 1)), 0.0, 1e-8))
    gT = 2.0
    bare = direction_moment_oracle(hidden, gT, 1, kin.EnergyConvention.BARE_REST)
    rows.append(ReportRow.check("BareRest excess over <E_k> = (m - m0)", rel(bare - m * (gT - 1), m - 1.0), 0.0, 1e-8))

    beta_T = np.array([0.6, 0.0, 0.0])
    zero_spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-12 * m)
    hid_x = fl.hidden_average(hidden, lambda b: kin.momentum_terms(1.0, beta_T, b)[1][:, 0], zero_spec)
    hid_y = fl.hidden_average(hidden, lambda b: kin.momentum_terms(1.0, beta_T, b)[1][:, 1], zero_spec)
    rows.append(ReportRow.check("isotropic mean of hidden momentum / m", math.hypot(hid_x, hid_y) / m, 0.0, 1e-10))
    return rows


def suite_moments(seed: int) -> list[ReportRow]:
    rows = []
    for a in (0.01, 0.1, 1.0, 10.0):
        d = ju.JuttnerDist(a)
        mm = ju.mass_moments(d)
        rows.append(ReportRow.check(f"<m> closed form vs quadrature a={a}", rel(mm.mean_mass, ju.juttner_expect(d, lambda g: g)), 0.0, 1e-8))
        rows.append(ReportRow.check(f"<m^2> closed form vs quadrature a={a}", rel(mm.mean_mass_sq, ju.juttner_expect(d, lambda g: g * g)), 0.0, 1e-8))
    rows.append(ReportRow.check("<m^2>/<m>^2 - 4/3 at a=0.01", ju.mass_moments(ju.JuttnerDist(0.01)).ratio, 4 / 3, 1e-3))
    for a in (0.1, 0.01, 0.001):
        rows.append(ReportRow.check(f"(ratio - 4/3)/a^2 bounded, a={a}", ju.moment_ratio_deviation(ju.JuttnerDist(a)), 0.0, 1.0))
    streams = split_stream(RandomStream(seed, 2), 3)
    n = 200_000
    for a, rs in zip((0.1, 1.0, 10.0), streams):
        d = ju.JuttnerDist(a)
        x = ju.sample_gamma(d, rs, n)
        se = x.std(ddof=1) / math.sqrt(n)
        rows.append(ReportRow.check(f"sampler mean a={a} (n={n})", x.mean(), ju.mean_gamma(d), 5 * se))
        D = ks_statistic(ju.cdf_gamma(d, np.sort(x)))
        rows.append(ReportRow.check(f"sampler KS distance a={a}", D, 0.0, 1.95 / math.sqrt(n)))
    return rows


def suite_fluctuations(seed: int, n_mc: int = 1_000_000) -> list[ReportRow]:
    rows = []
    for a in (0.01, 0.1, 1.0):
        d = ju.JuttnerDist(a)
        for gT in (1.5, 2.0, 5.0):
            rows.append(ReportRow.check(
                f"<E_k^2 | gamma_T> vs nested quadrature a={a} gT={gT}",
                rel(fl.conditional_second_moment(d, gT), direction_moment_oracle(d, gT, 2)), 0.0, 1e-6))
    for a in (0.01, 0.1, 1.0):
        d = ju.JuttnerDist(a)
        m = ju.mass_moments(d).mean_mass
        for td in (fl.PointMass(2.0), fl.ThermalJuttner(0.01), fl.ThermalJuttner(1.0)):
            x1, _ = fl.excess_moments(td)
            ref = fl.thermal_expect(td, lambda g: fl.conditional_second_moment(d, g)) - (m * x1) ** 2
            rows.append(ReportRow.check(f"thermal variance identity a={a} {td}", rel(fl.thermal_variance_exact(d, td), ref), 0.0, 1e-10))
    rows.append(ReportRow.check("kappa(Juttner alpha_T=1e-3)", fl.kappa_stats(fl.ThermalJuttner(1e-3)).kappa, 1 / 3, 1e-3))
    hidden, td = ju.JuttnerDist(0.1), fl.ThermalJuttner(0.01)
    est = fl.monte_carlo_moments(hidden, td, RandomStream(seed, 3), n_mc)
    rows.append(ReportRow.check(f"MC variance vs exact (n={n_mc}, 5 se)", est.variance, fl.thermal_variance_exact(hidden, td), 5 * est.se_variance))
    m = ju.mass_moments(hidden).mean_mass
    rows.append(ReportRow.check(f"MC mean vs m x1 (n={n_mc}, 5 se)", est.mean, m * fl.excess_moments(td)[0], 5 * est.se_mean))
    a = 1e-3
    d = ju.JuttnerDist(a)
    ks = fl.kappa_stats(td)
    m = ju.mass_moments(d).mean_mass
    exact = fl.thermal_variance_exact(d, td)
    zeroth = fl.thermal_variance_zeroth(ks.kappa, m * ks.x1, m)
    rows.append(ReportRow.check("zeroth-order vs exact variance at a=1e-3 (rel)", rel(zeroth, exact), 0.0, 5 * a))
    return rows


def suite_thermo(seed: int) -> list[ReportRow]:
    rows = [ReportRow.check("kappa_tilde(1/3) = 37/18", th.kappa_tilde(1 / 3), 37 / 18, 1e-12)]
    tm = th.ThermoModel(1.0, 1 / 3)
    grid = np.geomspace(0.05, 50, 200)
    res = th.fluctuation_residual(lambda t: th.mean_energy(tm, t), th.zeroth_order_variance(tm), grid)
    rows.append(ReportRow.check("mean-energy law solves fluctuation relation", res, 0.0, 1e-8))
    h = 1e-5 * grid
    fd = (th.mean_energy(tm, grid + h) - th.mean_energy(tm, grid - h)) / (2 * h)
    rows.append(ReportRow.check("c_V = dE/dtheta (max rel)", float(np.max(np.abs(fd / th.heat_capacity(tm, grid) - 1))), 0.0, 1e-6))
    rows.append(ReportRow.check("c_V(eps0/30) < 1e-6", th.heat_capacity(tm, 1 / 30), 0.0, 1e-6))
    low = np.linspace(1e-3, 0.05, 200)
    rows.append(ReportRow.check("c_V increasing on (0, 0.05] eps0", float(np.all(np.diff(th.heat_capacity(tm, low)) > 0)), 1.0, 0.0))
    rows.append(ReportRow.check("c_V(100 eps0) -> 27/37 (rel)", rel(th.heat_capacity(tm, 100.0), 27 / 37), 0.0, 0.01))
    rows.append(ReportRow.check("high-T c_V / classical 3/2 (frozen dof)", (27 / 37) / 1.5, 0.5, 0.05))
    fam = th.family_constants(lambda x: math.sqrt(x) * math.exp(-x / 2))
    rows.append(ReportRow.check("canonical N=3 family: d = 2/3", fam.d, 2 / 3, 1e-9 * 2 / 3))
    rows.append(ReportRow.check("canonical N=3 family: E/theta = 3/2", float(fam.mean_energy(1.0)), 1.5, 1.5e-9))
    return rows


def run_suite(name: str, seed: int = DEFAULT_SEED, n_mc: int = 1_000_000) -> list[ReportRow]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", th.EquipartitionWarning)
        if name == "all":
            return [r for s in SUITES[1:] for r in run_suite(s, seed, n_mc)]
        if name == "fluctuations":
            return suite_fluctuations(seed, n_mc)
        return {
            "bessel": suite_bessel,
            "kinematics": suite_kinematics,
            "moments": suite_moments,
            "thermo": suite_thermo,
        }[name](seed)
