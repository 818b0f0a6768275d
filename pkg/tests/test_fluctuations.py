import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hidden_thermo.fluctuations import (
    DegenerateDistributionError,
    PointMass,
    Tabulated,
    ThermalJuttner,
    conditional_second_moment,
    excess_moments,
    hidden_average,
    kappa_stats,
    monte_carlo_moments,
    sphere_rule,
    thermal_expect,
    thermal_variance_exact,
    thermal_variance_zeroth,
)
from hidden_thermo.juttner import JuttnerDist, mass_moments
from hidden_thermo.kinematics import EnergyConvention
from hidden_thermo.numerics import DomainError, RandomStream
from oracles import nested_energy_moment


def test_conditional_second_moment_vanishes_at_rest():
    assert conditional_second_moment(JuttnerDist(1.0), 1.0) == 0.0


@pytest.mark.parametrize("alpha", [0.01, 0.1, 1.0])
@pytest.mark.parametrize("gT", [1.5, 2.0, 5.0])
def test_conditional_second_moment_vs_nested_quadrature(alpha, gT):
    assert conditional_second_moment(JuttnerDist(alpha), gT) == pytest.approx(
        nested_energy_moment(alpha, gT, 2), rel=1e-6)


def test_conditional_second_moment_quadratic_structure():
    d = JuttnerDist(0.5)
    m2 = mass_moments(d).mean_mass_sq
    f = [conditional_second_moment(d, g) for g in (2.0, 3.0, 4.0)]
    assert f[2] - 2 * f[1] + f[0] == pytest.approx(2 * (4 * m2 - 1) / 3, rel=1e-12)


def test_bare_rest_fails_the_second_moment_display():
    alpha, gT = 0.1, 2.0
    bare = nested_energy_moment(alpha, gT, 2, EnergyConvention.BARE_REST)
    hidden = conditional_second_moment(JuttnerDist(alpha), gT)
    m = mass_moments(JuttnerDist(alpha)).mean_mass
    assert abs(bare - hidden) / hidden > 0.1
    # the BareRest mean sits (m - 1) above the HiddenRest mean
    mean_bare = nested_energy_moment(alpha, gT, 1, EnergyConvention.BARE_REST)
    assert mean_bare - m * (gT - 1) == pytest.approx(m - 1, rel=1e-8)


# --- kappa ----------------------------------------------------------------


def test_kappa_point_mass():
    assert kappa_stats(PointMass(2.0)).kappa == 0.0


def test_kappa_ultrarelativistic_juttner():
    assert kappa_stats(ThermalJuttner(1e-3)).kappa == pytest.approx(1 / 3, abs=1e-3)


def test_kappa_tabulated_arithmetic():
    ks = kappa_stats(Tabulated((2.0, 4.0), (1.0, 1.0)))
    assert (ks.x1, ks.x2, ks.kappa) == (2.0, 5.0, 0.25)


def test_kappa_degenerate():
    with pytest.raises(DegenerateDistributionError):
        kappa_stats(PointMass(1.0))


@pytest.mark.parametrize("alpha_T", np.geomspace(1e-3, 100, 25))
def test_kappa_juttner_closed_form_vs_quadrature(alpha_T):
    td = ThermalJuttner(alpha_T)
    x1, x2 = excess_moments(td)
    q1 = thermal_expect(td, lambda g: g - 1)
    q2 = thermal_expect(td, lambda g: (g - 1) ** 2)
    assert x1 == pytest.approx(q1, rel=1e-9)
    assert x2 == pytest.approx(q2, rel=1e-8)
    assert kappa_stats(td).kappa_in_unit_interval


def test_heavy_tail_leaves_unit_interval():
    ks = kappa_stats(Tabulated((1.01, 1000.0), (0.999, 0.001)))
    assert ks.kappa > 1
    assert not ks.kappa_in_unit_interval


@settings(max_examples=100)
@given(st.lists(st.tuples(st.floats(1.0, 1e4), st.floats(1e-3, 1.0)), min_size=1, max_size=8))
def test_kappa_nonnegative(nodes):
    g, w = zip(*nodes)
    td = Tabulated(g, w)
    if excess_moments(td)[0] <= 0:
        return
    assert kappa_stats(td).kappa >= -1e-12


@pytest.mark.parametrize("bad", [dict(gammas=(0.5,), weights=(1,)), dict(gammas=(2,), weights=(0,)),
                                 dict(gammas=(), weights=()), dict(gammas=(2, 3), weights=(1,))])
def test_tabulated_validation(bad):
    with pytest.raises(DomainError):
        Tabulated(**bad)


def test_thermal_dist_validation():
    with pytest.raises(DomainError):
        ThermalJuttner(-1.0)
    with pytest.raises(DomainError):
        PointMass(0.5)


# --- thermal variance -----------------------------------------------------


def test_variance_zero_without_drift():
    assert thermal_variance_exact(JuttnerDist(0.1), PointMass(1.0)) == 0.0


@pytest.mark.parametrize("alpha", [0.01, 0.1, 1.0])
@pytest.mark.parametrize("td", [PointMass(2.0), ThermalJuttner(0.01), ThermalJuttner(1.0)])
def test_variance_identity(alpha, td):
    d = JuttnerDist(alpha)
    m = mass_moments(d).mean_mass
    x1, _ = excess_moments(td)
    ref = thermal_expect(td, lambda g: conditional_second_moment(d, g)) - (m * x1) ** 2
    exact = thermal_variance_exact(d, td)
    assert exact == pytest.approx(ref, rel=1e-10)
    assert exact >= 0


def test_zeroth_order_examples():
    assert thermal_variance_zeroth(0.0, 1.0, 1.0) == pytest.approx(5 / 3, rel=1e-15)
    assert thermal_variance_zeroth(0.3, 0.0, 2.0) == 0.0
    with pytest.raises(DomainError):
        thermal_variance_zeroth(-0.1, 1.0, 1.0)


def _zeroth_gap(alpha, td):
    d = JuttnerDist(alpha)
    ks = kappa_stats(td)
    m = mass_moments(d).mean_mass
    exact = thermal_variance_exact(d, td)
    return abs(thermal_variance_zeroth(ks.kappa, m * ks.x1, m) - exact) / exact


def test_zeroth_order_close_at_small_alpha():
    assert _zeroth_gap(1e-3, ThermalJuttner(0.01)) <= 5e-3


@pytest.mark.parametrize("td", [PointMass(2.0), ThermalJuttner(0.01), ThermalJuttner(1.0)])
def test_zeroth_order_converges(td):
    gaps = [_zeroth_gap(a, td) for a in (1e-1, 1e-2, 1e-3)]
    # at least linear: a tenfold smaller alpha shrinks the gap at least tenfold
    assert gaps[1] <= 0.1 * gaps[0] * 1.05
    assert gaps[2] <= 0.1 * gaps[1] * 1.05


# --- direction rule and hidden average ------------------------------------


def test_sphere_rule_moments():
    dirs, w = sphere_rule()
    assert w.sum() == pytest.approx(1.0, rel=1e-14)
    assert np.allclose(w @ dirs, 0, atol=1e-15)
    assert np.allclose((dirs * w[:, None]).T @ dirs, np.eye(3) / 3, atol=1e-15)


def test_hidden_average_of_speed_squared():
    d = JuttnerDist(1.0)
    mm = mass_moments(d)
    # <gamma^2 beta^2> = <gamma^2> - 1
    val = hidden_average(d, lambda b: np.sum(b * b, axis=1) / (1 - np.sum(b * b, axis=1)))
    assert val == pytest.approx(mm.mean_mass_sq - 1, rel=1e-9)


# --- Monte Carlo ----------------------------------------------------------


def test_mc_point_mass_at_rest_is_exactly_zero():
    est = monte_carlo_moments(JuttnerDist(0.3), PointMass(1.0), RandomStream(), 5000)
    assert est.mean == 0.0 and est.variance == 0.0 and est.se_variance == 0.0


def test_mc_rejects_small_n():
    with pytest.raises(DomainError):
        monte_carlo_moments(JuttnerDist(0.3), PointMass(2.0), RandomStream(), 999)


def test_mc_chunking_invariance():
    args = (JuttnerDist(0.2), ThermalJuttner(0.5), RandomStream(9, 4), 150_000)
    a = monte_carlo_moments(*args, chunks=1)
    assert a == monte_carlo_moments(*args, chunks=3)
    assert a == monte_carlo_moments(*args, chunks=8)


def test_mc_fields_consistent():
    est = monte_carlo_moments(JuttnerDist(0.2), Tabulated((1.5, 3.0), (2, 1)), RandomStream(2), 50_000)
    assert est.variance == pytest.approx(est.second_moment - est.mean ** 2, rel=1e-9)
    assert est.n == 50_000 and est.seed == 2


def test_mc_tabulated_gate():
    d, td = JuttnerDist(0.2), Tabulated((1.5, 3.0), (2, 1))
    est = monte_carlo_moments(d, td, RandomStream(5), 200_000)
    m = mass_moments(d).mean_mass
    assert abs(est.mean - m * excess_moments(td)[0]) <= 5 * est.se_mean
    assert abs(est.variance - thermal_variance_exact(d, td)) <= 5 * est.se_variance


def test_mc_juttner_gate():
    d, td = JuttnerDist(0.1), ThermalJuttner(0.01)
    est = monte_carlo_moments(d, td, RandomStream(), 10 ** 6)
    m = mass_moments(d).mean_mass
    assert abs(est.variance - thermal_variance_exact(d, td)) <= 5 * est.se_variance
    assert abs(est.mean - m * excess_moments(td)[0]) <= 5 * est.se_mean
