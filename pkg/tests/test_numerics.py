import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hidden_thermo.numerics import (
    BesselUnderflowWarning,
    ConvergenceError,
    DomainError,
    QuadratureSpec,
    RandomStream,
    bessel_k,
    bessel_k_scaled,
    integrate,
    integrate_tabulated,
    split_stream,
)
from oracles import bessel_k_oracle

# frozen from oracles.bessel_k_oracle (90-digit series / 40-digit integral)
FROZEN_K = [
    (0, 1e-6, 13.93144207362642),
    (0, 0.5, 0.9244190712276659),
    (1, 1.0, 0.6019072301972346),
    (1, 2.0, 0.13986588181652243),
    (2, 2.0, 0.2537597545660559),
    (0, 10.0, 1.778006231616765e-05),
    (2, 19.9, 7.015925221084673e-10),
    (2, 20.1, 5.710408271797847e-10),
    (2, 50.0, 3.547931838858198e-23),
    (2, 1e-3, 1999999.5000009716),
]


@pytest.mark.parametrize("n, x, expected", FROZEN_K)
def test_bessel_frozen_values(n, x, expected):
    assert bessel_k(n, x) == pytest.approx(expected, rel=1e-12)


def test_oracle_agrees_with_mpmath():
    mp = pytest.importorskip("mpmath")
    for n in range(3):
        for x in (1e-5, 0.3, 1.9, 2.1, 19.0, 25.0, 300.0, 700.0):
            assert bessel_k_oracle(n, x) == pytest.approx(float(mp.besselk(n, x)), rel=1e-14)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_bessel_against_oracle_on_grid(n):
    xs = np.geomspace(1e-6, 700, 61)
    xs = np.concatenate([xs, [1.999999, 2.0, 2.000001]])
    for x in xs:
        assert bessel_k(n, x) == pytest.approx(bessel_k_oracle(n, x), rel=1e-12), x


def test_recurrence_residual_dense_grid():
    xs = np.geomspace(1e-6, 700, 10_000)
    k = np.array([[bessel_k(n, x) for n in range(3)] for x in xs])
    resid = np.abs(k[:, 2] - k[:, 0] - 2 * k[:, 1] / xs) / k[:, 2]
    assert resid.max() <= 1e-11


def test_strictly_decreasing():
    xs = np.geomspace(1e-6, 700, 2000)
    for n in range(3):
        k = np.array([bessel_k(n, x) for x in xs])
        assert np.all(np.diff(k) < 0)


def test_small_argument_limit():
    a = 1e-5
    assert bessel_k(2, a) * a * a / 2 == pytest.approx(1.0, rel=1e-4)


def test_scaled_matches_unscaled():
    for x in (0.1, 1.5, 3.0, 80.0):
        for n in range(3):
            assert bessel_k_scaled(n, x) * math.exp(-x) == pytest.approx(bessel_k(n, x), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, math.nan, math.inf, -math.inf])
def test_bessel_domain_errors(x):
    with pytest.raises(DomainError):
        bessel_k(1, x)


@pytest.mark.parametrize("n", [-1, 3, 1.5, True])
def test_bessel_order_restricted(n):
    with pytest.raises(DomainError):
        bessel_k(n, 1.0)


def test_bessel_underflow_signaled():
    with pytest.warns(BesselUnderflowWarning):
        assert bessel_k(0, 710.0) == 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert bessel_k(2, 700.0) > 0


@given(st.floats(1e-6, 700), st.integers(0, 2))
def test_bessel_deterministic(x, n):
    assert bessel_k(n, x) == bessel_k(n, x)


# --- quadrature -----------------------------------------------------------


def test_integrate_exponential():
    val, err = integrate(lambda x: math.exp(-x), 0.0, math.inf)
    assert val == pytest.approx(1.0, abs=1e-10)
    assert err < 1e-9


def test_integrate_polynomial():
    assert integrate(lambda x: x * x, 0.0, 1.0)[0] == pytest.approx(1 / 3, rel=1e-13)


@pytest.mark.parametrize("z", [0.01, 0.1, 1.0, 10.0])
def test_juttner_normalization_identity(z):
    val, _ = integrate(lambda g: g * math.sqrt(g * g - 1) * math.exp(-z * g), 1.0, 1 + 750 / z,
                       points=[1 + c / z for c in (1, 5, 20, 100)])
    assert val == pytest.approx(bessel_k(2, z) / z, rel=1e-10)


def test_integrate_infinite_with_breakpoints():
    val, _ = integrate(lambda x: math.exp(-x), 0.0, math.inf, points=[1.0, 5.0])
    assert val == pytest.approx(1.0, rel=1e-12)


def test_integrate_convergence_failure_carries_estimate():
    with pytest.raises(ConvergenceError) as info:
        integrate(lambda x: math.sin(1 / x) / x, 1e-8, 1.0, QuadratureSpec(rel_tol=1e-12, max_subdivisions=5))
    assert math.isfinite(info.value.value)


def test_integrate_bad_limits():
    with pytest.raises(DomainError):
        integrate(math.exp, 1.0, 0.0)
    with pytest.raises(DomainError):
        integrate(math.exp, -math.inf, 0.0)
    assert integrate(math.exp, 2.0, 2.0) == (0.0, 0.0)


@pytest.mark.parametrize("kw", [dict(rel_tol=0), dict(rel_tol=1.0), dict(abs_tol=0), dict(max_subdivisions=0)])
def test_quadrature_spec_invariants(kw):
    with pytest.raises(DomainError):
        QuadratureSpec(**kw)


def test_integrate_tabulated_simpson():
    x = np.linspace(0, 1, 101)
    assert integrate_tabulated(x, x ** 3) == pytest.approx(0.25, rel=1e-12)
    with pytest.raises(DomainError):
        integrate_tabulated([0, 1], [0, 1])


# --- random streams -------------------------------------------------------


def test_stream_determinism():
    a = RandomStream(7, 3).generator().random(100)
    b = RandomStream(7, 3).generator().random(100)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, RandomStream(7, 4).generator().random(100))


def test_split_deterministic():
    s1 = split_stream(RandomStream(11, 2), 4)
    s2 = split_stream(RandomStream(11, 2), 4)
    assert s1 == s2
    for a, b in zip(s1, s2):
        assert np.array_equal(a.generator().random(50), b.generator().random(50))


def test_split_children_uncorrelated():
    c0, c1 = split_stream(RandomStream(), 2)
    r = np.corrcoef(c0.generator().random(10_000), c1.generator().random(10_000))[0, 1]
    assert abs(r) < 0.05


def test_split_child_differs_from_parent():
    rs = RandomStream(5, 0)
    (child,) = split_stream(rs, 1)
    assert child != rs
    assert not np.array_equal(child.generator().random(20), rs.generator().random(20))


@pytest.mark.parametrize("bad", [-1, 2 ** 64, 1.5, True])
def test_stream_fields_are_u64(bad):
    with pytest.raises(DomainError):
        RandomStream(bad)


@pytest.mark.parametrize("k", [0, -2, 1.5])
def test_split_rejects_bad_k(k):
    with pytest.raises(DomainError):
        split_stream(RandomStream(), k)


@settings(max_examples=25)
@given(st.integers(0, 2 ** 64 - 1), st.integers(0, 2 ** 64 - 1), st.integers(1, 5))
def test_split_is_pure(seed, idx, k):
    assert split_stream(RandomStream(seed, idx), k) == split_stream(RandomStream(seed, idx), k)
