"""Tests for the K0/K1 evaluators against the quadrature oracle."""

import numpy as np
import pytest

from diskflow import bessel
from oracles import bessel_k_quadrature, bessel_kp_quadrature

# frozen from the quadrature oracle (tests/oracles.py), run ahead of the build
K0_AT_1 = 0.4210244382407083


def test_k0_at_1_matches_quadrature_oracle():
    e = bessel.eval_k(0, 1.0)
    assert abs(e.value - K0_AT_1) < 1e-10 * K0_AT_1
    live = bessel_k_quadrature(0, 1.0)
    assert abs(e.value - live) < 1e-10 * live


@pytest.mark.parametrize("order", [0, 1])
def test_values_and_derivatives_vs_oracle(order):
    xs = np.logspace(-4, 2, 61)
    for x in xs:
        e = bessel.eval_k(order, x)
        ref = bessel_k_quadrature(order, x)
        refp = bessel_kp_quadrature(order, x)
        assert abs(e.value - ref) < 1e-10 * abs(ref)
        assert abs(e.derivative - refp) < 1e-10 * abs(refp)


def test_small_argument_k0_log_asymptotic():
    # K0 ~ -ln(x) as x -> 0+, ratio drifting to 1 like ln(2)/|ln x|
    r12 = bessel.eval_k(0, 1e-12).value / -np.log(1e-12)
    r6 = bessel.eval_k(0, 1e-6).value / -np.log(1e-6)
    assert abs(r12 - 1.0) < 5e-3
    assert abs(r12 - 1.0) < abs(r6 - 1.0)


def test_small_argument_k1_inverse_asymptotic():
    for x in [1e-8, 1e-6, 1e-4]:
        assert abs(bessel.eval_k(1, x).value * x - 1.0) < 1e-7


def test_positivity_and_negative_derivative():
    for x in np.logspace(-6, 2.8, 40):
        for order in (0, 1):
            e = bessel.eval_k(order, x)
            assert e.value > 0.0
            assert e.derivative < 0.0


@pytest.mark.parametrize("order", [0, 1])
def test_strict_monotonicity(order):
    xs = np.logspace(-5, 2.8, 400)
    vals, _ = bessel.k_value(order, xs)
    assert np.all(np.diff(vals) < 0.0)


def test_wronskian_identity_k0p_is_minus_k1():
    xs = np.logspace(np.log10(0.01), 2, 300)
    _, k0p = bessel.k_value(0, xs)
    k1, _ = bessel.k_value(1, xs)
    assert np.max(np.abs((k0p + k1) / k1)) < 1e-9


def test_k1p_recurrence_identity():
    xs = np.logspace(-2, 2, 120)
    k0, _ = bessel.k_value(0, xs)
    k1, k1p = bessel.k_value(1, xs)
    rhs = -k0 - k1 / xs
    assert np.max(np.abs((k1p - rhs) / rhs)) < 1e-9


@pytest.mark.parametrize("order", [0, 1])
def test_ode_residuals(order):
    # below x ~ 3 the 5-point FD check hits its own rounding floor
    # (~5 eps / h_rel^2 x^2), so the 1e-8 window starts there
    for x in np.logspace(np.log10(3.0), 2, 25):
        assert bessel.ode_residual(order, x, h_rel=1e-4) < 1e-8


@pytest.mark.parametrize("order", [0, 1])
def test_ode_residual_tight_in_safe_window(order):
    for x in np.linspace(5.0, 100.0, 12):
        assert bessel.ode_residual(order, x, h_rel=1e-4) < 1e-9


def test_asymptotic_ratio():
    assert abs(bessel.asymptotic_ratio(0, 50.0) - 1.0) < 0.01
    assert abs(bessel.asymptotic_ratio(1, 50.0) - 1.0) < 0.02
    # definitional limit: ratio -> 1
    drift = [abs(bessel.asymptotic_ratio(0, x) - 1.0) for x in (10.0, 100.0, 1000.0)]
    assert drift[2] < drift[1] < drift[0]
    assert drift[2] < 1.3e-4  # leading correction is 1/(8x)


def test_asymptotic_ratio_vs_oracle():
    for order, tol in ((0, 0.01), (1, 0.02)):
        ref = bessel_k_quadrature(order, 50.0) / (
            np.sqrt(np.pi / 100.0) * np.exp(-50.0)
        )
        got = bessel.asymptotic_ratio(order, 50.0)
        assert abs(got - ref) < 1e-10
        assert abs(got - 1.0) < tol


def test_scaled_representation_past_threshold():
    e = bessel.eval_k(0, 720.0)
    assert e.scaled
    # compare against the leading asymptotic form, valid to ~1e-3 here
    lead = np.sqrt(np.pi / (2 * 720.0))
    assert abs(e.value - lead) / lead < 1e-3
    assert not bessel.eval_k(0, 650.0).scaled


def test_domain_errors():
    with pytest.raises(bessel.BesselDomainError):
        bessel.eval_k(0, 0.0)
    with pytest.raises(bessel.BesselDomainError):
        bessel.eval_k(1, -3.0)
    with pytest.raises(bessel.BesselDomainError):
        bessel.eval_k(2, 1.0)
    with pytest.raises(bessel.BesselDomainError):
        bessel.asymptotic_ratio(0, 4.0)


def test_regression_table_round_trip(tmp_path):
    from oracles import write_bessel_table

    path = tmp_path / "bessel_table.csv"
    xs = np.logspace(-2, 1, 7)
    write_bessel_table(path, xs)
    rows = np.genfromtxt(path, delimiter=",", names=True)
    k0, _ = bessel.k_value(0, rows["x"])
    assert np.max(np.abs((rows["K0"] - k0) / k0)) < 1e-10
