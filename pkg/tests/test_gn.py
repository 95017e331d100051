"""Tests for the Gagliardo-Nirenberg constant and ratio harness."""

import numpy as np
import pytest

from diskflow import gn
from oracles import gamma_highprec, gn_constant_highprec

# pinned after computation with the 50-digit Gamma oracle (tests/oracles.py)
A_AT_P4 = 0.8238437636718856


def test_lgamma_against_highprec():
    for x in np.concatenate([
        np.linspace(0.5, 5.0, 20),
        np.logspace(1, 4, 20),
        [1.0, 2.0, 3.0],
    ]):
        ref = gamma_highprec(x)
        assert abs(gn.lgamma(float(x)) - ref) <= 1e-13 * max(1.0, abs(ref))


def test_lgamma_small_argument_recurrence():
    for x in (0.01, 0.1, 0.3, 0.49):
        ref = gamma_highprec(x)
        assert abs(gn.lgamma(x) - ref) <= 1e-13 * max(1.0, abs(ref))


def test_constant_pinned_value_p4():
    c = gn.gn_constant(2.0, 2)  # q = p/2 with p = 4
    assert abs(c.value - A_AT_P4) < 1e-13
    assert abs(c.value - gn_constant_highprec(2.0)) < 1e-12


def test_two_forms_agree_on_random_q():
    rng = np.random.default_rng(2024)
    qs = 1.0 + 49.0 * rng.random(1000)
    for q in qs:
        c = gn.gn_constant(float(q), 2)
        assert abs(c.value - c.product_form) <= 1e-12 * c.product_form


def test_theta_is_half_minus_one_over_p():
    for p in (2.5, 4.0, 10.0, 1e3):
        c = gn.gn_constant(p / 2.0, 2)
        assert abs(c.theta - (0.5 - 1.0 / p)) < 1e-14
        assert c.y > 1.0
        assert abs(c.y - (p + 2.0) / (p - 2.0)) < 1e-12 * c.y


def test_quarter_power_growth():
    ps = np.logspace(np.log10(2.1), 6, 60)
    ratios = [gn.gn_constant_product(p) / p**0.25 for p in ps]
    assert max(ratios) < 1.0  # C exists; modest here
    assert min(ratios) > 0.0


def test_domain_errors():
    with pytest.raises(gn.GnDomainError):
        gn.gn_constant(1.0, 2)
    with pytest.raises(gn.GnDomainError):
        gn.gn_constant(0.5, 2)
    with pytest.raises(gn.GnDomainError):
        gn.gn_constant(4.0, 3)  # q > d/(d-2) = 3
    # allowed d >= 3 case evaluates
    c = gn.gn_constant(2.0, 3)
    assert np.isfinite(c.value) and c.value > 0.0


def _gaussian_field(n=256, half_width=8.0):
    ax = np.linspace(-half_width, half_width, n)
    xx, yy = np.meshgrid(ax, ax)
    return gn.GridField2D(
        values=np.exp(-(xx**2 + yy**2) / 2.0), h=float(ax[1] - ax[0])
    )


def test_gaussian_norms_match_closed_forms():
    u = _gaussian_field()
    for p in (2.0, 3.0, 4.0):
        exact = (2.0 * np.pi / p) ** (1.0 / p)
        assert abs(u.lp_norm(p) - exact) < 2e-3 * exact
    assert abs(u.grad_l2_norm() - np.sqrt(np.pi)) < 2e-3 * np.sqrt(np.pi)


def test_gaussian_ratio_finite():
    u = _gaussian_field()
    for p in (2.0, 4.0, 8.0):
        rho = gn.gn_ratio(u, p)
        assert 0.0 < rho < 1.0


def test_scale_invariance_exact():
    u = _gaussian_field(n=128)
    rho = gn.gn_ratio(u, 4.0)
    for lam in (0.5, 2.0, 10.0):
        rho_l = gn.gn_ratio(u.rescaled(lam), 4.0)
        assert abs(rho_l - rho) < 1e-10 * rho


def test_degenerate_field_signaled():
    z = gn.GridField2D(values=np.zeros((16, 16)), h=0.1)
    with pytest.raises(gn.DegenerateFieldError):
        gn.gn_ratio(z, 4.0)
    c = gn.GridField2D(values=np.ones((16, 16)), h=0.1)
    with pytest.raises(gn.DegenerateFieldError):
        gn.gn_ratio(c, 4.0)


def test_corpus_max_stable_under_doubling():
    corpus1 = gn.random_h1_corpus(100, seed=5)
    corpus2 = gn.random_h1_corpus(200, seed=5)
    for p in (2.0, 4.0, 16.0):
        m1 = max(gn.gn_ratio(u, p) for u in corpus1)
        m2 = max(gn.gn_ratio(u, p) for u in corpus2)
        assert m2 >= m1 - 1e-12
        assert m2 <= 1.5 * m1  # stable: no blow-up when the corpus doubles


def test_interpolation_identity_on_corpus():
    # ||u||_{q+1} <= ||u||_2^{2/(p+2)} ||u||_p^{p/(p+2)} with q = p/2
    corpus = gn.random_h1_corpus(30, seed=9)
    for p in (4.0, 6.0):
        q1 = p / 2.0 + 1.0
        for u in corpus:
            lhs = u.lp_norm(q1)
            rhs = u.lp_norm(2.0) ** (2.0 / (p + 2.0)) * u.lp_norm(p) ** (p / (p + 2.0))
            assert lhs <= rhs * (1.0 + 1e-12)


def test_log_optimized_p():
    assert gn.log_optimized_p(0.0, 0.0) == 2.0
    assert abs(gn.log_optimized_p(np.e - 1.0, 0.0) - 3.0) < 1e-14
