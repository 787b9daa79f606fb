from __future__ import annotations

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from bose_lhy.bogolubov import (
    LHY_COEFFICIENT,
    LHY_INTEGRAL,
    TauParams,
    bogolubov_lower_bound,
    coefficients,
    e0_lower,
    h0_gap_integrand,
    lhy_consistency,
    lhy_dimensionless_integral,
    lhy_energy,
    lhy_integrand,
    neumann_gaps,
    sigma_correction,
    sqrt_bounds,
    tau_B,
    validity_constant,
    z_penalty,
)

BIG = TauParams("big", 0.1, 0.2, 0.5, 0.25, 10.0)
SMALL = TauParams("small", 0.1, 0.2, 0.5, 0.25, 10.0)


def test_lhy_integral_value_and_speed():
    t0 = time.perf_counter()
    I = lhy_dimensionless_integral()
    assert time.perf_counter() - t0 < 1.0
    assert abs(I - 32 * math.pi * math.sqrt(2) / 15) < 1e-6


def test_lhy_integral_against_naive_quadrature():
    # independent route: direct form on [0, 50] plus the k^-2/8 asymptotic tail
    f = lambda k: (-k * k - 1 + k * k * math.sqrt(1 + 2 / (k * k)) + 1 / (2 * k * k)) * k * k  # noqa: E731
    head = integrate.quad(f, 1e-12, 50, limit=400, epsabs=1e-12)[0]
    tail = 1 / (2 * 50) - 5 / (24 * 50**3)  # int_50^inf (k^-2/2 - 5 k^-4/8) dk
    assert 4 * math.pi * (head + tail) == pytest.approx(LHY_INTEGRAL, abs=1e-6)


def test_lhy_integrand_is_stable():
    k = np.array([1e-8, 1e-3, 1.0, 1e3, 1e8])
    vals = lhy_integrand(k)
    assert np.all(np.isfinite(vals))
    assert vals[0] == pytest.approx(0.5, abs=1e-7)
    assert vals[-1] == pytest.approx(1 / (2 * 1e16), rel=1e-6)
    assert vals[2] == pytest.approx(-2 + math.sqrt(3) + 0.5, rel=1e-14)


def test_coefficient_identity():
    lhs, rhs = lhy_consistency()
    assert lhs / rhs - 1 == pytest.approx(0.0, abs=1e-9)
    assert rhs == pytest.approx(512 * math.sqrt(math.pi) / 15, rel=1e-15)
    assert LHY_COEFFICIENT == pytest.approx(128 / (15 * math.sqrt(math.pi)), rel=1e-15)
    assert abs(LHY_COEFFICIENT - 4.8144148) < 5e-6


def test_energy_expansions():
    assert lhy_energy(0.0, 1.0) == 0.0
    e = lhy_energy(1e-6, 1.0)
    assert e == pytest.approx(4 * math.pi * 1e-12 * (1 + LHY_COEFFICIENT * 1e-3))
    assert e0_lower(1e-6, 1.0, 1.0) == pytest.approx(e)
    with pytest.raises(ValueError):
        lhy_energy(-1.0, 1.0)


def test_lower_bound_examples():
    assert bogolubov_lower_bound(2.0, 1.0) == pytest.approx(-(2 - math.sqrt(3)), abs=1e-12)
    assert bogolubov_lower_bound(1.0, 1.0, 1.0) == pytest.approx(-2.0, abs=1e-12)
    assert bogolubov_lower_bound(1.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        bogolubov_lower_bound(1.0, 2.0)
    with pytest.raises(ValueError):
        bogolubov_lower_bound(1.0, -1.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1e6), st.floats(-0.999999, 1.0), st.complex_numbers(max_magnitude=100))
def test_lower_bound_matches_naive_formula(A, ratio, kappa):
    B = ratio * A
    got = bogolubov_lower_bound(A, B, kappa)
    naive = -(A - math.sqrt(A * A - B * B)) - 2 * abs(kappa) ** 2 / (A + B)
    assert got <= 0
    assert got == pytest.approx(naive, rel=1e-9, abs=1e-9 * A)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 10), st.floats(0, 0.999))
def test_lower_bound_monotone_in_B(A, r):
    assert bogolubov_lower_bound(A, r * A) >= bogolubov_lower_bound(A, min(1.0, r + 1e-3) * A)


def test_tau_profiles():
    k = np.array([0.0, 0.05, 0.5, 1.0, 3.0])
    big = tau_B(k, BIG)
    ref = 0.9 * (0.8 * np.clip(k - 0.5 / 5, 0, None) ** 2 + 0.2 * np.clip(k - 0.5 / 1.25, 0, None) ** 2)
    assert np.allclose(big, ref)
    small = tau_B(k, SMALL)
    assert np.allclose(small, 0.9 * np.clip(k - 1 / 1.25, 0, None) ** 2)
    assert isinstance(tau_B(0.3, BIG), float)
    assert tau_B(0.0, BIG) == 0.0


@pytest.mark.parametrize("bad", [
    dict(kind="x"), dict(eps0=0.6), dict(eps_T=0.0), dict(s=1.0), dict(d=0.0), dict(ell=-1.0),
])
def test_tau_params_validation(bad):
    base = dict(kind="big", eps0=0.1, eps_T=0.2, s=0.5, d=0.25, ell=10.0)
    base.update(bad)
    with pytest.raises(ValueError):
        TauParams(**base)


def test_neumann_gaps():
    g = neumann_gaps(0.2, 0.25, 10.0)
    assert g["small"] == pytest.approx(0.2 / (1 + math.pi**-2) / 2.5**2)
    assert g["big"] == pytest.approx(0.01)


def test_coefficients_and_validity():
    c = coefficients([1.0, 0.0, 0.0], 10, 100.0, 0.1, 2.0, 0.5, 1.0, BIG)
    assert c.B == pytest.approx(0.02)
    assert c.A == pytest.approx(tau_B(1.0, BIG) / 10 + 0.02)
    assert c.kappa == pytest.approx(0.0)
    assert c.valid and c.algebraic_ok()
    neg = coefficients(1.0, 10**6, 100.0, 0.1, -50.0, 0.5, 1.0, BIG)
    assert not neg.valid


def test_validity_constant_measures_the_criterion():
    W = lambda k: np.sin(k) / (k + 1.0)  # noqa: E731  # changes sign
    R, a = 1.0, 0.5
    c = validity_constant(W, BIG, R, a)
    assert 0 < c < math.inf
    # n/|B| at the measured c makes A >= |B| on the scan
    k = np.geomspace(1 / R, 200 / R, 4000)
    density = c / (a * R**2)
    A_minus_absB = tau_B(k, BIG) / density + W(k) - np.abs(W(k))
    assert np.all(A_minus_absB >= -1e-12)
    assert validity_constant(lambda k: 1.0 / (1 + k * k), BIG, R, a) == math.inf


def test_h0_integrand_matches_lower_bound_with_kappa_zero():
    tau = tau_B(2.0, BIG)
    n, vol, W = 7, 50.0, 3.0
    A, B = tau / n + W / vol, W / vol
    val = h0_gap_integrand([2.0, 0, 0], n, 5.0, vol, W, BIG)
    assert val == pytest.approx(-(A - math.sqrt(A * A - B * B)) * 5.0, rel=1e-10)


def test_sigma_and_z_penalty():
    main, rem = sigma_correction(12.0, 0.1, 100.0, 2.0, 0.5, 0.1, 1.0, 10.0, 3)
    assert main == pytest.approx(-(4.0 * 0.25 * 2.0) / 1e4)
    assert rem == pytest.approx(0.1 * 4.0 * 1e-6 / 100.0)
    assert z_penalty(3.0, 0.1, 2.0, 1000.0, 4.0) == pytest.approx(3 * 0.1 * 1e-3 * 4)


def test_sqrt_bounds():
    rep = sqrt_bounds(np.linspace(0, 50, 2001))
    assert rep["upper"] and rep["lower_eighth"]
    assert rep["measured_C"] <= 1 / 8 + 1e-15
