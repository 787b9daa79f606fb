from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bose_lhy.potentials import FAMILIES, RadialFunction, RadialPotential, scale_to_range
from bose_lhy.scattering import (
    ScatteringError,
    a2_fourier,
    born_convergence_study,
    born_terms,
    newton_potential,
    scattering_length_ode,
    scattering_length_phase,
    self_interaction,
    uniform_ball_scattering_length,
)


def test_uniform_ball_oracle():
    v = RadialPotential("uniform-ball", 2.0, 1.0)
    assert scattering_length_ode(v).a == pytest.approx(1.0 - math.tanh(1.0), abs=1e-8)
    assert uniform_ball_scattering_length(2.0, 1.0) == pytest.approx(1.0 - math.tanh(1.0), abs=1e-15)


def test_uniform_ball_born_terms():
    # a1 = V0 R^3 / 6, a2 = -V0^2 R^5 / 30 (series of R(1 - tanh(x)/x), x^2 = V0 R^2 / 2)
    v = RadialPotential("uniform-ball", 2.0, 1.0)
    t = born_terms(v, 2).born_terms
    assert t[0] == pytest.approx(1 / 3, abs=1e-10)
    assert t[1] == pytest.approx(-2 / 15, abs=1e-6)
    assert a2_fourier(v) == pytest.approx(-2 / 15, abs=1e-6)


def test_hard_wall_limit():
    # V0 -> infinity approaches the hard-sphere value R0
    v = RadialPotential("uniform-ball", 1e6, 1.0)
    assert scattering_length_ode(v).a == pytest.approx(uniform_ball_scattering_length(1e6, 1.0), abs=1e-8)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(FAMILIES), st.floats(0.05, 20.0), st.floats(0.3, 3.0))
def test_ode_agrees_with_variable_phase(family, amp, R):
    v = RadialPotential(family, amp, R)
    assert scattering_length_ode(v).a == pytest.approx(scattering_length_phase(v), rel=1e-7, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(FAMILIES), st.floats(0.05, 20.0))
def test_scattering_length_bounds(family, amp):
    # 0 < a <= a1 and a < range for repulsive potentials
    v = RadialPotential(family, amp, 1.0)
    a = scattering_length_ode(v).a
    assert 0 < a <= v.integral() / (8 * math.pi) * (1 + 1e-12)
    assert a < v.range


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(FAMILIES), st.floats(0.1, 5.0), st.floats(1.01, 3.0))
def test_monotone_in_amplitude(family, amp, factor):
    a1 = scattering_length_ode(RadialPotential(family, amp, 1.0)).a
    a2 = scattering_length_ode(RadialPotential(family, amp * factor, 1.0)).a
    assert a2 > a1


def test_scale_invariance_of_length_in_units_of_range():
    # v_lambda(r) = lambda^-2 v(r / lambda) has scattering length lambda a
    v = RadialPotential("tent", 3.0, 1.0)
    w = RadialPotential("tent", 3.0 / 4.0, 2.0)
    assert scattering_length_ode(w).a == pytest.approx(2.0 * scattering_length_ode(v).a, rel=1e-9)


def test_zero_potential():
    assert scattering_length_ode(RadialPotential("tent", 0.0, 1.0)).a == 0.0


def test_residual_failure_raises():
    v = RadialPotential("uniform-ball", 2.0, 1.0)
    with pytest.raises(ScatteringError):
        scattering_length_ode(v, tol=1e-30)


def test_newton_potential_of_uniform_ball():
    # potential of a unit-density ball: 2 pi (R^2 - r^2 / 3) inside
    g = RadialFunction.chebyshev(lambda r: np.ones_like(r), 1.0, 32)
    r = np.array([0.0, 0.3, 0.9])
    assert np.allclose(newton_potential(g, r), 2 * math.pi * (1 - r**2 / 3), atol=1e-12)


def test_self_interaction_of_uniform_ball():
    # int int 1/|x-y| over the unit ball = 32 pi^2 / 15
    v = RadialPotential("uniform-ball", 1.0, 1.0)
    assert self_interaction(v) == pytest.approx(32 * math.pi**2 / 15, rel=1e-10)


@pytest.mark.parametrize("family", ["tent", "parabolic", "cos-bump"])
def test_second_born_term_two_routes(family):
    v = RadialPotential(family, 1.0, 1.0)
    assert born_terms(v, 2).born_terms[1] == pytest.approx(a2_fourier(v), rel=1e-7)


@pytest.mark.parametrize("family", ["tent", "cos-bump"])
def test_born_series_sums_to_ode(family):
    v = RadialPotential(family, 1.0, 1.0)
    res = born_terms(v, 12)
    assert not res.diverged
    assert res.born_sum == pytest.approx(scattering_length_ode(v).a, abs=1e-12)


def test_born_divergence_flag_for_strong_potential():
    assert born_terms(RadialPotential("uniform-ball", 200.0, 1.0), 10).diverged


def test_born_remainder_scales_like_inverse_square():
    v1 = RadialPotential("tent", 1.0, 1.0)
    study = born_convergence_study(v1, [4, 8, 16, 32, 64])
    assert -2.3 < study.exponent < -1.7
    assert [r.R for r in study.rows] == [4, 8, 16, 32, 64]


def test_scaled_first_born_term_is_independent_of_R():
    v1 = RadialPotential("parabolic", 2.0, 1.0)
    ref = born_terms(v1, 1).born_terms[0]
    for R in (0.5, 3.0, 10.0):
        assert born_terms(scale_to_range(v1, R), 1).born_terms[0] == pytest.approx(ref, rel=1e-12)
