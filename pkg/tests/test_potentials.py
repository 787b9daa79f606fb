from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from bose_lhy.potentials import (
    FAMILIES,
    RadialFunction,
    RadialPotential,
    fourier_radial,
    fourier_radial_grid,
    parse_potential,
    positivity_window_check,
    radial_integral,
    scale_to_range,
    zero_potential,
)

families = st.sampled_from(FAMILIES)
amplitudes = st.floats(0.1, 10.0)
ranges = st.floats(0.2, 5.0)


def ball_hat(V0, R0, k):
    # 4 pi V0 (sin kR - kR cos kR) / k^3
    x = k * R0
    return 4.0 * math.pi * V0 * (math.sin(x) - x * math.cos(x)) / k**3


@pytest.mark.parametrize("family", FAMILIES)
def test_closed_form_integral_matches_quadrature(family):
    v = RadialPotential(family, 2.5, 1.7)
    assert v.integral() == pytest.approx(radial_integral(v), rel=1e-10)


@pytest.mark.parametrize("family", FAMILIES)
def test_transform_at_zero_is_integral(family):
    v = RadialPotential(family, 1.3, 0.8)
    assert abs(fourier_radial(v, 0.0) - v.integral()) < 1e-9


def test_uniform_ball_transform_closed_form():
    v = RadialPotential("uniform-ball", 2.0, 1.0)
    for k in (0.3, 1.0, 4.5, 17.0, 60.0):
        assert fourier_radial(v, k) == pytest.approx(ball_hat(2.0, 1.0, k), abs=1e-9)


def test_tent_transform_against_direct_quadrature():
    # independent route: plain quad of r sin(kr) v(r) without the sine weight
    v = RadialPotential("tent", 1.0, 1.0)
    for k in (0.5, 3.0, 12.0):
        ref = 4 * math.pi / k * integrate.quad(lambda r: r * math.sin(k * r) * (1 - r), 0, 1, epsabs=1e-13)[0]
        assert fourier_radial(v, k) == pytest.approx(ref, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(families, amplitudes, st.sampled_from([0.3, 1.0, 5.0]), st.floats(0.0, 30.0))
def test_scaling_covariance(family, amp, R, k):
    v1 = RadialPotential(family, amp, 1.0)
    vR = scale_to_range(v1, R)
    assert abs(fourier_radial(vR, k / R) - fourier_radial(v1, k)) < 1e-9


@settings(max_examples=25, deadline=None)
@given(families, amplitudes, ranges)
def test_transform_bounded_by_value_at_zero(family, amp, R):
    v = RadialPotential(family, amp, R)
    k = np.linspace(0.0, 50.0 / R, 400)
    vals = fourier_radial_grid(v, k)
    assert np.all(np.abs(vals) <= vals[0] * (1 + 1e-12))


@pytest.mark.parametrize("family", FAMILIES)
def test_grid_transform_agrees_with_adaptive(family):
    v = RadialPotential(family, 1.0, 1.0)
    k = np.array([0.0, 0.7, 3.3, 11.0, 29.0])
    grid = fourier_radial_grid(v, k)
    ref = np.array([fourier_radial(v, float(x)) for x in k])
    assert np.max(np.abs(grid - ref)) < 1e-9


def test_parse_inline_dict_and_file(tmp_path):
    v = parse_potential("uniform-ball:2,1")
    assert (v.family, v.amplitude, v.range) == ("uniform-ball", 2.0, 1.0)
    assert parse_potential("tent:3").range == 1.0
    cfg = {"family": "cos-bump", "params": {"amplitude": 0.5}, "range": 2.0}
    assert parse_potential(cfg) == RadialPotential("cos-bump", 0.5, 2.0)
    path = tmp_path / "v.json"
    path.write_text(json.dumps(cfg))
    assert parse_potential(str(path)) == RadialPotential("cos-bump", 0.5, 2.0)


@pytest.mark.parametrize("spec", ["nope:1,1", "tent:1,2,3", "tent:-1,1", "tent:1,0"])
def test_parse_rejects_bad_specs(spec):
    with pytest.raises(ValueError):
        parse_potential(spec)


def test_zero_potential():
    v = zero_potential()
    assert v.integral() == 0.0
    assert fourier_radial(v, 2.0) == 0.0


def test_support_and_continuity_flags():
    assert not RadialPotential("uniform-ball", 1.0, 1.0).is_continuous
    assert RadialPotential("tent", 1.0, 1.0).is_continuous
    v = RadialPotential("parabolic", 1.0, 2.0)
    assert v(2.5) == 0.0 and v(0.0) == 1.0


def test_tent_positivity_window_and_first_zero():
    v = RadialPotential("tent", 1.0, 1.0)
    rep = positivity_window_check(v)
    assert rep.all_positive
    assert rep.first_sign_change is not None and rep.first_sign_change > 1.0
    assert rep.value_past_sign_change < 0


def test_radial_function_volume_integral_is_exact_for_polynomials():
    f = RadialFunction.chebyshev(lambda r: 1.0 - r**2, 1.0, 32)
    # 4 pi int_0^1 r^2 (1 - r^2) dr = 8 pi / 15
    assert f.volume_integral() == pytest.approx(8 * math.pi / 15, rel=1e-13)
