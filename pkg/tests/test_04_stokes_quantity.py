"""
Stokes quantity A: both evaluations agree, A <= 0, and A = 0 only at f = 0.
"""

import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import rational_lists
from lib.brito_inequality import L_direct
from lib.errors import DegenerateSpectrum, InvalidRange, UnsupportedKind
from lib.sampling import TrialKey, random_rational, spectrum_for_trial
from lib.spectral_core import Spectrum
from lib.stokes_quantity import GradientData, A_via_L, A_via_triple_sum, rigidity_verdict

BASE = Spectrum.exact([0, 1, 2])


@pytest.mark.parametrize("f,expected", [
    ((6, 0, 0), F(-2)),
    ((6, 6, 6), F(-6)),
    ((0, 0, 0), F(0)),
])
def test_A_hand_values(f, expected):
    g = GradientData.for_spectrum(BASE, f)
    assert A_via_L(BASE, g) == expected
    assert A_via_triple_sum(BASE, g) == expected


def test_verdict_nonzero_gradient():
    verdict = rigidity_verdict(BASE, GradientData.for_spectrum(BASE, (6, 0, 0)))
    assert verdict.A == F(-2)
    assert not verdict.is_rigid
    assert not verdict.f_is_zero


def test_verdict_zero_gradient():
    verdict = rigidity_verdict(BASE, GradientData.for_spectrum(BASE, (0, 0, 0)))
    assert verdict.A == 0
    assert verdict.is_rigid
    assert verdict.forced_f_zero
    assert verdict.f_is_zero


def test_gradient_validation():
    with pytest.raises(InvalidRange):
        GradientData.for_spectrum(BASE, (1, 2))
    with pytest.raises(UnsupportedKind):
        GradientData.for_spectrum(BASE, (0.5, 0, 0))
    with pytest.raises(DegenerateSpectrum):
        A_via_L(Spectrum.exact([0, 1]), GradientData.for_spectrum(Spectrum.exact([0, 1]), (1, 1)))


def test_gradient_scaling_is_quadratic():
    g = GradientData.for_spectrum(BASE, (1, F(1, 2), -3))
    assert A_via_L(BASE, g.scaled(3)) == 9 * A_via_L(BASE, g)


def test_float_kind():
    s = BASE.to_float()
    g = GradientData.for_spectrum(s, (6.0, 0.0, 0.0))
    assert A_via_L(s, g) == pytest.approx(-2.0)
    assert A_via_triple_sum(s, g) == pytest.approx(-2.0)
    assert not rigidity_verdict(s, g).is_rigid


def test_to_dict():
    payload = rigidity_verdict(BASE, GradientData.for_spectrum(BASE, (6, 6, 6))).to_dict()
    assert payload == {"A": F(-6), "is_rigid": False, "forced_f_zero": False, "f_is_zero": False}


@st.composite
def spectrum_and_gradient(draw):
    values = draw(rational_lists(min_size=3, max_size=6))
    f = draw(st.lists(
        st.fractions(min_value=-10, max_value=10, max_denominator=10),
        min_size=len(values), max_size=len(values),
    ))
    s = Spectrum.exact(values)
    return s, GradientData.for_spectrum(s, f)


@settings(max_examples=80, deadline=None)
@given(spectrum_and_gradient())
def test_A_paths_agree_and_never_positive(case):
    s, g = case
    a = A_via_L(s, g)
    assert a == A_via_triple_sum(s, g)
    assert a <= 0
    assert (a == 0) == g.is_zero
    assert rigidity_verdict(s, g).is_rigid == g.is_zero


@settings(max_examples=40, deadline=None)
@given(rational_lists(min_size=3, max_size=6), st.integers(1, 9))
def test_each_basis_direction_is_strictly_negative(values, scale):
    s = Spectrum.exact(values)
    for r in range(s.n):
        f = [0] * s.n
        f[r] = scale
        a = A_via_L(s, GradientData.for_spectrum(s, f))
        assert a < 0
        assert a == A_via_triple_sum(s, GradientData.for_spectrum(s, f))


def test_factorial_weight():
    # n = 4: (n-3)!/n^2 = 1/16, so A = L(1) f_1^2 / 16
    s = Spectrum.exact([0, 1, 2, 3])
    g = GradientData.for_spectrum(s, (4, 0, 0, 0))
    assert A_via_L(s, g) == L_direct(s, 1) * 16 * math.factorial(1) / 16


@pytest.mark.parametrize("n", [7, 8])
def test_seeded_sweep_large_n(n):
    for trial in range(4):
        key = TrialKey(seed=13, n=n, trial=trial)
        s = spectrum_for_trial(key, bound=50)
        rng = key.rng()
        f = [random_rational(rng, 10) for _ in range(n)]
        g = GradientData.for_spectrum(s, f)
        a = A_via_L(s, g)
        assert a == A_via_triple_sum(s, g)
        assert a < 0
        assert not rigidity_verdict(s, g).is_rigid
