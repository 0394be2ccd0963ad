import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import constants as sc

from spinshift.constants import CONSTANTS, rad_s_to_mhz, mhz_to_rad_s, rad_s_to_thz, thz_to_rad_s
from spinshift.phonons import (PhononError, PhononMode, PhononSpectrum, bose_occupation,
                               mean_square_displacement, zero_point_msd)

W10 = 2 * math.pi * 10e12


def test_constants_are_codata_and_frozen():
    assert CONSTANTS.hbar == pytest.approx(6.582119569e-16, rel=1e-10)
    assert CONSTANTS.k_B == pytest.approx(8.617333262e-5, rel=1e-10)
    assert CONSTANTS.g_e == pytest.approx(2.00231930436, rel=1e-10)
    with pytest.raises(AttributeError):
        CONSTANTS.hbar = 1.0


def test_unit_round_trips():
    for x in (1e-3, 1.0, 37.5):
        assert rad_s_to_thz(thz_to_rad_s(x)) == pytest.approx(x, rel=1e-15)
        assert mhz_to_rad_s(rad_s_to_mhz(x)) == pytest.approx(x, rel=1e-15)


def test_bose_zero_temperature_is_exactly_zero():
    assert bose_occupation(W10, 0.0) == 0.0
    assert bose_occupation(1e10, 0.0) == 0.0


def test_bose_ln2_gives_one():
    T = 250.0
    omega = CONSTANTS.k_B * T * math.log(2) / CONSTANTS.hbar
    assert bose_occupation(omega, T) == pytest.approx(1.0, rel=1e-13)


def test_bose_10thz_300k_matches_si_evaluation():
    # independent evaluation in SI units with h*nu
    x = sc.h * 10e12 / (sc.k * 300.0)
    expected = 1.0 / (math.exp(x) - 1.0)
    assert expected == pytest.approx(0.25305033913703, rel=1e-12)
    assert bose_occupation(W10, 300.0) == pytest.approx(expected, rel=1e-12)


def test_bose_large_argument_underflows_to_zero():
    assert bose_occupation(2 * math.pi * 40e12, 1e-3) == 0.0


@pytest.mark.parametrize("omega", [0.0, -1.0])
def test_bose_rejects_nonpositive_omega(omega):
    with pytest.raises(PhononError):
        bose_occupation(omega, 300.0)


def test_bose_monotone_on_grids():
    T = np.linspace(1, 1000, 400)
    n = bose_occupation(W10, T)
    assert np.all(np.diff(n) > 0)
    w = np.linspace(1e12, 1e14, 400)
    n = bose_occupation(w, 300.0)
    assert np.all(np.diff(n) < 0)


def test_zero_point_msd_value():
    mode = PhononMode(0, W10, 12.0)
    expected = sc.hbar / (2 * 12 * sc.atomic_mass * W10) * 1e20
    assert expected == pytest.approx(4.211491736961e-3, rel=1e-11)
    assert mean_square_displacement(mode, 0.0) == pytest.approx(expected, rel=1e-14)
    assert zero_point_msd(mode) == pytest.approx(expected, rel=1e-14)


def test_msd_increases_with_temperature():
    mode = PhononMode(0, W10, 12.0)
    assert mean_square_displacement(mode, 600.0) > mean_square_displacement(mode, 100.0)


@settings(max_examples=60, deadline=None)
@given(f=st.floats(0.5, 50), m=st.floats(1, 100), T=st.floats(0, 2000))
def test_msd_never_below_zero_point(f, m, T):
    mode = PhononMode.from_thz(0, f, m)
    assert mean_square_displacement(mode, T) - zero_point_msd(mode) >= 0


@settings(max_examples=40, deadline=None)
@given(f=st.floats(0.1, 5), m=st.floats(1, 50))
def test_msd_high_temperature_asymptote(f, m):
    mode = PhononMode.from_thz(0, f, m)
    T = 50 * CONSTANTS.hbar * mode.omega / CONSTANTS.k_B
    classical = sc.k * T / (m * sc.atomic_mass * mode.omega**2) * 1e20
    assert abs(mean_square_displacement(mode, T) - classical) / classical <= 0.01


def test_mode_validation():
    with pytest.raises(PhononError):
        PhononMode(0, W10, 0.0)
    with pytest.raises(PhononError):
        PhononMode(0, W10, 1.0, displacement_pattern=np.ones((2, 3)))
    pat = np.ones((2, 3)) / math.sqrt(6)
    assert PhononMode(0, W10, 1.0, displacement_pattern=pat).displacement_pattern.shape == (2, 3)


def test_spectrum_unique_indices_and_admission():
    with pytest.raises(PhononError):
        PhononSpectrum((PhononMode(0, W10, 1.0), PhononMode(0, W10, 2.0)))
    sp = PhononSpectrum((PhononMode(0, 0.0, 1.0), PhononMode.from_thz(1, 0.05, 1.0),
                         PhononMode.from_thz(2, -3.0, 1.0), PhononMode(3, W10, 1.0)))
    kept, excluded = sp.admitted()
    assert [m.index for m in kept] == [3]
    assert excluded == 3
    kept, excluded = sp.admitted(omega_min_thz=0.01)
    assert [m.index for m in kept] == [1, 3]
