import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinshift.constants import thz_to_rad_s
from spinshift.phonons import spectrum_from_arrays
from spinshift.shift import CurvatureSet, ShiftCurve, ShiftError, dynamic_shift
from spinshift.spectral import correlation_overlay, default_bins, shift_ratio, spectral_density

T_GRID = np.arange(0.0, 501.0, 25.0)


def test_single_mode_single_bin():
    sp = spectrum_from_arrays([10.0], [12.0])
    cs = CurvatureSet.from_second_derivatives("x", {0: -6.0})
    S = spectral_density(sp, cs)
    assert np.count_nonzero(S.weights) == 1
    assert S.weights.sum() == pytest.approx(-0.5, rel=1e-15)
    k = np.flatnonzero(S.weights)[0]
    assert S.bin_edges[k] <= thz_to_rad_s(10.0) < S.bin_edges[k + 1]


@settings(max_examples=20, deadline=None)
@given(nbins=st.integers(1, 500))
def test_total_weight_independent_of_binning(nv_spectrum, nv_curvatures, nbins):
    S = spectral_density(nv_spectrum, nv_curvatures["D"], bins=nbins)
    ref = spectral_density(nv_spectrum, nv_curvatures["D"])
    assert S.weights.sum() == pytest.approx(ref.total_weight, rel=1e-12)


def test_bins_must_cover_modes(nv_spectrum, nv_curvatures):
    with pytest.raises(ShiftError):
        spectral_density(nv_spectrum, nv_curvatures["D"], bins=np.linspace(0, thz_to_rad_s(20.0), 11))


def test_proportional_densities_give_constant_ratio(nv_spectrum, nv_curvatures):
    D = nv_curvatures["D"]
    S1 = spectral_density(nv_spectrum, D.scaled(-0.37))
    S2 = spectral_density(nv_spectrum, D)
    r = shift_ratio(S1, S2, T_GRID[1:])
    np.testing.assert_allclose(r, -0.37, rtol=1e-11)
    assert np.ptp(r) <= 1e-11


@pytest.mark.parametrize("zeta", [0.0, 0.5])
def test_ratio_matches_dynamic_shift(nv_spectrum, nv_curvatures, zeta):
    Q, D = nv_curvatures["Q"], nv_curvatures["D"]
    bins = default_bins(nv_spectrum)
    T = T_GRID[1:] if zeta == 0 else T_GRID
    r = shift_ratio(spectral_density(nv_spectrum, Q, bins), spectral_density(nv_spectrum, D, bins), T, zeta=zeta)
    sub = zeta == 0.0
    expected = dynamic_shift(nv_spectrum, Q, T, subtract_zero_point=sub) / dynamic_shift(
        nv_spectrum, D, T, subtract_zero_point=sub)
    np.testing.assert_allclose(r, expected, rtol=1e-9)


def test_ratio_zero_denominator(nv_spectrum, nv_curvatures):
    S = spectral_density(nv_spectrum, nv_curvatures["D"])
    with pytest.raises(ZeroDivisionError):
        shift_ratio(S, S, 0.0, zeta=0.0)


def test_ratio_needs_shared_bins(nv_spectrum, nv_curvatures):
    S1 = spectral_density(nv_spectrum, nv_curvatures["D"], bins=100)
    S2 = spectral_density(nv_spectrum, nv_curvatures["Q"], bins=50)
    with pytest.raises(ShiftError):
        shift_ratio(S1, S2, 300.0)


def test_overlay_slopes():
    T = np.linspace(0, 100, 11)
    ref = ShiftCurve.from_terms(T, np.zeros_like(T), 0.01 * T**2, "ref")
    same = ShiftCurve.from_terms(T, np.zeros_like(T), 0.01 * T**2 + 5, "same")
    triple = ShiftCurve.from_terms(T, np.zeros_like(T), 0.03 * T**2, "triple")
    ov = correlation_overlay([ref, same, triple])
    np.testing.assert_allclose(ov.slopes[1][1:], 1.0, rtol=1e-12)
    np.testing.assert_allclose(ov.slopes[2][1:], 3.0, rtol=1e-12)
    assert ov.labels == ("ref", "same", "triple")


def test_overlay_nan_where_reference_flat():
    T = np.linspace(0, 10, 6)
    flat = ShiftCurve.from_terms(T, np.zeros_like(T), np.zeros_like(T), "flat")
    other = ShiftCurve.from_terms(T, np.zeros_like(T), T, "lin")
    ov = correlation_overlay([flat, other])
    assert np.all(np.isnan(ov.slopes[1]))


def test_overlay_grid_mismatch():
    a = ShiftCurve.from_terms(np.arange(5.0), np.zeros(5), np.arange(5.0))
    b = ShiftCurve.from_terms(np.arange(6.0), np.zeros(6), np.arange(6.0))
    with pytest.raises(ShiftError):
        correlation_overlay([a, b])
