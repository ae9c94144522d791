import numpy as np
import pytest

from cavityio.optics import (CavityGeometry, OpticalMedium, VACUUM, interface_coefficients,
                             propagation_constant, spectral_denominators, stack_coefficients)


def test_fresnel_single_interface():
    r, t = interface_coefficients(VACUUM, OpticalMedium(1.5), 2.0)
    assert r == pytest.approx(-0.2)
    assert t == pytest.approx(0.8)
    assert 1 + r == pytest.approx(t)


def test_interface_reversal():
    a, b = OpticalMedium(1.3 + 0.01j), OpticalMedium(2.2 + 0.1j)
    rab, tab = interface_coefficients(a, b, 5.0)
    rba, tba = interface_coefficients(b, a, 5.0)
    assert rab == pytest.approx(-rba)
    # Stokes relation
    assert tab * tba - rab * rba == pytest.approx(1.0)


def test_lossless_plate_conserves_energy():
    g = CavityGeometry(1.0, 0.3, VACUUM, OpticalMedium(2.1))
    w = np.linspace(1.0, 40.0, 57)
    s = stack_coefficients(g, w)
    np.testing.assert_allclose(np.abs(s.r13) ** 2 + np.abs(s.t13) ** 2, 1.0, atol=1e-13)
    np.testing.assert_allclose(np.abs(s.r31) ** 2 + np.abs(s.t31) ** 2, 1.0, atol=1e-13)


def test_absorbing_plate_loses_energy():
    g = CavityGeometry(1.0, 0.05, VACUUM, OpticalMedium(1.5 + 1e-2j))
    w = np.linspace(5.0, 40.0, 31)
    s = stack_coefficients(g, w)
    assert np.all(np.abs(s.r13) ** 2 + np.abs(s.t13) ** 2 < 1.0)


def test_reciprocity_symmetric_surroundings():
    g = CavityGeometry(1.0, 0.05, VACUUM, OpticalMedium(1.5 + 1e-3j))
    s = stack_coefficients(g, np.linspace(1, 30, 11))
    np.testing.assert_allclose(s.t13, s.t31, rtol=1e-13)


def test_thin_plate_limit_has_no_reflection_for_matched_medium():
    g = CavityGeometry(1.0, 0.1, VACUUM, OpticalMedium(1.0))
    D1, D2 = spectral_denominators(g, 3.0)
    s = stack_coefficients(g, 3.0)
    assert abs(s.r13) < 1e-15 and D2 == pytest.approx(1.0)
    assert D1 == pytest.approx(1.0)


def test_quarter_wave_plate_reflectance():
    n = 2.0
    d = np.pi / (2 * n * 10.0)          # quarter wave at omega = 10
    g = CavityGeometry(1.0, d, VACUUM, OpticalMedium(n))
    s = stack_coefficients(g, 10.0)
    expected = ((1 - n * n) / (1 + n * n)) ** 2
    assert abs(s.r13) ** 2 == pytest.approx(expected)


def test_dispersion_table_reads_real_part():
    m = OpticalMedium.from_table([1.0, 2.0, 3.0], [1.5, 1.6 + 0.01j, 1.8])
    assert m.n(1.5) == pytest.approx(1.55 + 0.005j)
    assert m.n(1.5 - 0.2j) == pytest.approx(m.n(1.5))
    with pytest.raises(ValueError):
        m.n(3.5)


@pytest.mark.parametrize("bad", [1.5 - 0.1j, -1.0, 0.0])
def test_medium_validation(bad):
    with pytest.raises(ValueError):
        OpticalMedium(bad)


def test_geometry_and_frequency_validation():
    with pytest.raises(ValueError):
        CavityGeometry(0.0, 0.1)
    with pytest.raises(ValueError):
        propagation_constant(VACUUM, -1.0)
    with pytest.raises(ValueError):
        OpticalMedium.from_table([2.0, 1.0], [1.5, 1.5])
