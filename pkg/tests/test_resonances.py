import json

import numpy as np
import pytest

from cavityio.optics import CavityGeometry, OpticalMedium, VACUUM, spectral_denominators, stack_coefficients
from cavityio.resonances import (ResonanceError, coupling_constants, decay_decomposition,
                                 locate_resonance, locate_resonances, mode_profile,
                                 noise_normalizations)

from conftest import highq_geometry, reference_geometry


def test_roots_are_zeros_of_D1(ref_modes, ref_geom):
    for m in ref_modes:
        D1, _ = spectral_denominators(ref_geom, m.Omega_k)
        assert abs(D1) < 1e-9
        assert m.Omega_k.imag < 0
        assert m.gamma_k == pytest.approx(-2 * m.Omega_k.imag)


def test_modes_sorted_and_labelled(ref_modes):
    ks = [m.k for m in ref_modes]
    assert ks == list(range(10, 15))
    w = [m.omega_k for m in ref_modes]
    assert np.all(np.diff(w) > 0)
    for m in ref_modes:
        lo, hi = m.interval
        assert lo < m.omega_k < hi


def test_high_q_root_near_round_trip_condition(hq_mode, hq_geom):
    # nearly perfect mirror: beta1 l ~ k pi, Gamma ~ -ln|r13| / l
    assert hq_mode.omega_k == pytest.approx(10 * np.pi, rel=1e-3)
    r13 = stack_coefficients(hq_geom, hq_mode.omega_k).r13
    assert hq_mode.gamma_k == pytest.approx(-np.log(abs(r13)), rel=1e-3)
    assert hq_mode.linewidth_ratio < 1e-3 and hq_mode.valid


def test_high_q_closure(hq_mode):
    assert hq_mode.closure_residual < 1e-3


def test_low_q_flagged_invalid_at_tight_threshold(ref_geom):
    m = locate_resonances(ref_geom, [10], validity_threshold=0.1)[0]
    assert m.linewidth_ratio > 0.1 and not m.valid


def test_lowest_mode_interval_uses_zero_frequency():
    g = highq_geometry()
    m = locate_resonances(g, [1])[0]
    # the zero frequency stands in for the missing k = 0 neighbour
    assert m.omega_k == pytest.approx(np.pi, rel=0.05)
    assert m.interval[0] == pytest.approx(0.5 * m.omega_k)


def test_no_resonance_raises():
    # an index-matched plate has no reflection and hence no cavity mode
    g = CavityGeometry(1.0, 0.05, VACUUM, OpticalMedium(1.0))
    with pytest.raises(ResonanceError) as info, np.errstate(all="ignore"):
        locate_resonance(g, 5, max_iter=20)
    assert info.value.k == 5


def test_decay_decomposition_matches_stored(ref_modes, ref_geom):
    m = ref_modes[0]
    g_rad, g_abs, lam, g_out, closure = decay_decomposition(m, ref_geom)
    assert g_rad == pytest.approx(m.gamma_rad)
    assert g_abs == pytest.approx(sum(lam.values()))
    assert g_out == pytest.approx(m.gamma_rad_out)
    assert closure == pytest.approx(m.closure_residual)


def test_lossless_plate_has_no_absorption_channels():
    g = CavityGeometry(1.0, 5e-4, VACUUM, OpticalMedium(100.0))
    assert noise_normalizations(g, 31.4) == (np.inf, np.inf, np.inf)
    c = coupling_constants(g, 31.4)
    assert c.A_plus == 0 and c.A_minus == 0 and c.A_cav == 0
    m = locate_resonances(g, [10])[0]
    assert m.gamma_abs == 0.0
    assert m.closure_residual < 1e-3


def test_absorption_rate_scales_with_loss():
    # thin-plate absorption is linear in Im n2 to leading order
    a = locate_resonances(CavityGeometry(1.0, 5e-4, VACUUM, OpticalMedium(100 + 0.2j)), [10])[0]
    b = locate_resonances(CavityGeometry(1.0, 5e-4, VACUUM, OpticalMedium(100 + 0.1j)), [10])[0]
    assert a.gamma_abs / b.gamma_abs == pytest.approx(2.0, rel=0.02)


def test_pm_normalisation_small_loss_expansion():
    # for n'' d omega << 1 the radicands reduce to n'' (x_i n'/n'' +- sin x_r)
    g = reference_geometry(1e-6)
    w = 31.0
    a_cav, a_p, a_m = noise_normalizations(g, w)
    n2 = 1.5 + 1e-6j
    xr, xi = (n2 * w).real * g.d, (n2 * w).imag * g.d
    approx_p = abs(n2) / np.sqrt(n2.real * xi + n2.imag * np.sin(xr))
    assert a_cav == np.inf
    assert a_p == pytest.approx(approx_p, rel=1e-6)


def test_mode_profile(hq_mode, hq_geom):
    z = np.linspace(0, 1, 5)
    u = mode_profile(hq_mode, hq_geom, z)
    assert abs(u[0]) == 0.0
    assert np.max(np.abs(u)) <= np.sqrt(hq_mode.omega_k) + 1e-12
    with pytest.raises(ValueError):
        mode_profile(hq_mode, hq_geom, 1.5)


def test_to_dict_is_json(ref_modes):
    d = ref_modes[0].to_dict()
    s = json.dumps(d)
    back = json.loads(s)
    assert back["k"] == 10
    assert back["Omega_k"][1] < 0
    assert isinstance(back["valid"], bool)


def test_halving_loss_lowers_absorption(ref_modes):
    half = locate_resonances(reference_geometry(5e-4), range(10, 15))
    for a, b in zip(ref_modes, half):
        assert b.gamma_abs < a.gamma_abs
