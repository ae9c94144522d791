import numpy as np
import pytest

from cavityio.extraction import (CHANNELS, NO_OUTPUT, ExtractionSettings, build_grid,
                                 capital_F, check_orthonormal, decay_pole, eta_closed_form,
                                 eta_curve, extract, filter_derivative, filter_function,
                                 kernel_G, kernel_G_value, legendre_basis, mode_couplings,
                                 output_mode_and_eta, upsilon_kernel)

# small quad orders are used on purpose to keep these fast
pytestmark = pytest.mark.filterwarnings("ignore:only .* quadrature nodes:RuntimeWarning")


def _settings(mode, x, **kw):
    return ExtractionSettings(t=x / (mode.gamma_rad + mode.gamma_abs), **kw)


def test_settings_validation():
    with pytest.raises(ValueError):
        ExtractionSettings(t=-1.0)
    with pytest.raises(ValueError):
        ExtractionSettings(quad_order=1)
    with pytest.raises(ValueError):
        ExtractionSettings(basis="fourier")
    with pytest.raises(ValueError):
        ExtractionSettings(decay_rate="guess")
    s = ExtractionSettings(t0=1.0, t=3.0, delta_t=0.5)
    assert s.tau == 2.5 and s.tau0 == 2.0


def test_decay_pole_options(hq_mode):
    a = decay_pole(hq_mode, ExtractionSettings(decay_rate="closure"))
    b = decay_pole(hq_mode, ExtractionSettings(decay_rate="newton"))
    assert a.imag == pytest.approx(0.5 * (hq_mode.gamma_rad + hq_mode.gamma_abs))
    assert b.imag == pytest.approx(0.5 * hq_mode.gamma_k)


def test_grid_integrates_lorentzian(hq_mode):
    s = _settings(hq_mode, 1.0)
    g = build_grid(hq_mode, s)
    lo, hi = hq_mode.interval
    assert g.omega.min() > lo and g.omega.max() < hi
    h = decay_pole(hq_mode, s).imag
    lor = h / np.pi / ((g.omega - hq_mode.omega_k) ** 2 + h * h)
    exact = (np.arctan((hi - hq_mode.omega_k) / h) - np.arctan((lo - hq_mode.omega_k) / h)) / np.pi
    assert np.sum(g.weights * lor) == pytest.approx(exact, rel=1e-10)


def test_linear_mapping_warns_for_narrow_line(hq_mode):
    with pytest.warns(RuntimeWarning, match="FWHM"):
        build_grid(hq_mode, _settings(hq_mode, 1.0, mapping="linear"))


def test_filter_derivative_matches_finite_difference(hq_mode):
    s = _settings(hq_mode, 2.0, t0=0.3, delta_t=10.0)
    w = hq_mode.omega_k + np.linspace(-3, 3, 7) * hq_mode.gamma_k
    e = 1e-7
    fd = (filter_function(hq_mode, s, w + e) - filter_function(hq_mode, s, w - e)) / (2 * e)
    np.testing.assert_allclose(filter_derivative(hq_mode, s, w), fd, rtol=1e-5)


def test_upsilon_diagonal_is_continuous(hq_mode):
    s = _settings(hq_mode, 1.0, delta_t=50.0)
    w = hq_mode.omega_k + 0.3 * hq_mode.gamma_k
    on = upsilon_kernel(hq_mode, s, w, w)
    near = upsilon_kernel(hq_mode, s, w, w + 1e-9)
    assert abs(on - near) < 1e-5 * abs(on)


def test_kernel_channels(hq_mode):
    s = _settings(hq_mode, 1.0)
    parts = {ch: kernel_G(hq_mode, s, ch) for ch in CHANNELS}
    assert parts["cav"].delta == 0
    assert parts["in"].delta == pytest.approx(np.conj(hq_mode.R_out))
    sm, dw = kernel_G_value(hq_mode, s, "+", hq_mode.omega_k, hq_mode.omega_k + 1e-4)
    assert np.isfinite(sm) and abs(dw) == pytest.approx(abs(hq_mode.A_plus_out))
    with pytest.raises(ValueError):
        kernel_G(hq_mode, s, "x")


def test_eta_closed_form_limits(hq_mode):
    assert eta_closed_form(hq_mode, ExtractionSettings(t=0.0)) == 0.0
    late = eta_closed_form(hq_mode, _settings(hq_mode, 60.0))
    asym = np.sqrt(hq_mode.gamma_rad_out / (hq_mode.gamma_rad + hq_mode.gamma_abs))
    assert late == pytest.approx(asym, rel=1e-12)


def test_no_output_at_zero_duration(hq_mode):
    s = ExtractionSettings(t0=1.0, t=1.0)
    phi, eta = output_mode_and_eta(hq_mode, s)
    assert phi is NO_OUTPUT and eta == 0.0 and not phi
    chi, residual, _ = mode_couplings(hq_mode, s, basis="grid")
    assert residual == 1.0
    assert all(np.all(v == 0) for v in chi.values())


def test_output_mode_is_normalised(hq_mode):
    s = _settings(hq_mode, 1.0)
    g = build_grid(hq_mode, s)
    phi, eta = output_mode_and_eta(hq_mode, s, g)
    assert g.norm(phi) == pytest.approx(1.0)
    assert eta == pytest.approx(g.norm(capital_F(hq_mode, s, g.omega)))


def test_quadrature_eta_converges(hq_mode):
    s128 = _settings(hq_mode, 1.0, quad_order=128)
    s512 = _settings(hq_mode, 1.0, quad_order=512)
    e128 = output_mode_and_eta(hq_mode, s128)[1]
    e512 = output_mode_and_eta(hq_mode, s512)[1]
    c = eta_closed_form(hq_mode, s512)
    assert abs(e512 / c - 1) < abs(e128 / c - 1)
    assert abs(e512 / c - 1) < 1e-3


def test_legendre_basis_orthonormal(hq_mode):
    s = _settings(hq_mode, 1.0, quad_order=96)
    g = build_grid(hq_mode, s)
    B = legendre_basis(g, 40)
    check_orthonormal(g, B)
    with pytest.raises(ValueError):
        check_orthonormal(g, 2 * B)


@pytest.mark.parametrize("x", [0.3, 2.0])
def test_bases_agree_on_residual(hq_mode, x):
    res = {}
    for basis in ("grid", "legendre", "svd"):
        s = _settings(hq_mode, x, quad_order=96, basis=basis)
        _, r, _ = mode_couplings(hq_mode, s)
        res[basis] = r
    assert res["legendre"] == pytest.approx(res["grid"], abs=1e-10)
    assert res["svd"] == pytest.approx(res["grid"], abs=1e-10)


def test_svd_singular_values_sorted_and_truncation(hq_mode):
    s = _settings(hq_mode, 1.0, quad_order=64, basis="svd", basis_size=8)
    chi, _, sv = mode_couplings(hq_mode, s)
    for ch in CHANNELS:
        assert chi[ch].shape == (8,)
        assert np.all(np.diff(sv[ch]) <= 1e-12)
    full = mode_couplings(hq_mode, _settings(hq_mode, 1.0, quad_order=64, basis="svd"))[0]
    for ch in CHANNELS:
        np.testing.assert_allclose(np.abs(chi[ch]), np.abs(full[ch][:8]), atol=1e-12)


def test_user_basis_must_be_orthonormal(hq_mode):
    s = _settings(hq_mode, 1.0, quad_order=32)
    g = build_grid(hq_mode, s)
    with pytest.raises(ValueError):
        mode_couplings(hq_mode, s, basis=np.ones((2, 32)), grid=g)
    with pytest.raises(ValueError):
        mode_couplings(hq_mode, s, basis=np.ones((2, 5)), grid=g)


def test_extract_and_curve(hq_mode):
    s = _settings(hq_mode, 1.0, quad_order=128)
    r = extract(hq_mode, s)
    assert r.coupling_sum == pytest.approx(1.0 - r.residual)
    assert len(r.chi_table()) == 4 * 128
    rate = hq_mode.gamma_rad + hq_mode.gamma_abs
    q, c = eta_curve(hq_mode, s, np.array([0.5, 1.0, 3.0]) / rate)
    assert np.all(np.diff(q) > 0) and np.all(np.diff(c) > 0)
    assert q[1] == pytest.approx(r.eta)


def test_lossless_gap_has_no_cavity_channel(hq_mode):
    # bulk vacuum gap is lossless here: no cavity-absorption coupling
    r = extract(hq_mode, _settings(hq_mode, 1.0, quad_order=64))
    assert np.all(r.chi["cav"] == 0)
    assert np.sum(np.abs(r.chi["in"]) ** 2) > 0


def test_upsilon_symmetric_without_coarse_graining(hq_mode):
    # only checked at delta_t = 0; the coarse-graining phase breaks it otherwise
    s = _settings(hq_mode, 2.0)
    w = hq_mode.omega_k + 0.3 * hq_mode.gamma_k
    v = hq_mode.omega_k - 0.7 * hq_mode.gamma_k
    assert upsilon_kernel(hq_mode, s, w, v) == pytest.approx(upsilon_kernel(hq_mode, s, v, w),
                                                             rel=1e-12)


def test_upsilon_vanishes_at_zero_duration(hq_mode):
    s = ExtractionSettings(t0=1.0, t=1.0)
    w = hq_mode.omega_k + 0.2 * hq_mode.gamma_k
    assert upsilon_kernel(hq_mode, s, w, w - 0.1 * hq_mode.gamma_k) == 0
    assert upsilon_kernel(hq_mode, s, w, w) == 0


def test_filter_lorentzian_weight(hq_mode):
    s = _settings(hq_mode, 60.0, quad_order=512)
    g = build_grid(hq_mode, s)
    total = g.norm(filter_function(hq_mode, s, g.omega)) ** 2
    assert total == pytest.approx(2 * np.pi / hq_mode.gamma_k, rel=0.01)
