import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from cavityio import kernels
from cavityio.fock import squeezed_number_ket

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")
rng = np.random.default_rng(7)


def _both(name, *args):
    return getattr(kernels.numpy_impl, name)(*args), getattr(kernels.numba_impl, name)(*args)


@needs_numba
@pytest.mark.parametrize("dt", [0.0, 0.7])
def test_upsilon_flavours_agree(dt):
    om = np.sort(rng.uniform(1.0, 2.0, 90))
    om[10] = om[11]  # repeated node exercises the diagonal limit
    f = np.exp(2j * om) / (om - 1.5 + 0.05j)
    fp = rng.normal(size=90) + 1j * rng.normal(size=90)
    a, b = _both("upsilon_matrix", om, f, fp, dt)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
    v = rng.normal(size=90) + 0j
    a, b = _both("upsilon_contract", om, v, f, fp, dt)
    np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-11)


def test_contract_matches_matrix():
    om = np.sort(rng.uniform(1.0, 2.0, 700))
    f = np.exp(1j * om)
    fp = 1j * f
    v = rng.normal(size=700) + 1j * rng.normal(size=700)
    U = kernels.upsilon_matrix(om, f, fp, 0.2)
    np.testing.assert_allclose(kernels.upsilon_contract(om, v, f, fp, 0.2), v @ U, rtol=1e-10)


@needs_numba
@pytest.mark.parametrize("n", [0, 1, 7])
def test_number_wigner_flavours_agree(n):
    x, p = rng.uniform(-4, 4, (2, 500))
    a, b = _both("number_wigner", x, p, n)
    np.testing.assert_allclose(a, b, atol=1e-14)


@needs_numba
def test_parity_flavours_agree():
    dim = 150
    lam, vr = eigh_tridiagonal(np.zeros(dim), np.sqrt(np.arange(1, dim)))
    vecs = ((-1j) ** (np.arange(dim) % 4))[:, None] * vr
    psi = squeezed_number_ket(0.5, 1, 90).astype(complex)
    al = rng.uniform(-2, 2, 300) + 1j * rng.uniform(-2, 2, 300)
    a, b = _both("parity_wigner", np.ascontiguousarray(vecs[:90]), lam, psi,
                 np.abs(al), np.angle(al))
    np.testing.assert_allclose(a, b, atol=1e-13)


@needs_numba
def test_gauss_direct_flavours_agree():
    xo, po = rng.uniform(-2, 2, (2, 200))
    xi, pi_ = rng.uniform(-3, 3, (2, 400))
    wi = rng.normal(size=400)
    a, b = _both("gauss_direct", xo, po, xi, pi_, wi, 0.8, 0.3, 0.01)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


def test_env_flag_selects_numpy():
    code = "from cavityio import kernels; print(kernels.USE_NUMBA)"
    env = dict(os.environ, CAVITYIO_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "False"
