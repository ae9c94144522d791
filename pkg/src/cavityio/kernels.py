"""Hot numerical loops, each in a numba and a pure-numpy flavour.

The numba versions are used when numba imports cleanly and the
environment variable ``CAVITYIO_NUMBA`` is not set to ``0``.  Both
flavours are always importable as ``kernels.numba_impl`` /
``kernels.numpy_impl`` so tests and the benchmark can compare them.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

USE_NUMBA = HAVE_NUMBA and os.environ.get("CAVITYIO_NUMBA", "1") != "0"

TWO_OVER_PI = 2.0 / np.pi


# ---------------------------------------------------------------------------
# upsilon kernel: [f(w) - f(w') e^{i(w'-w)dt}] / (w - w'),  diagonal by limit
# ---------------------------------------------------------------------------

def _upsilon_matrix_np(omega, f, fprime, delta_t):
    w = omega[:, None]
    wp = omega[None, :]
    diff = w - wp
    on_diag = diff == 0
    num = f[:, None] - f[None, :] * np.exp(1j * (wp - w) * delta_t)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / np.where(on_diag, 1.0, diff)
    diag = fprime + 1j * delta_t * f
    out[on_diag] = np.broadcast_to(diag[:, None], out.shape)[on_diag]
    return out


def _upsilon_contract_np(omega, vec, f, fprime, delta_t, chunk=512):
    # out[i] = sum_j vec[j] * U[j, i]
    n = omega.size
    out = np.empty(n, dtype=np.complex128)
    for s in range(0, n, chunk):
        cols = slice(s, min(n, s + chunk))
        wp = omega[cols]
        diff = omega[:, None] - wp[None, :]
        on_diag = diff == 0
        num = f[:, None] - f[cols][None, :] * np.exp(1j * (wp[None, :] - omega[:, None]) * delta_t)
        with np.errstate(divide="ignore", invalid="ignore"):
            block = num / np.where(on_diag, 1.0, diff)
        jj, ii = np.nonzero(on_diag)
        block[jj, ii] = fprime[jj] + 1j * delta_t * f[jj]
        out[cols] = vec @ block
    return out


@njit(cache=True)
def _upsilon_matrix_nb(omega, f, fprime, delta_t):
    n = omega.size
    out = np.empty((n, n), dtype=np.complex128)
    for j in range(n):
        for i in range(n):
            d = omega[j] - omega[i]
            if d == 0.0:
                out[j, i] = fprime[j] + 1j * delta_t * f[j]
            else:
                out[j, i] = (f[j] - f[i] * np.exp(1j * (omega[i] - omega[j]) * delta_t)) / d
    return out


@njit(cache=True)
def _upsilon_contract_nb(omega, vec, f, fprime, delta_t):
    n = omega.size
    out = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        acc = 0j
        wi = omega[i]
        fi = f[i]
        for j in range(n):
            d = omega[j] - wi
            if d == 0.0:
                u = fprime[j] + 1j * delta_t * f[j]
            elif delta_t == 0.0:
                u = (f[j] - fi) / d
            else:
                u = (f[j] - fi * np.exp(1j * (wi - omega[j]) * delta_t)) / d
            acc += vec[j] * u
        out[i] = acc
    return out


# ---------------------------------------------------------------------------
# number-state Wigner function (2/pi)(-1)^n L_n(4 rho^2) exp(-2 rho^2)
# ---------------------------------------------------------------------------

def _number_wigner_np(x, p, n):
    from scipy.special import eval_laguerre

    rho2 = x * x + p * p
    sign = -1.0 if n % 2 else 1.0
    return TWO_OVER_PI * sign * eval_laguerre(n, 4.0 * rho2) * np.exp(-2.0 * rho2)


@njit(cache=True)
def _number_wigner_nb(x, p, n):
    xf = x.ravel()
    pf = p.ravel()
    out = np.empty(xf.size)
    sign = -1.0 if n % 2 else 1.0
    for k in range(xf.size):
        rho2 = xf[k] * xf[k] + pf[k] * pf[k]
        z = 4.0 * rho2
        # three-term recurrence for L_n(z)
        l0 = 1.0
        l1 = 1.0 - z
        if n == 0:
            lag = l0
        else:
            for m in range(1, n):
                l0, l1 = l1, ((2 * m + 1 - z) * l1 - m * l0) / (m + 1)
            lag = l1
        out[k] = TWO_OVER_PI * sign * lag * np.exp(-2.0 * rho2)
    return out.reshape(x.shape)


# ---------------------------------------------------------------------------
# displaced-parity Wigner function in a truncated Fock basis
# W(alpha) = 2/pi <psi| D(alpha) P D(alpha)^H |psi> = 2/pi <psi| D(2 alpha) P |psi>
# D(2 alpha) = U V diag(exp(-2 i |alpha| lam)) V^H U^H,  U = exp(i (theta + pi) n)
# With phi = exp(-i theta n) psi this is  sum_j conj(a_j) e^{-2 i |alpha| lam_j} b_j,
# a = V^H P phi, b = V^H phi.  Only the rows of V inside the support of psi
# are touched, so ``vecs`` may be passed already restricted to them.
# ---------------------------------------------------------------------------

def _parity_wigner_np(vecs, lam, psi, amp, theta, chunk=256):
    nsup = psi.size
    m = np.arange(nsup)
    parity = np.where(m % 2 == 0, 1.0, -1.0)
    vh = np.ascontiguousarray(vecs[:nsup].conj().T)
    out = np.empty(amp.size)
    for s in range(0, amp.size, chunk):
        sl = slice(s, min(amp.size, s + chunk))
        phi = np.exp(-1j * np.outer(m, theta[sl])) * psi[:, None]
        b = vh @ phi
        a = vh @ (phi * parity[:, None])
        ph = np.exp(-2j * np.outer(lam, amp[sl]))
        out[s:sl.stop] = TWO_OVER_PI * np.sum(a.conj() * ph * b, axis=0).real
    return out


@njit(cache=True)
def _parity_wigner_nb(vecs, lam, psi, amp, theta):
    nsup = psi.size
    dim = lam.size
    npts = amp.size
    chunk = 128
    out = np.empty(npts)
    vh = np.conj(vecs[:nsup].T).copy()
    phi = np.empty((nsup, chunk), dtype=np.complex128)
    phip = np.empty((nsup, chunk), dtype=np.complex128)
    for s0 in range(0, npts, chunk):
        nk = min(chunk, npts - s0)
        for m in range(nsup):
            sgn = 1.0 if m % 2 == 0 else -1.0
            for k in range(nk):
                v = np.exp(-1j * m * theta[s0 + k]) * psi[m]
                phi[m, k] = v
                phip[m, k] = sgn * v
            for k in range(nk, chunk):
                phi[m, k] = 0.0
                phip[m, k] = 0.0
        b = np.dot(vh, phi)
        a = np.dot(vh, phip)
        for k in range(nk):
            total = 0j
            for j in range(dim):
                total += np.conj(a[j, k]) * b[j, k] * np.exp(-2j * lam[j] * amp[s0 + k])
            out[s0 + k] = TWO_OVER_PI * total.real
    return out


# ---------------------------------------------------------------------------
# direct (non-separable) Gaussian smoothing
# out(a) = sum_j cell * K(a - eta a'_j) W(a'_j),  K(v) = 2/(pi s) exp(-2|v|^2/s)
# ---------------------------------------------------------------------------

def _gauss_direct_np(xo, po, xi, pi_, wi, eta, s, cell, chunk=64):
    out = np.empty(xo.size)
    norm = TWO_OVER_PI / s * cell
    sx = eta * xi
    sp = eta * pi_
    for a in range(0, xo.size, chunk):
        sl = slice(a, min(xo.size, a + chunk))
        dx = xo[sl, None] - sx[None, :]
        dp = po[sl, None] - sp[None, :]
        out[sl] = norm * (np.exp(-2.0 * (dx * dx + dp * dp) / s) @ wi)
    return out


@njit(cache=True)
def _gauss_direct_nb(xo, po, xi, pi_, wi, eta, s, cell):
    out = np.empty(xo.size)
    norm = TWO_OVER_PI / s * cell
    inv = 2.0 / s
    for a in range(xo.size):
        acc = 0.0
        for j in range(xi.size):
            dx = xo[a] - eta * xi[j]
            dp = po[a] - eta * pi_[j]
            acc += np.exp(-inv * (dx * dx + dp * dp)) * wi[j]
        out[a] = norm * acc
    return out


numpy_impl = SimpleNamespace(
    upsilon_matrix=_upsilon_matrix_np,
    upsilon_contract=_upsilon_contract_np,
    number_wigner=_number_wigner_np,
    parity_wigner=_parity_wigner_np,
    gauss_direct=_gauss_direct_np,
)

numba_impl = SimpleNamespace(
    upsilon_matrix=_upsilon_matrix_nb,
    upsilon_contract=_upsilon_contract_nb,
    number_wigner=_number_wigner_nb,
    parity_wigner=_parity_wigner_nb,
    gauss_direct=_gauss_direct_nb,
)

_active = numba_impl if USE_NUMBA else numpy_impl


def upsilon_matrix(omega, f, fprime, delta_t=0.0):
    """Full matrix ``U[j, i]`` of the difference quotient at grid pairs."""
    return _active.upsilon_matrix(np.ascontiguousarray(omega, dtype=np.float64),
                                  np.ascontiguousarray(f, dtype=np.complex128),
                                  np.ascontiguousarray(fprime, dtype=np.complex128),
                                  float(delta_t))


def upsilon_contract(omega, vec, f, fprime, delta_t=0.0):
    """``sum_j vec[j] U[j, i]`` without materialising ``U``."""
    return _active.upsilon_contract(np.ascontiguousarray(omega, dtype=np.float64),
                                    np.ascontiguousarray(vec, dtype=np.complex128),
                                    np.ascontiguousarray(f, dtype=np.complex128),
                                    np.ascontiguousarray(fprime, dtype=np.complex128),
                                    float(delta_t))


def number_wigner(x, p, n):
    x = np.ascontiguousarray(x, dtype=np.float64)
    p = np.ascontiguousarray(p, dtype=np.float64)
    x, p = np.broadcast_arrays(x, p)
    return _active.number_wigner(np.ascontiguousarray(x), np.ascontiguousarray(p), int(n))


def parity_wigner(vecs, lam, psi, alpha):
    alpha = np.asarray(alpha, dtype=np.complex128).ravel()
    return _active.parity_wigner(np.ascontiguousarray(vecs, dtype=np.complex128),
                                 np.ascontiguousarray(lam, dtype=np.float64),
                                 np.ascontiguousarray(psi, dtype=np.complex128),
                                 np.ascontiguousarray(np.abs(alpha)),
                                 np.ascontiguousarray(np.angle(alpha)))


def gauss_direct(xo, po, xi, pi_, wi, eta, s, cell):
    return _active.gauss_direct(*(np.ascontiguousarray(a, dtype=np.float64)
                                  for a in (xo, po, xi, pi_, wi)),
                                float(eta), float(s), float(cell))
