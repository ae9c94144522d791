"""Truncated number-basis reference for single-mode Wigner functions.

Deliberately independent of the closed forms in :mod:`cavityio.states`:
states are built from matrix exponentials of ladder-operator generators
and the Wigner function is the displaced-parity expectation
``W(alpha) = (2/pi) <D(alpha) P D(alpha)^dagger>``.
"""
from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import expm_multiply

from . import kernels

TAIL_TOL = 1e-20


def annihilation(dim):
    return sparse.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, format="csr")


def _truncate(vec, dim):
    tail = float(np.sum(np.abs(vec[dim:]) ** 2))
    if tail > TAIL_TOL:
        raise ValueError(f"truncation tail {tail:.2e} exceeds {TAIL_TOL:g}; increase dim")
    return vec[:dim]


def number_ket(n, dim):
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def squeezed_number_ket(r, n, dim, axis="p", pad=None):
    """``S(r)|n>`` in a ``dim``-level basis.

    ``axis='p'`` squeezes the p quadrature (variance e^{-2r}/4) and
    stretches x.  The exponential is taken in a padded space and the
    result truncated, with a tail-norm check.
    """
    big = dim + (pad if pad is not None else max(40, dim))
    a = annihilation(big)
    gen = 0.5 * r * (a.T @ a.T - a @ a)   # squeezes p for r > 0
    if axis == "x":
        gen = -gen
    elif axis != "p":
        raise ValueError("axis must be 'p' or 'x'")
    return _truncate(expm_multiply(gen.tocsc(), number_ket(n, big)), dim)


def coherent_ket(beta, dim, pad=None):
    big = dim + (pad if pad is not None else max(40, dim))
    a = annihilation(big)
    gen = beta * a.T - np.conj(beta) * a
    return _truncate(expm_multiply(gen.tocsc(), number_ket(0, big)), dim)


def thermal_populations(nbar, dim):
    k = np.arange(dim)
    p = (nbar / (nbar + 1.0)) ** k / (nbar + 1.0)
    if (nbar / (nbar + 1.0)) ** dim > TAIL_TOL:   # exact geometric tail
        raise ValueError("thermal distribution not captured by dim")
    return p


class ParityEvaluator:
    """Displaced-parity Wigner evaluation in a truncated basis.

    Uses ``D(a) P D(a)^H = D(2a) P`` and the eigensystem ``V, lam`` of
    ``i(a - a^dagger)`` so that one diagonalisation serves every
    phase-space point.  ``dim`` must accommodate displacements of ``2|alpha|``.
    """

    def __init__(self, dim):
        self.dim = dim
        # i(a - a^H) = Q (a + a^H) Q^H with Q = diag((-i)^m): a real
        # tridiagonal problem instead of a dense complex one
        off = np.sqrt(np.arange(1, dim, dtype=float))
        self.lam, vr = eigh_tridiagonal(np.zeros(dim), off)
        self.vecs = ((-1j) ** (np.arange(dim) % 4))[:, None] * vr

    def wigner_pure(self, psi, alpha):
        psi = np.asarray(psi, dtype=complex)
        if psi.size > self.dim:
            raise ValueError("state longer than the evaluation basis")
        return kernels.parity_wigner(self.vecs[:psi.size], self.lam, psi, alpha)

    def wigner_mixed(self, populations, alpha, cutoff=1e-14):
        """Diagonal density matrix ``sum_k p_k |k><k|``."""
        out = np.zeros(np.size(alpha))
        for k, pk in enumerate(populations):
            if pk < cutoff:
                continue
            out += pk * self.wigner_pure(number_ket(k, k + 1), alpha)
        return out


def support_size(vec, tol=1e-24):
    """Smallest N with sum_{m >= N} |vec_m|^2 < tol."""
    tail = np.cumsum((np.abs(vec) ** 2)[::-1])[::-1]
    idx = np.nonzero(tail >= tol)[0]
    return int(idx[-1] + 1) if idx.size else 1


def evaluation_dim(support, alpha_max):
    """Basis size in which displacements up to ``alpha_max`` stay converged."""
    return int(np.ceil((np.sqrt(support) + alpha_max + 7.0) ** 2)) + 20


def reference_state(kind, *, n=0, r=0.0, beta=0.0, nbar=0.0, axis="p"):
    """State vector (pure) or populations (thermal), trimmed to its support."""
    spread = np.exp(abs(r)) * np.sqrt(2 * n + 1) + abs(beta) + 3 * np.sqrt(nbar + 1)
    dim = int(max(4 * n + 20, np.ceil(2 * (spread + 4.0) ** 2)))
    if kind == "vacuum":
        vec = number_ket(0, dim)
    elif kind == "number":
        vec = number_ket(n, dim)
    elif kind == "squeezed_number":
        vec = squeezed_number_ket(r, n, dim, axis=axis)
    elif kind == "coherent":
        vec = coherent_ket(beta, dim)
    elif kind == "thermal":
        while True:
            try:
                pops = thermal_populations(nbar, dim)
                break
            except ValueError:
                dim *= 2
        return pops[:support_size(np.sqrt(pops), 1e-16)], True
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    return vec[:support_size(vec)], False


def oracle_wigner(kind, xs, ps, *, n=0, r=0.0, beta=0.0, nbar=0.0, axis="p"):
    """Reference Wigner function on the grid ``xs`` x ``ps`` (rows = p)."""
    X, P = np.meshgrid(xs, ps)
    alpha = (X + 1j * P).ravel()
    state, mixed = reference_state(kind, n=n, r=r, beta=beta, nbar=nbar, axis=axis)
    ev = ParityEvaluator(evaluation_dim(state.size, 2.0 * float(np.max(np.abs(alpha)))))
    w = ev.wigner_mixed(state, alpha) if mixed else ev.wigner_pure(state, alpha)
    return w.reshape(X.shape)
