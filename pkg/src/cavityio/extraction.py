"""Quantum-state extraction from a single decaying cavity mode.

Everything lives on one quadrature grid over the mode's frequency
interval ``(omega_lo, omega_hi)``.  Plain Gauss-Legendre in omega cannot
see a Lorentzian that is 10^-4 of the interval wide, so the nodes are
Gauss-Legendre in ``u`` with ``omega = omega_k + (Gamma/2) sinh(u)``.  This
clusters about half the nodes inside a few linewidths while still
covering the tails out to the interval edges.

Kernels with a delta line (the ``in`` and ``+/-`` channels) are stored as a
smooth coefficient times ``upsilon`` plus a diagonal weight, and the delta
part is contracted analytically.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as npleg

from . import kernels
from .resonances import ResonantMode

__all__ = [
    "CHANNELS",
    "NO_OUTPUT",
    "ExtractionSettings",
    "QuadratureGrid",
    "KernelParts",
    "ExtractionResult",
    "build_grid",
    "decay_pole",
    "filter_function",
    "filter_derivative",
    "upsilon_kernel",
    "capital_F",
    "kernel_G",
    "output_mode_and_eta",
    "eta_closed_form",
    "mode_couplings",
    "extract",
    "eta_curve",
]

CHANNELS = ("in", "cav", "+", "-")


class _NoOutput:
    """Marker returned instead of an output mode when eta vanishes."""

    def __repr__(self):
        return "NO_OUTPUT"

    def __bool__(self):
        return False


NO_OUTPUT = _NoOutput()


@dataclass(frozen=True)
class ExtractionSettings:
    t0: float = 0.0
    t: float = 0.0
    delta_t: float = 0.0
    quad_order: int = 128
    basis: str = "svd"
    basis_size: int | None = None
    decay_rate: str = "closure"
    mapping: str = "sinh"

    def __post_init__(self):
        if self.t < self.t0:
            raise ValueError("observation time t must not precede t0")
        if self.delta_t < 0:
            raise ValueError("delta_t must be nonnegative")
        if self.quad_order < 16:
            raise ValueError("quad_order must be at least 16")
        if self.basis_size is not None and not 0 < self.basis_size <= self.quad_order:
            raise ValueError("basis_size must lie in [1, quad_order]")
        if self.basis not in ("svd", "legendre", "grid"):
            raise ValueError("basis must be 'svd', 'legendre' or 'grid'")
        if self.decay_rate not in ("closure", "newton"):
            raise ValueError("decay_rate must be 'closure' or 'newton'")
        if self.mapping not in ("sinh", "linear"):
            raise ValueError("mapping must be 'sinh' or 'linear'")

    @property
    def tau(self):
        """``t + delta_t - t0``"""
        return self.t + self.delta_t - self.t0

    @property
    def tau0(self):
        return self.t - self.t0


@dataclass(frozen=True)
class QuadratureGrid:
    omega: np.ndarray
    weights: np.ndarray
    x: np.ndarray          # Gauss-Legendre abscissae in [-1, 1]
    jacobian: np.ndarray   # d omega / d x at the nodes

    @property
    def size(self):
        return self.omega.size

    def inner(self, a, b):
        return np.sum(self.weights * np.conj(a) * b)

    def norm(self, a):
        return float(np.sqrt(np.sum(self.weights * np.abs(a) ** 2)))


def decay_pole(mode: ResonantMode, settings: ExtractionSettings):
    """Complex frequency used in the filter (conjugated: ``omega_k + i Gamma/2``).

    ``closure`` uses Gamma = gamma_rad + gamma_abs, the rate that appears in
    the closed-form efficiency; ``newton`` uses the located root directly.
    """
    if settings.decay_rate == "closure":
        gamma = mode.gamma_rad + mode.gamma_abs
    else:
        gamma = mode.gamma_k
    if not gamma > 0:
        raise ValueError("decay rate must be positive")
    return complex(mode.omega_k, 0.5 * gamma)


def build_grid(mode: ResonantMode, settings: ExtractionSettings) -> QuadratureGrid:
    N = settings.quad_order
    x, w = npleg.leggauss(N)
    lo, hi = mode.interval
    gamma = 2.0 * decay_pole(mode, settings).imag
    if settings.mapping == "linear":
        jac = np.full(N, 0.5 * (hi - lo))
        omega = 0.5 * (lo + hi) + jac * x
    else:
        h = 0.5 * gamma
        ua, ub = np.arcsinh((lo - mode.omega_k) / h), np.arcsinh((hi - mode.omega_k) / h)
        u = 0.5 * (ua + ub) + 0.5 * (ub - ua) * x
        omega = mode.omega_k + h * np.sinh(u)
        jac = 0.5 * (ub - ua) * h * np.cosh(u)
    inside = np.count_nonzero(np.abs(omega - mode.omega_k) <= 0.5 * gamma)
    if inside < 8:
        warnings.warn(f"only {inside} quadrature nodes inside the resonance FWHM; "
                      "increase quad_order", RuntimeWarning, stacklevel=2)
    return QuadratureGrid(omega, w * jac, x, jac)


def filter_function(mode: ResonantMode, settings: ExtractionSettings, omega):
    """``f(omega) = [e^{-i(omega - Omega*) tau} - 1]/(omega - Omega*) e^{i omega tau0}``"""
    omega = np.asarray(omega, dtype=float)
    Os = decay_pole(mode, settings)
    z = omega - Os
    return (np.exp(-1j * z * settings.tau) - 1.0) / z * np.exp(1j * omega * settings.tau0)


def filter_derivative(mode: ResonantMode, settings: ExtractionSettings, omega):
    """Analytic ``d f / d omega``."""
    omega = np.asarray(omega, dtype=float)
    Os = decay_pole(mode, settings)
    tau, tau0 = settings.tau, settings.tau0
    z = omega - Os
    e = np.exp(-1j * z * tau)
    g = (e - 1.0) / z
    dg = (-1j * tau * e * z - (e - 1.0)) / (z * z)
    ph = np.exp(1j * omega * tau0)
    return dg * ph + 1j * tau0 * g * ph


def _prefactor(mode):
    # (1/2pi) / (2 n1* l)
    return 1.0 / (2.0 * np.pi) / (2.0 * np.conj(mode.n1) * mode.length)


def upsilon_kernel(mode: ResonantMode, settings: ExtractionSettings, omega, omega_p):
    """``upsilon(omega, omega')`` with the diagonal taken as its analytic limit."""
    w, wp = np.broadcast_arrays(np.asarray(omega, dtype=float), np.asarray(omega_p, dtype=float))
    f = filter_function(mode, settings, w)
    fp = filter_function(mode, settings, wp)
    diff = w - wp
    same = diff == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (f - fp * np.exp(1j * (wp - w) * settings.delta_t)) / np.where(same, 1.0, diff)
    if np.any(same):
        lim = filter_derivative(mode, settings, w) + 1j * settings.delta_t * f
        val = np.where(same, lim, val)
    return _prefactor(mode) * val


def capital_F(mode: ResonantMode, settings: ExtractionSettings, omega):
    pre = 1j / np.sqrt(2 * np.pi) * np.sqrt(1.0 / (2.0 * np.conj(mode.n1) * mode.length))
    return pre * np.conj(mode.T_out) * filter_function(mode, settings, omega)


@dataclass(frozen=True)
class KernelParts:
    """``G(omega, omega') = smooth * upsilon(omega, omega') + delta * e^{i omega' tau0} delta(omega - omega')``"""

    channel: str
    smooth: complex
    delta: complex


def kernel_G(mode: ResonantMode, settings: ExtractionSettings, channel: str) -> KernelParts:
    to = np.conj(mode.T_out)
    if channel == "in":
        return KernelParts("in", to * np.conj(mode.T), np.conj(mode.R_out))
    if channel == "cav":
        return KernelParts("cav", to * np.conj(mode.A_cav), 0j)
    if channel == "+":
        return KernelParts("+", to * np.conj(mode.A_plus), np.conj(mode.A_plus_out))
    if channel == "-":
        return KernelParts("-", to * np.conj(mode.A_minus), np.conj(mode.A_minus_out))
    raise ValueError(f"unknown channel {channel!r}")


def kernel_G_value(mode, settings, channel, omega, omega_p):
    """Smooth part of G at points, plus the delta weight at ``omega'``."""
    parts = kernel_G(mode, settings, channel)
    smooth = parts.smooth * upsilon_kernel(mode, settings, omega, omega_p)
    dw = parts.delta * np.exp(1j * np.asarray(omega_p, dtype=float) * settings.tau0)
    return smooth, dw


def output_mode_and_eta(mode: ResonantMode, settings: ExtractionSettings, grid=None):
    grid = grid if grid is not None else build_grid(mode, settings)
    F = capital_F(mode, settings, grid.omega)
    eta = grid.norm(F)
    if eta == 0.0:
        return NO_OUTPUT, 0.0
    return F / eta, eta


def eta_closed_form(mode: ResonantMode, settings: ExtractionSettings):
    """Closed-form efficiency (returns eta, not eta squared)."""
    g = mode.gamma_rad + mode.gamma_abs
    eta2 = mode.gamma_rad_out / g * (1.0 - np.exp(-g * settings.tau))
    return float(np.sqrt(max(eta2, 0.0)))


# ---------------------------------------------------------------------------
# input bases and mode couplings
# ---------------------------------------------------------------------------

def legendre_basis(grid: QuadratureGrid, size):
    """Orthonormal polynomials in the Gauss-Legendre variable, mapped to omega."""
    size = grid.size if size is None else size
    out = np.empty((size, grid.size))
    # Bonnet recurrence on the normalised family
    p_prev = np.zeros(grid.size)
    p = np.full(grid.size, 1.0)
    for i in range(size):
        out[i] = np.sqrt(i + 0.5) * p
        p_prev, p = p, ((2 * i + 1) * grid.x * p - i * p_prev) / (i + 1)
    return out / np.sqrt(grid.jacobian)


def check_orthonormal(grid: QuadratureGrid, basis, tol=1e-8):
    b = np.asarray(basis) * np.sqrt(grid.weights)
    gram = np.conj(b) @ b.T
    err = np.max(np.abs(gram - np.eye(gram.shape[0])))
    if err > tol:
        raise ValueError(f"input basis is not orthonormal on the grid (error {err:.2e})")
    return err


def _contracted(mode, settings, grid, phi_out, channel, fgrid, fdgrid):
    """``g(omega') = int d omega phi_out*(omega) G(omega, omega')`` on the grid."""
    parts = kernel_G(mode, settings, channel)
    g = np.zeros(grid.size, dtype=complex)
    if parts.smooth != 0:
        vec = grid.weights * np.conj(phi_out)
        g += parts.smooth * _prefactor(mode) * kernels.upsilon_contract(
            grid.omega, vec, fgrid, fdgrid, settings.delta_t)
    if parts.delta != 0:
        g += parts.delta * np.exp(1j * grid.omega * settings.tau0) * np.conj(phi_out)
    return g


def _kernel_matrix(mode, settings, grid, channel, fgrid, fdgrid):
    """``M = sqrt(W) G sqrt(W)`` with the delta line on the diagonal."""
    parts = kernel_G(mode, settings, channel)
    sw = np.sqrt(grid.weights)
    M = np.zeros((grid.size, grid.size), dtype=complex)
    if parts.smooth != 0:
        U = kernels.upsilon_matrix(grid.omega, fgrid, fdgrid, settings.delta_t)
        M += parts.smooth * _prefactor(mode) * (sw[:, None] * U * sw[None, :])
    if parts.delta != 0:
        M[np.diag_indices(grid.size)] += parts.delta * np.exp(1j * grid.omega * settings.tau0)
    return M


@dataclass
class ExtractionResult:
    eta: float
    phi_out: object
    chi: dict
    residual: float
    eta_closed: float
    omega: np.ndarray
    weights: np.ndarray
    settings: ExtractionSettings
    basis: str
    singular_values: dict = field(default_factory=dict)

    @property
    def coupling_sum(self):
        return self.eta ** 2 + sum(float(np.sum(np.abs(c) ** 2)) for c in self.chi.values())

    def chi_table(self):
        rows = []
        for ch, vals in self.chi.items():
            for i, v in enumerate(vals):
                rows.append((ch, i, complex(v)))
        return rows


def mode_couplings(mode: ResonantMode, settings: ExtractionSettings, basis=None,
                   grid=None, phi_out=None, channels=CHANNELS):
    """Couplings ``chi[channel][i]`` of the input basis modes to the output mode.

    ``basis`` is ``'grid'``, ``'legendre'``, ``'svd'`` or an array of shape
    ``(n_modes, N)`` holding user functions on the quadrature nodes.
    Returns ``(chi, residual, singular_values)``.
    """
    grid = grid if grid is not None else build_grid(mode, settings)
    basis = settings.basis if basis is None else basis
    size = settings.basis_size
    if phi_out is None:
        phi_out, eta = output_mode_and_eta(mode, settings, grid)
    else:
        eta = grid.norm(capital_F(mode, settings, grid.omega))
    fgrid = filter_function(mode, settings, grid.omega)
    fdgrid = filter_derivative(mode, settings, grid.omega)
    sw = np.sqrt(grid.weights)

    chi, svals = {}, {}
    if phi_out is NO_OUTPUT:
        # no output mode: every overlap vanishes
        n = grid.size if size is None else size
        return {ch: np.zeros(n, dtype=complex) for ch in channels}, 1.0, {}

    user = None
    if not isinstance(basis, str):
        user = np.asarray(basis, dtype=complex)
        if user.ndim != 2 or user.shape[1] != grid.size:
            raise ValueError("user basis must have shape (n_modes, quad_order)")
        check_orthonormal(grid, user)
    elif basis == "legendre":
        user = legendre_basis(grid, size)
        check_orthonormal(grid, user)
    elif basis not in ("grid", "svd"):
        raise ValueError(f"unknown basis {basis!r}")

    for ch in channels:
        if basis == "svd" and user is None:
            M = _kernel_matrix(mode, settings, grid, ch, fgrid, fdgrid)
            a = sw * phi_out
            _, s, vh = np.linalg.svd(M)
            row = np.conj(a) @ M          # a^H M
            coeff = np.conj(vh) @ row     # components along right singular vectors
            n = grid.size if size is None else size
            chi[ch] = coeff[:n]
            svals[ch] = s[:n]
            continue
        g = _contracted(mode, settings, grid, phi_out, ch, fgrid, fdgrid)
        if user is None:          # grid basis: phi_i = delta_i / sqrt(w_i)
            vals = sw * g
            chi[ch] = vals if size is None else vals[:size]
        else:
            chi[ch] = user @ (grid.weights * g)
    total = eta ** 2 + sum(float(np.sum(np.abs(v) ** 2)) for v in chi.values())
    return chi, float(1.0 - total), svals


def extract(mode: ResonantMode, settings: ExtractionSettings):
    """Output mode, efficiency and couplings in one call."""
    grid = build_grid(mode, settings)
    phi, eta = output_mode_and_eta(mode, settings, grid)
    chi, residual, svals = mode_couplings(mode, settings, grid=grid, phi_out=phi)
    return ExtractionResult(eta=eta, phi_out=phi, chi=chi, residual=residual,
                            eta_closed=eta_closed_form(mode, settings),
                            omega=grid.omega, weights=grid.weights, settings=settings,
                            basis=settings.basis if isinstance(settings.basis, str) else "user",
                            singular_values=svals)


def eta_curve(mode: ResonantMode, settings: ExtractionSettings, times):
    """``(eta_quadrature, eta_closed)`` at each observation time."""
    q, c = [], []
    for t in times:
        s = ExtractionSettings(t0=settings.t0, t=float(t), delta_t=settings.delta_t,
                               quad_order=settings.quad_order, basis=settings.basis,
                               basis_size=settings.basis_size,
                               decay_rate=settings.decay_rate, mapping=settings.mapping)
        grid = build_grid(mode, s)
        q.append(output_mode_and_eta(mode, s, grid)[1])
        c.append(eta_closed_form(mode, s))
    return np.array(q), np.array(c)
