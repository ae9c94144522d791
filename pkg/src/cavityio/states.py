"""Single-mode states in phase space and the output-state maps.

Conventions: ``alpha = x + i p``, vacuum ``W = (2/pi) exp(-2|alpha|^2)``,
characteristic function ``C(beta) = Tr[rho D(beta)]`` so that
``C(beta) = int d^2alpha W(alpha) exp(beta alpha* - beta* alpha)``.
``S(r)`` with ``r > 0`` squeezes p by default (``axis='p'``).

A Gaussian output map is a smoothing of the cavity Wigner function,

    W_out(alpha) = 2/(pi s) int d^2a' exp(-2|eta a' + delta - alpha|^2 / s) W(a'),

which is separable in x and p, so on a tensor grid it is two matrix
products.  The input grid is chosen per axis from the state's own scale
and the kernel width.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.ndimage import map_coordinates
from scipy.signal import fftconvolve
from scipy.special import eval_laguerre

from . import kernels

__all__ = [
    "GridSpec",
    "WignerGrid",
    "StateSpec",
    "ChannelCoupling",
    "ChannelConfig",
    "wigner_function",
    "wigner_of",
    "characteristic",
    "output_characteristic",
    "output_wigner",
    "thermal_output_wigner",
    "cat_output_wigner",
    "cat_channels",
    "fidelity_condition",
    "negativity_metrics",
    "sign_changes",
    "line_values",
    "grid_characteristic",
    "compose_loss",
]

WIGNER_BOUND = 2.0 / np.pi


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    M: int = 257
    L: float = 6.0
    center: complex = 0j

    def __post_init__(self):
        if self.M < 3:
            raise ValueError("grid needs at least 3 points per axis")
        if not self.L > 0:
            raise ValueError("grid half extent must be positive")

    @property
    def xs(self):
        return complex(self.center).real + np.linspace(-self.L, self.L, self.M)

    @property
    def ps(self):
        return complex(self.center).imag + np.linspace(-self.L, self.L, self.M)

    @property
    def spacing(self):
        return 2.0 * self.L / (self.M - 1)

    @property
    def cell_area(self):
        return self.spacing ** 2

    def expanded(self, factor=1.5):
        """Same spacing, larger extent."""
        h = self.spacing
        half = int(np.ceil(factor * self.L / h))
        return GridSpec(2 * half + 1, half * h, self.center)


@dataclass
class WignerGrid:
    center: complex
    half_extent: float
    resolution: int
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def spec(self):
        return GridSpec(self.resolution, self.half_extent, self.center)

    @property
    def xs(self):
        return self.spec.xs

    @property
    def ps(self):
        return self.spec.ps

    @property
    def cell_area(self):
        return self.spec.cell_area

    def integral(self):
        return float(np.sum(self.values) * self.cell_area)

    def max_abs(self):
        return float(np.max(np.abs(self.values)))

    def check(self, norm_tol=1e-3, bound_tol=1e-6):
        """Raise if normalisation or the single-mode bound is violated."""
        if abs(self.integral() - 1.0) > norm_tol:
            raise ValueError(f"Wigner grid integrates to {self.integral():.6f}")
        if self.max_abs() > WIGNER_BOUND + bound_tol:
            raise ValueError("Wigner grid exceeds the 2/pi bound")
        return self

    def spline(self, x, p):
        """Cubic-spline values at ``(x, p)``, zero outside the lattice."""
        x, p = np.broadcast_arrays(x, p)
        h = self.spec.spacing
        c = complex(self.center)
        ix = (x - c.real + self.half_extent) / h
        ip = (p - c.imag + self.half_extent) / h
        out = map_coordinates(self.values, [ip.ravel(), ix.ravel()], order=3,
                              mode="grid-constant", cval=0.0)
        return out.reshape(x.shape)

    def interpolator(self):
        return RegularGridInterpolator((self.ps, self.xs), self.values,
                                       bounds_error=False, fill_value=0.0)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StateSpec:
    kind: str = "vacuum"
    beta: complex = 0j
    nbar: float = 0.0
    r: float = 0.0
    n: int = 0
    grid: WignerGrid | None = None
    axis: str = "p"

    def __post_init__(self):
        if self.kind not in ("vacuum", "coherent", "thermal", "squeezed_number", "grid"):
            raise ValueError(f"unknown state kind {self.kind!r}")
        if self.nbar < 0:
            raise ValueError("mean photon number must be nonnegative")
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError("photon number n must be a nonnegative integer")
        if self.axis not in ("p", "x"):
            raise ValueError("squeezing axis must be 'p' or 'x'")
        if self.kind == "grid":
            if self.grid is None:
                raise ValueError("grid state needs a WignerGrid")
            norm = self.grid.integral()
            if not np.isfinite(norm) or abs(norm - 1.0) > 1e-3:
                raise ValueError(f"grid state is not normalised (integral {norm:.4g})")

    @classmethod
    def vacuum(cls):
        return cls("vacuum")

    @classmethod
    def coherent(cls, beta):
        return cls("coherent", beta=complex(beta))

    @classmethod
    def thermal(cls, nbar):
        return cls("thermal", nbar=float(nbar))

    @classmethod
    def squeezed_number(cls, r, n, axis="p"):
        return cls("squeezed_number", r=float(r), n=int(n), axis=axis)

    @classmethod
    def from_grid(cls, grid: WignerGrid):
        return cls("grid", grid=grid)

    @property
    def is_gaussian_channel(self):
        """Vacuum, coherent and thermal states reduce to a Gaussian kernel."""
        return self.kind in ("vacuum", "coherent", "thermal")

    @property
    def displacement(self):
        return complex(self.beta) if self.kind == "coherent" else 0j

    @property
    def variance_factor(self):
        """``2 nbar + 1`` for the Gaussian channel states."""
        return 2.0 * self.nbar + 1.0 if self.kind == "thermal" else 1.0

    def _stretch(self):
        e = np.exp(self.r)
        return (e, 1.0 / e) if self.axis == "p" else (1.0 / e, e)

    def sampling(self):
        """``(center, (Rx, Rp), (hx, hp))``: support half widths and a safe spacing."""
        if self.kind == "grid":
            g = self.grid
            h = g.spec.spacing
            return complex(g.center), (g.half_extent, g.half_extent), (h, h)
        if self.kind in ("vacuum", "coherent"):
            return self.displacement, (5.0, 5.0), (0.25, 0.25)
        if self.kind == "thermal":
            v = np.sqrt(self.variance_factor)
            return 0j, (5.0 * v, 5.0 * v), (0.25 * v, 0.25 * v)
        sx, sp = self._stretch()
        R = np.sqrt(self.n + 0.5) + 4.0
        h0 = 0.25 / np.sqrt(2 * self.n + 1)
        return 0j, (sx * R, sp * R), (sx * h0, sp * h0)

    def feature_radius(self):
        """``|beta| + e^{|r|} sqrt(2n + 1)`` for the grid-extent warning."""
        if self.kind == "grid":
            return self.grid.half_extent
        if self.kind == "thermal":
            return np.sqrt(self.variance_factor)
        return abs(self.displacement) + np.exp(abs(self.r)) * np.sqrt(2 * self.n + 1)


def wigner_function(state: StateSpec, x, p):
    """Closed-form Wigner function at points ``(x, p)``."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if state.kind in ("vacuum", "coherent"):
        b = state.displacement
        return WIGNER_BOUND * np.exp(-2.0 * ((x - b.real) ** 2 + (p - b.imag) ** 2))
    if state.kind == "thermal":
        v = state.variance_factor
        return WIGNER_BOUND / v * np.exp(-2.0 * (x * x + p * p) / v)
    if state.kind == "squeezed_number":
        sx, sp = state._stretch()
        return kernels.number_wigner(x / sx, p / sp, state.n)
    return state.grid.spline(x, p)


def wigner_of(state: StateSpec, spec: GridSpec = GridSpec()) -> WignerGrid:
    if spec.L < 1.0 + state.feature_radius() - abs(complex(spec.center)):
        warnings.warn("grid half extent may not cover the state", RuntimeWarning, stacklevel=2)
    X, P = np.meshgrid(spec.xs, spec.ps)
    return WignerGrid(complex(spec.center), spec.L, spec.M, wigner_function(state, X, P),
                      {"state": state.kind})


def characteristic(state: StateSpec, beta):
    """``C(beta) = Tr[rho D(beta)]``."""
    beta = np.asarray(beta, dtype=complex)
    b2 = np.abs(beta) ** 2
    if state.kind in ("vacuum", "coherent"):
        b0 = state.displacement
        return np.exp(-0.5 * b2 + beta * np.conj(b0) - np.conj(beta) * b0)
    if state.kind == "thermal":
        return np.exp(-(state.nbar + 0.5) * b2)
    if state.kind == "squeezed_number":
        sx, sp = state._stretch()
        # W(x, p) = W_n(x/sx, p/sp)  ->  C(u + iv) = C_n(u sp + i v sx)
        bt = beta.real * sp + 1j * beta.imag * sx
        z = np.abs(bt) ** 2
        return np.exp(-0.5 * z) * eval_laguerre(state.n, z)
    return grid_characteristic(state.grid, beta)


def grid_characteristic(grid: WignerGrid, beta):
    """Riemann-sum Fourier transform of a Wigner grid."""
    beta = np.asarray(beta, dtype=complex)
    xs, ps = grid.xs, grid.ps
    u = beta.real.ravel()
    v = beta.imag.ravel()
    # exp(beta a* - beta* a) = exp(2i (v x - u p))
    ex = np.exp(2j * np.outer(v, xs))          # (nb, M)
    ep = np.exp(-2j * np.outer(u, ps))         # (nb, M)
    vals = np.einsum("bj,ji,bi->b", ep, grid.values, ex)
    return (vals * grid.cell_area).reshape(beta.shape)


# ---------------------------------------------------------------------------
# channels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelCoupling:
    label: str
    chi: complex
    state: StateSpec = field(default_factory=StateSpec.vacuum)


@dataclass(frozen=True)
class ChannelConfig:
    """Efficiency ``eta`` plus the (input or noise) modes coupled to the output.

    ``mode`` records whether the numbers were prescribed by hand or taken
    from an extraction run.
    """

    eta: float
    couplings: tuple = ()
    mode: str = "prescribed"
    tol: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(self.couplings))
        if not 0.0 <= self.eta <= 1.0 + self.tol:
            raise ValueError("eta must lie in [0, 1]")
        if self.mode not in ("prescribed", "derived"):
            raise ValueError("mode must be 'prescribed' or 'derived'")
        total = self.eta ** 2 + sum(abs(c.chi) ** 2 for c in self.couplings)
        if total > 1.0 + self.tol:
            raise ValueError(f"sum rule violated: eta^2 + sum|chi|^2 = {total:.6f} > 1")

    @property
    def vacuum_remainder(self):
        """``1 - eta^2 - sum |chi|^2``"""
        return 1.0 - self.eta ** 2 - sum(abs(c.chi) ** 2 for c in self.couplings)

    @property
    def all_gaussian(self):
        return all(c.state.is_gaussian_channel for c in self.couplings)

    def gaussian_parameters(self):
        """Noise parameter ``s`` and displacement ``delta`` of the reduced map."""
        if not self.all_gaussian:
            raise ValueError("gaussian reduction needs vacuum/coherent/thermal channels")
        s = 1.0 - self.eta ** 2 + sum(2.0 * c.state.nbar * abs(c.chi) ** 2
                                       for c in self.couplings if c.state.kind == "thermal")
        delta = sum(np.conj(c.chi) * c.state.displacement for c in self.couplings)
        return max(s, 0.0), complex(delta)

    @classmethod
    def from_extraction(cls, result, states=None, min_abs=0.0):
        """Channels taken from an extraction result.

        ``states`` maps a channel name (``in``, ``cav``, ``+``, ``-``) to the
        StateSpec shared by all of its basis modes; missing channels are vacuum.
        """
        states = states or {}
        out = []
        for ch, vals in result.chi.items():
            st = states.get(ch, StateSpec.vacuum())
            for i, v in enumerate(vals):
                if abs(v) > min_abs:
                    out.append(ChannelCoupling(f"{ch}{i}", complex(v), st))
        return cls(float(result.eta), tuple(out), mode="derived")


def output_characteristic(C_cav, channels: ChannelConfig, beta):
    """Product formula for the output characteristic function."""
    beta = np.asarray(beta, dtype=complex)
    cav = C_cav if callable(C_cav) else (lambda b: characteristic(C_cav, b))
    out = np.exp(-0.5 * np.abs(beta) ** 2 * channels.vacuum_remainder) * cav(channels.eta * beta)
    for c in channels.couplings:
        out = out * characteristic(c.state, c.chi * beta)
    return out


# ---------------------------------------------------------------------------
# Gaussian smoothing
# ---------------------------------------------------------------------------

_GH_ORDER = 24


def _axis_nodes(center, radius, h):
    n = int(np.ceil(radius / h))
    return center + h * np.arange(-n, n + 1)


def _input_grid(state, sigma):
    c, (Rx, Rp), (hx, hp) = state.sampling()
    if state.kind == "grid":
        g = state.grid
        if min(hx, hp) <= sigma / 2.0:
            return g.xs, g.ps, hx, hp
        # narrow kernel: resample the stored lattice through its interpolator
        h = sigma / 2.0
        return (_axis_nodes(g.center.real, g.half_extent, h),
                _axis_nodes(g.center.imag, g.half_extent, h), h, h)
    hx = min(hx, sigma / 2.0)
    hp = min(hp, sigma / 2.0)
    Rx += 4.0 * sigma
    Rp += 4.0 * sigma
    return _axis_nodes(c.real, Rx, hx), _axis_nodes(c.imag, Rp, hp), hx, hp


def gaussian_smooth(state: StateSpec, eta, s, delta, xs, ps):
    """``2/(pi s) int d^2a' exp(-2|eta a' + delta - alpha|^2/s) W(a')`` on ``xs x ps``."""
    X, P = np.meshgrid(xs, ps)
    dx, dp = delta.real, delta.imag
    if eta == 0.0:
        if s <= 0:
            raise ValueError("total loss with zero noise has no Wigner function")
        return WIGNER_BOUND / s * np.exp(-2.0 * ((X - dx) ** 2 + (P - dp) ** 2) / s)
    if s <= 1e-14:
        return wigner_function(state, (X - dx) / eta, (P - dp) / eta) / eta ** 2
    sigma = np.sqrt(s / 2.0) / eta          # kernel width in a' units
    if state.kind != "grid" and sigma < 2e-3:
        t, w = np.polynomial.hermite.hermgauss(_GH_ORDER)
        cx, cp = (X - dx) / eta, (P - dp) / eta
        out = np.zeros_like(X)
        for ti, wi in zip(t, w):
            for tj, wj in zip(t, w):
                out += wi * wj * wigner_function(state, cx + sigma * ti, cp + sigma * tj)
        return out / (np.pi * eta ** 2)
    xi, pi_, hx, hp = _input_grid(state, sigma)
    Xi, Pi = np.meshgrid(xi, pi_)
    W = wigner_function(state, Xi, Pi)
    Kx = np.exp(-2.0 * (xs[:, None] - dx - eta * xi[None, :]) ** 2 / s)
    Kp = np.exp(-2.0 * (ps[:, None] - dp - eta * pi_[None, :]) ** 2 / s)
    return WIGNER_BOUND / s * hx * hp * (Kp @ W @ Kx.T)


def _boundary_mass(values, band=3):
    edge = np.concatenate([values[:band].ravel(), values[-band:].ravel(),
                           values[:, :band].ravel(), values[:, -band:].ravel()])
    return float(np.max(np.abs(edge)))


def _on_grid(fn, spec, auto_expand, meta, edge_tol=1e-6, max_expand=4):
    for _ in range(max_expand + 1):
        vals = fn(spec.xs, spec.ps)
        if not auto_expand or _boundary_mass(vals) <= edge_tol:
            break
        warnings.warn(f"output mass near the grid boundary; expanding L from {spec.L:g}",
                      RuntimeWarning, stacklevel=3)
        spec = spec.expanded()
    return WignerGrid(complex(spec.center), spec.L, spec.M, vals, dict(meta))


def output_wigner(W_cav: StateSpec, channels: ChannelConfig, spec: GridSpec = GridSpec(),
                  method="auto", auto_expand=True, max_refine=16):
    """Output Wigner function of the extracted mode.

    ``method='gaussian'`` (default for vacuum/coherent/thermal channels)
    folds all channels into one smoothing; ``method='direct'`` integrates
    over every channel state numerically (see ``_direct_output``).
    """
    if method == "auto":
        method = "gaussian" if channels.all_gaussian else "direct"
    if method == "gaussian":
        s, delta = channels.gaussian_parameters()
        fn = lambda xs, ps: gaussian_smooth(W_cav, channels.eta, s, delta, xs, ps)
        meta = {"path": "gaussian", "eta": channels.eta, "s": s,
                "delta": [delta.real, delta.imag]}
    elif method == "direct":
        meta = {"path": "direct", "eta": channels.eta}
        fn = lambda xs, ps: _direct_output(W_cav, channels, xs, ps, max_refine, meta)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _on_grid(fn, spec, auto_expand, meta)


def _lattice_weights(state: StateSpec, chi, step):
    """Channel state sampled so that its shifts ``conj(chi) zeta`` fall on a
    square lattice of spacing ``step``.

    With ``zeta = e^{i arg chi} zeta'`` the shift is ``|chi| zeta'``; the
    nodes ``zeta'`` sit on a grid of spacing ``step/|chi|`` and the weights
    are the Riemann-sum values ``W(zeta) (step/|chi|)^2``.
    """
    a = abs(chi)
    rot = chi / a
    c, (Rx, Rp), _ = state.sampling()
    R = max(Rx, Rp) + abs(c)
    J = int(np.ceil(R * a / step))
    t = (step / a) * np.arange(-J, J + 1)
    Zx, Zp = np.meshgrid(t, t)
    z = rot * (Zx + 1j * Zp)
    return wigner_function(state, z.real, z.imag) * (step / a) ** 2, J


def _direct_output(W_cav, channels, xs, ps, max_refine=16, meta=None):
    """Nested quadrature over the cavity state and each channel state.

    The vacuum remainder is a Gaussian kernel, applied exactly to the cavity
    state on a working lattice aligned with the output grid.  Each channel
    then enters as a discrete convolution: its state is sampled at spacing
    ``h/|chi|`` so every shift is a whole number of lattice steps.  The lattice
    is refined (up to ``max_refine``) until every channel state is resolved.
    A vacuum/coherent/thermal channel too narrow to resolve at that limit is
    folded into the kernel analytically; any other such channel is an error.
    """
    eta = channels.eta
    if eta == 0:
        raise ValueError("direct quadrature needs eta > 0")
    h_out = xs[1] - xs[0]
    if not np.isclose(ps[1] - ps[0], h_out):
        raise ValueError("direct quadrature needs equal x and p spacing")

    sampled, s, delta = [], channels.vacuum_remainder, 0j
    refine = 1
    for c in channels.couplings:
        if c.chi == 0:
            continue
        _, _, (hx, hp) = c.state.sampling()
        need = int(np.ceil(h_out / (abs(c.chi) * min(hx, hp))))
        if need <= max_refine:
            sampled.append(c)
            refine = max(refine, need)
        elif c.state.is_gaussian_channel:
            s += c.state.variance_factor * abs(c.chi) ** 2
            delta += np.conj(c.chi) * c.state.displacement
        else:
            raise ValueError(f"channel {c.label!r}: coupling too small to resolve on this grid")
    if s < -1e-12:
        raise ValueError("channel couplings exceed the sum rule")
    s = max(s, 0.0)
    h = h_out / refine

    kernels_ = [_lattice_weights(c.state, c.chi, h) for c in sampled]
    pad = sum(J for _, J in kernels_)
    nx = (len(xs) - 1) * refine + 1
    np_ = (len(ps) - 1) * refine + 1
    wx = xs[0] + h * np.arange(-pad, nx + pad)
    wp = ps[0] + h * np.arange(-pad, np_ + pad)
    H = gaussian_smooth(W_cav, eta, s, delta, wx, wp)
    for w, _ in kernels_:
        H = fftconvolve(H, w, mode="valid")
    if meta is not None:
        meta.update({"refine": refine, "sampled_channels": len(sampled), "s": s})
    return H[::refine, ::refine]


def thermal_output_wigner(W_cav: StateSpec, eta, noise_sum, spec: GridSpec = GridSpec(),
                          auto_expand=True):
    """Thermal-channel map evaluated by direct (non-separable) summation."""
    if noise_sum < 0:
        raise ValueError("noise_sum must be nonnegative")
    s = 1.0 - eta ** 2 + noise_sum

    def fn(xs, ps):
        X, P = np.meshgrid(xs, ps)
        if eta == 0.0 or s <= 1e-14:
            return gaussian_smooth(W_cav, eta, s, 0j, xs, ps)
        sigma = np.sqrt(s / 2.0) / eta
        xi, pi_, hx, hp = _input_grid(W_cav, sigma)
        Xi, Pi = np.meshgrid(xi, pi_)
        Wi = wigner_function(W_cav, Xi, Pi)
        keep = np.abs(Wi) > 1e-16
        vals = kernels.gauss_direct(X.ravel(), P.ravel(), Xi[keep], Pi[keep], Wi[keep],
                                    eta, s, hx * hp)
        return vals.reshape(X.shape)

    return _on_grid(fn, spec, auto_expand, {"path": "thermal", "eta": eta, "s": s})


def cat_channels(eta, chi_in, beta, noise):
    """Smoothing parameters of the two-coherent-input map: ``(s, delta)``.

    Both coherent inputs (``beta`` and ``-i beta``) couple with ``chi_in``;
    the remaining thermal modes enter only through ``noise = 2 nbar |chi|^2``.
    """
    s = 1.0 - eta ** 2 + noise
    delta = complex(beta) * chi_in * (1.0 - 1.0j)
    return s, delta


def cat_output_wigner(W_cav: StateSpec, eta, chi_in, beta, noise, spec: GridSpec = GridSpec(),
                      auto_expand=True):
    if eta == 0:
        raise ValueError("cat map needs eta > 0")
    if noise < 0:
        raise ValueError("noise must be nonnegative")
    s, delta = cat_channels(eta, chi_in, beta, noise)
    fn = lambda xs, ps: gaussian_smooth(W_cav, eta, s, delta, xs, ps)
    return _on_grid(fn, spec, auto_expand,
                    {"path": "cat", "eta": eta, "chi_in": chi_in, "s": s,
                     "delta": [delta.real, delta.imag]})


def compose_loss(W_cav: StateSpec, etas, spec: GridSpec = GridSpec()):
    """Successive pure-loss channels, each applied to the previous output grid."""
    state = W_cav
    grid = None
    for eta in etas:
        ch = ChannelConfig(float(eta), (ChannelCoupling("loss", np.sqrt(1 - eta ** 2)),))
        grid = output_wigner(state, ch, spec, auto_expand=False)
        state = StateSpec.from_grid(grid)
    return grid


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def fidelity_condition(eta, noise_sum):
    """``eta^2 / (1 - eta^2 + noise_sum)``; ``inf`` when the denominator vanishes."""
    den = 1.0 - eta ** 2 + noise_sum
    if den <= 0:
        return float("inf")
    return float(eta ** 2 / den)


def negativity_metrics(grid: WignerGrid):
    """``(min W, negative volume)``"""
    neg = np.clip(-grid.values, 0.0, None)
    return float(np.min(grid.values)), float(np.sum(neg) * grid.cell_area)


def line_values(grid: WignerGrid, start: complex, stop: complex, npts=801):
    """Values along a straight segment by bilinear interpolation."""
    t = np.linspace(0.0, 1.0, npts)
    pts = start + (stop - start) * t
    return grid.interpolator()(np.column_stack([pts.imag, pts.real]))


def sign_changes(values, tol=1e-9):
    """Number of sign changes, ignoring entries with ``|v| <= tol``."""
    v = np.asarray(values)
    v = v[np.abs(v) > tol]
    if v.size < 2:
        return 0
    return int(np.count_nonzero(np.diff(np.sign(v)) != 0))
