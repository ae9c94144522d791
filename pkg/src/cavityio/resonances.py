"""Complex resonances of the cavity and their input/output couplings.

Resonances are the zeros of ``D1(Omega) = 1 + r13(Omega) exp(2 i beta1 l)``
in the lower half plane.  The k-th zero is characterised by the winding
number of the round-trip phase, which is what the solver iterates on:

    h_k(Omega) = 2 i beta1 l + log(-r13) - 2 pi i k = 0

with the branch of ``arg(-r13)`` kept continuous from the starting point.
For a strongly dispersive plate this labelling is much more robust than
plain Newton on D1, which happily jumps to a neighbouring k or to the
unphysical sheet.  The log-form root is afterwards polished on D1 itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .optics import CavityGeometry, stack_coefficients

__all__ = [
    "ResonanceError",
    "ResonantMode",
    "Couplings",
    "locate_resonances",
    "locate_resonance",
    "mode_profile",
    "noise_normalizations",
    "coupling_constants",
    "decay_decomposition",
]

CHANNELS = ("cav", "+", "-")


class ResonanceError(RuntimeError):
    """Root search failed; ``last_iterate`` holds the final Omega tried."""

    def __init__(self, message, k=None, last_iterate=None):
        super().__init__(message)
        self.k = k
        self.last_iterate = last_iterate


@dataclass(frozen=True)
class Couplings:
    T: complex
    A_plus: complex
    A_minus: complex
    A_cav: complex
    T_out: complex
    A_plus_out: complex
    A_minus_out: complex
    R_out: complex


@dataclass(frozen=True)
class ResonantMode:
    k: int
    omega_k: float
    gamma_k: float
    Omega_k: complex
    interval: tuple
    T: complex
    A_plus: complex
    A_minus: complex
    A_cav: complex
    T_out: complex
    A_plus_out: complex
    A_minus_out: complex
    R_out: complex
    gamma_rad: float
    gamma_rad_out: float
    gamma_abs: float
    gamma_lambda: dict = field(default_factory=dict)
    closure_residual: float = float("nan")
    linewidth_ratio: float = float("nan")
    valid: bool = True
    residual_D1: float = float("nan")
    length: float = 1.0
    n1: complex = 1.0

    @property
    def delta_omega(self):
        return self.interval[1] - self.interval[0]

    def to_dict(self):
        """JSON-ready dict; complex values become ``[re, im]``."""
        def enc(v):
            if isinstance(v, (complex, np.complexfloating)):
                return [float(v.real), float(v.imag)]
            if isinstance(v, (np.bool_, bool)):
                return bool(v)
            if isinstance(v, (np.floating, float)):
                return float(v)
            if isinstance(v, (np.bool_, bool)):
                return bool(v)
            if isinstance(v, tuple):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {key: enc(x) for key, x in v.items()}
            return v
        names = ("k", "omega_k", "gamma_k", "Omega_k", "interval", "T", "A_plus",
                 "A_minus", "A_cav", "T_out", "A_plus_out", "A_minus_out", "R_out",
                 "gamma_rad", "gamma_rad_out", "gamma_abs", "gamma_lambda",
                 "closure_residual", "linewidth_ratio", "valid", "residual_D1",
                 "length", "n1")
        return {n: enc(getattr(self, n)) for n in names}


# ---------------------------------------------------------------------------
# root search
# ---------------------------------------------------------------------------

def _D1(geometry, omega):
    s = stack_coefficients(geometry, omega)
    return 1.0 + s.r13 * np.exp(2j * s.beta1 * geometry.l)


def _initial_guess(geometry, k, omega_est=None):
    n1 = geometry.medium1.n(omega_est if omega_est is not None else 1.0)
    if geometry.medium1.dispersive and omega_est is None:
        # iterate the empty-cavity estimate once through the table
        om = geometry.medium1.table_omega
        n1 = geometry.medium1.n(np.clip(k * np.pi / geometry.l, om[0], om[-1]))
    return complex(k * np.pi / (np.real(n1) * geometry.l))


def _muller(fun, x0, x1, x2, tol, max_iter):
    f0, f1, f2 = fun(x0), fun(x1), fun(x2)
    for _ in range(max_iter):
        h1, h2 = x1 - x0, x2 - x1
        d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = np.sqrt(b * b - 4 * f2 * a)
        den = b + disc if abs(b + disc) > abs(b - disc) else b - disc
        if den == 0:
            break
        step = -2 * f2 / den
        x0, x1, x2 = x1, x2, x2 + step
        f0, f1, f2 = f1, f2, fun(x2)
        if abs(step) < tol * abs(x2):
            return x2, True
    return x2, False


def locate_resonance(geometry: CavityGeometry, k: int, tol=1e-10, max_iter=100,
                     omega_est=None):
    """Complex root ``Omega_k`` of D1 with winding label ``k``."""
    if k < 1:
        raise ValueError("mode index k must be >= 1")
    w = _initial_guess(geometry, k, omega_est)
    if stack_coefficients(geometry, w.real).r13 == 0:
        raise ResonanceError(f"resonance k={k}: the plate does not reflect", k=k, last_iterate=w)
    ref = np.angle(-stack_coefficients(geometry, w.real).r13)

    def h(W):
        s = stack_coefficients(geometry, W)
        m = -s.r13
        if m == 0:
            raise ResonanceError(f"resonance k={k}: the plate does not reflect", k=k,
                                 last_iterate=W)
        ph = ref + np.angle(m * np.exp(-1j * ref))
        return 2j * s.beta1 * geometry.l + np.log(abs(m)) + 1j * ph - 2j * np.pi * k

    converged = False
    for _ in range(max_iter):
        e = 1e-6 * abs(w)
        dh = (h(w + e) - h(w - e)) / (2 * e)
        if dh == 0 or not np.isfinite(dh):
            break
        step = h(w) / dh
        # damping: never move by more than a quarter of the mode spacing
        cap = 0.25 * np.pi / (np.real(geometry.medium1.n(w.real)) * geometry.l)
        if abs(step) > cap:
            step *= cap / abs(step)
        w = w - step
        if not np.isfinite(w):
            break
        if abs(step) < 1e-15 * abs(w):
            converged = True
            break

    def d1(W):
        return _D1(geometry, W)

    if converged:
        # polish on D1 itself (a couple of secant/Newton steps)
        for _ in range(5):
            e = 1e-6 * abs(w)
            der = (d1(w + e) - d1(w - e)) / (2 * e)
            if der == 0:
                break
            step = d1(w) / der
            w = w - step
            if abs(step) < 1e-16 * abs(w):
                break
    if not converged or abs(d1(w)) >= tol:
        delta = 1e-3 * abs(w)
        w2, ok = _muller(d1, w - delta, w + delta, w, 1e-15, max_iter)
        if ok and abs(d1(w2)) < tol:
            w, converged = w2, True
        elif abs(d1(w)) >= tol:
            raise ResonanceError(f"resonance k={k} did not converge", k=k, last_iterate=w)
    if w.imag >= 0:
        raise ResonanceError(f"resonance k={k} has Im Omega >= 0 (non-decaying root)",
                             k=k, last_iterate=w)
    return complex(w)


def locate_resonances(geometry: CavityGeometry, k_range, tol=1e-10, max_iter=100,
                      validity_threshold=0.1, omega_est=None):
    """Locate modes for every ``k`` in ``k_range`` and fill their couplings.

    ``k_range`` is any iterable of positive integers (e.g. ``range(10, 15)``).
    The neighbours ``k - 1`` and ``k + 1`` needed for the integration
    interval are solved internally; for ``k = 1`` the lower neighbour is the
    zero frequency.
    """
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise ValueError("k_range is empty")
    roots = {}

    def root(k):
        if k not in roots:
            roots[k] = locate_resonance(geometry, k, tol=tol, max_iter=max_iter,
                                        omega_est=omega_est)
        return roots[k]

    modes = []
    for k in ks:
        W = root(k)
        lo = 0.0 if k == 1 else root(k - 1).real
        hi = root(k + 1).real
        interval = (0.5 * (lo + W.real), 0.5 * (W.real + hi))
        modes.append(_build_mode(geometry, k, W, interval, validity_threshold))
    modes.sort(key=lambda m: m.omega_k)
    return modes


def _build_mode(geometry, k, W, interval, validity_threshold):
    wk = float(W.real)
    gk = float(-2.0 * W.imag)
    c = coupling_constants(geometry, wk)
    rates = _rates(geometry, wk, c)
    closure = abs(gk - rates["gamma_rad"] - rates["gamma_abs"]) / gk
    ratio = gk / (interval[1] - interval[0])
    return ResonantMode(
        k=k, omega_k=wk, gamma_k=gk, Omega_k=complex(W), interval=interval,
        T=c.T, A_plus=c.A_plus, A_minus=c.A_minus, A_cav=c.A_cav,
        T_out=c.T_out, A_plus_out=c.A_plus_out, A_minus_out=c.A_minus_out, R_out=c.R_out,
        gamma_rad=rates["gamma_rad"], gamma_rad_out=rates["gamma_rad_out"],
        gamma_abs=rates["gamma_abs"], gamma_lambda=rates["gamma_lambda"],
        closure_residual=float(closure), linewidth_ratio=float(ratio),
        valid=bool(ratio <= validity_threshold),
        residual_D1=float(abs(_D1(geometry, W))),
        length=float(geometry.l), n1=complex(geometry.medium1.n(wk)),
    )


# ---------------------------------------------------------------------------
# couplings
# ---------------------------------------------------------------------------

def mode_profile(mode: ResonantMode, geometry: CavityGeometry, z):
    """``i sqrt(omega_k / (eps1 l)) sin(beta1(omega_k) z)`` for 0 <= z <= l."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > geometry.l):
        raise ValueError("z must lie inside the cavity layer [0, l]")
    n1 = geometry.medium1.n(mode.omega_k)
    b1 = n1 * mode.omega_k
    return 1j * np.sqrt(mode.omega_k / (n1 * n1 * geometry.l)) * np.sin(b1 * z)


def noise_normalizations(geometry: CavityGeometry, omega):
    """``(alpha_cav, alpha_plus, alpha_minus)`` at real ``omega``.

    A lossless medium gives ``inf`` (no noise channel).
    """
    omega = float(omega)
    if omega <= 0:
        raise ValueError("noise normalizations need a positive real frequency")
    n1 = complex(geometry.medium1.n(omega))
    n2 = complex(geometry.medium2.n(omega))
    l, d = geometry.l, geometry.d

    if n1.imag == 0:
        a_cav = np.inf
    else:
        b1 = n1 * omega
        rad = n1.real * np.sinh(2 * b1.imag * l) - n1.imag * np.sin(2 * b1.real * l)
        assert rad > 0, "negative radicand in alpha_cav"
        a_cav = 2 * np.sqrt(2) * abs(n1) / np.sqrt(rad)

    if n2.imag == 0:
        a_p = a_m = np.inf
    else:
        b2 = n2 * omega
        x_r, x_i = b2.real * d, b2.imag * d
        pre = abs(n2) * np.exp(x_i / 2)
        rp = n2.real * np.sinh(x_i) + n2.imag * np.sin(x_r)
        rm = n2.real * np.sinh(x_i) - n2.imag * np.sin(x_r)
        assert rp > 0 and rm > 0, "negative radicand in alpha_pm"
        a_p, a_m = pre / np.sqrt(rp), pre / np.sqrt(rm)
    return float(a_cav), float(a_p), float(a_m)


def coupling_constants(geometry: CavityGeometry, omega) -> Couplings:
    """Inward and outward coupling functions at real ``omega`` (n3 = 1)."""
    omega = float(getattr(omega, "omega_k", omega))
    s = stack_coefficients(geometry, omega)
    n1 = complex(geometry.medium1.n(omega))
    l, d = geometry.l, geometry.d
    a_cav, a_p, a_m = noise_normalizations(geometry, omega)
    e1 = np.exp(1j * s.beta1 * l)
    e2 = np.exp(1j * s.beta2 * d)
    sq = np.sqrt(n1)

    T = -s.t31 * sq * e1
    if np.isinf(a_p):
        A_p = A_m = Ao_p = Ao_m = 0j
    else:
        A_p = -s.t21 * sq / (s.D2p * a_p) * (s.r23 * e2 + 1.0) * e1
        A_m = -s.t21 * sq / (s.D2p * a_m) * (s.r23 * e2 - 1.0) * e1
        Ao_p = s.t23 / s.D2p * (1.0 + s.r21 * e2) / a_p
        Ao_m = s.t23 / s.D2p * (1.0 - s.r21 * e2) / a_m
    A_cav = 0j if np.isinf(a_cav) else -4j * sq / a_cav
    T_out = s.t13 / sq * e1
    return Couplings(complex(T), complex(A_p), complex(A_m), complex(A_cav),
                     complex(T_out), complex(Ao_p), complex(Ao_m), complex(s.r31))


def _rates(geometry, omega_k, c: Couplings):
    pre = 1.0 / (2.0 * abs(complex(geometry.medium1.n(omega_k))) * geometry.l)
    lam = {"cav": pre * abs(c.A_cav) ** 2,
           "+": pre * abs(c.A_plus) ** 2,
           "-": pre * abs(c.A_minus) ** 2}
    return {"gamma_rad": pre * abs(c.T) ** 2,
            "gamma_rad_out": pre * abs(c.T_out) ** 2,
            "gamma_abs": sum(lam.values()),
            "gamma_lambda": lam}


def decay_decomposition(mode: ResonantMode, geometry: CavityGeometry):
    """Recompute ``(gamma_rad, gamma_abs, gamma_lambda, gamma_rad_out, closure)``."""
    c = coupling_constants(geometry, mode.omega_k)
    r = _rates(geometry, mode.omega_k, c)
    closure = abs(mode.gamma_k - r["gamma_rad"] - r["gamma_abs"]) / mode.gamma_k
    return r["gamma_rad"], r["gamma_abs"], r["gamma_lambda"], r["gamma_rad_out"], closure
