"""Classical optics of the planar cavity stack.

Layer 0 is a perfect mirror, layer 1 the cavity interior (length ``l``),
layer 2 the coupling plate (thickness ``d``) and layer 3 free space.
Natural units are used throughout (c = 1), so a propagation constant is
simply ``n(omega) * omega``.

Coefficient naming follows the convention ``r_AB`` = reflection of a wave
travelling in layer A off the structure towards layer B, ``t_AB`` =
amplitude transmission from A into B.  With that convention the
reciprocity relation reads ``t_AB * beta_B == t_BA * beta_A``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OpticalMedium",
    "VACUUM",
    "CavityGeometry",
    "StackCoefficients",
    "propagation_constant",
    "interface_coefficients",
    "stack_coefficients",
    "spectral_denominators",
]


@dataclass(frozen=True)
class OpticalMedium:
    """Passive medium with complex refractive index ``n' + i n''``.

    Either a constant ``index`` or a dispersion table ``(omega, n)``.
    Tables are interpolated linearly on the real frequency axis; for
    complex arguments the table is read at ``Re(omega)``.
    """

    index: complex = 1.0
    table_omega: tuple | None = None
    table_index: tuple | None = None

    def __post_init__(self):
        if self.table_omega is not None:
            om = np.asarray(self.table_omega, dtype=float)
            n = np.asarray(self.table_index, dtype=complex)
            if om.ndim != 1 or om.shape != n.shape or om.size < 2:
                raise ValueError("dispersion table needs matching 1-D omega/index arrays")
            if np.any(np.diff(om) <= 0):
                raise ValueError("dispersion table omega must be strictly increasing")
            values = n
        else:
            values = np.asarray([complex(self.index)])
        if np.any(values.imag < 0):
            raise ValueError("passive medium requires Im n >= 0")
        if np.any(values.real <= 0):
            raise ValueError("refractive index must have positive real part")

    @classmethod
    def from_table(cls, omega, index) -> "OpticalMedium":
        return cls(index=complex(np.asarray(index)[0]),
                   table_omega=tuple(np.asarray(omega, dtype=float)),
                   table_index=tuple(np.asarray(index, dtype=complex)))

    @property
    def dispersive(self) -> bool:
        return self.table_omega is not None

    def n(self, omega):
        """Refractive index at ``omega`` (scalar or array)."""
        if not self.dispersive:
            return np.full(np.shape(omega), complex(self.index))[()]
        w = np.real(omega)
        om = np.asarray(self.table_omega)
        n = np.asarray(self.table_index)
        if np.any(w < om[0]) or np.any(w > om[-1]):
            raise ValueError("frequency outside the dispersion table range")
        return np.interp(w, om, n.real) + 1j * np.interp(w, om, n.imag)


VACUUM = OpticalMedium(1.0)


@dataclass(frozen=True)
class CavityGeometry:
    l: float
    d: float
    medium1: OpticalMedium = VACUUM
    medium2: OpticalMedium = field(default_factory=lambda: OpticalMedium(1.5))

    def __post_init__(self):
        if not (self.l > 0 and self.d > 0):
            raise ValueError("cavity length l and plate thickness d must be positive")

    @property
    def medium3(self) -> OpticalMedium:
        return VACUUM

    # left mirror is ideal
    r10 = -1.0


def _check_frequency(omega):
    if np.any(np.real(omega) <= 0):
        raise ValueError("angular frequency must have positive real part")


def propagation_constant(medium: OpticalMedium, omega):
    """``beta = n(omega) * omega`` (c = 1)."""
    _check_frequency(omega)
    return medium.n(omega) * omega


def _fresnel(beta_a, beta_b):
    s = beta_a + beta_b
    if np.any(s == 0):
        raise ValueError("degenerate interface: beta_A + beta_B = 0")
    return (beta_a - beta_b) / s, 2.0 * beta_a / s


def interface_coefficients(medium_a: OpticalMedium, medium_b: OpticalMedium, omega):
    """Normal-incidence Fresnel pair ``(r_AB, t_AB)`` for a single interface."""
    return _fresnel(propagation_constant(medium_a, omega),
                    propagation_constant(medium_b, omega))


@dataclass(frozen=True)
class StackCoefficients:
    """Single-interface and composite coefficients at one frequency (or array)."""

    beta1: complex
    beta2: complex
    beta3: complex
    r12: complex
    r21: complex
    r23: complex
    r32: complex
    t12: complex
    t21: complex
    t23: complex
    t32: complex
    D2p: complex
    r13: complex
    r31: complex
    t13: complex
    t31: complex


def stack_coefficients(geometry: CavityGeometry, omega) -> StackCoefficients:
    """Composite plate coefficients by Airy summation over layer 2.

    The composite ``r13`` is referenced to the 1|2 interface and ``r31`` to
    the 2|3 interface; layer 1 is treated as semi-infinite here (the
    cavity round trip enters only through the spectral denominator).
    """
    b1 = propagation_constant(geometry.medium1, omega)
    b2 = propagation_constant(geometry.medium2, omega)
    b3 = propagation_constant(geometry.medium3, omega)
    r12, t12 = _fresnel(b1, b2)
    r21, t21 = _fresnel(b2, b1)
    r23, t23 = _fresnel(b2, b3)
    r32, t32 = _fresnel(b3, b2)

    ph = np.exp(1j * b2 * geometry.d)
    ph2 = ph * ph
    D2p = 1.0 - r21 * r23 * ph2
    if np.any(D2p == 0):
        raise ValueError("singular plate: Airy denominator vanishes")

    r13 = r12 + t12 * t21 * r23 * ph2 / D2p
    r31 = r32 + t32 * t23 * r21 * ph2 / D2p
    t13 = t12 * t23 * ph / D2p
    t31 = t32 * t21 * ph / D2p
    return StackCoefficients(b1, b2, b3, r12, r21, r23, r32, t12, t21, t23, t32,
                             D2p, r13, r31, t13, t31)


def spectral_denominators(geometry: CavityGeometry, omega):
    """Return ``(D1, D2')``.

    ``D1 = 1 + r13 exp(2 i beta1 l)`` (ideal left mirror) vanishes at the
    cavity resonances; ``D2' = 1 - r21 r23 exp(2 i beta2 d)`` is the plate
    round-trip denominator.
    """
    s = stack_coefficients(geometry, omega)
    D1 = 1.0 + s.r13 * np.exp(2j * s.beta1 * geometry.l)
    return D1, s.D2p
