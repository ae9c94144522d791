"""Quasimode description of a leaky planar cavity: resonances, output-mode
extraction and Wigner-function transfer through the mirror."""
from .optics import CavityGeometry, OpticalMedium, VACUUM, spectral_denominators
from .resonances import (ResonanceError, ResonantMode, coupling_constants,
                         decay_decomposition, locate_resonance, locate_resonances)
from .extraction import ExtractionSettings, extract, eta_curve
from .states import (ChannelConfig, ChannelCoupling, GridSpec, StateSpec, WignerGrid,
                     cat_output_wigner, output_wigner, wigner_of)

__version__ = "0.1.0"
