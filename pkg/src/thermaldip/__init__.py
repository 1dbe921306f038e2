"""Simulation of two-photon interference of chaotic light: HBT peak and anti-correlation dip."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    FitError,
    InvalidInputError,
    NumericalError,
    ParameterError,
    ThermalDipError,
    UnsupportedRegimeError,
)
from .spectral import EnvelopeValue, SpectrumFunction, coherence_scales, make_gaussian_spectrum, spectrum_ft
