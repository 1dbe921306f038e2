"""Gaussian spectrum functions, their Fourier transforms and coherence scales.

The amplitude spectrum is ``f(nu) = exp(-nu**2 * tau_c**2 / 4)`` in the
detuning ``nu = omega - omega_0``.  Its transform, normalised to one at zero
delay, is ``exp(-tau**2 / tau_c**2)``; with this convention the cross term of
the two-photon rate integrates to exactly ``exp(-delta**2 / tau_c**2)``.

Carrier phases are kept apart from envelopes: ``omega_0 * tau`` is of order
1e3 rad over a millimetre of path, and folding it into a complex product loses
most of the mantissa.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ParameterError

__all__ = [
    "SpectrumFunction",
    "EnvelopeValue",
    "make_gaussian_spectrum",
    "spectrum_ft",
    "coherence_scales",
]

_ENVELOPE_FLOOR = 1e-300
_TWO_PI = 2.0 * math.pi


def _require_positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value)):
        raise ParameterError(f"{name} must be a finite number, got {value!r}")
    if value <= 0:
        raise ParameterError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class SpectrumFunction:
    """Real, even amplitude spectrum of the filtered field.

    Attributes
    ----------
    center_frequency : float
        Angular centre frequency omega_0 [rad/s].
    coherence_time : float
        tau_c [s].
    shape : str
        Only ``"gaussian"`` is supported.
    """

    center_frequency: float
    coherence_time: float
    shape: str = "gaussian"

    def __post_init__(self):
        _require_positive("center_frequency", self.center_frequency)
        _require_positive("coherence_time", self.coherence_time)
        if self.shape != "gaussian":
            raise ParameterError(f"unsupported spectrum shape {self.shape!r}")

    def amplitude(self, nu):
        """Amplitude spectrum f(nu) at detuning ``nu`` [rad/s]; f(0) = 1."""
        nu = np.asarray(nu, dtype=float)
        return np.exp(-0.25 * (nu * self.coherence_time) ** 2)

    @property
    def transform_scale(self):
        """Integral of f over detuning, i.e. the raw transform at zero delay."""
        return 2.0 * math.sqrt(math.pi) / self.coherence_time

    def envelope(self, tau):
        """Normalised transform magnitude |F_tau{f}| (vectorised, real)."""
        tau = np.asarray(tau, dtype=float)
        env = np.exp(-((tau / self.coherence_time) ** 2))
        return np.where(env < _ENVELOPE_FLOOR, 0.0, env)

    def carrier_phase(self, tau):
        """Carrier phase -omega_0 * tau wrapped into (-pi, pi]."""
        return wrap_phase(-self.center_frequency * np.asarray(tau, dtype=float))


@dataclass(frozen=True)
class EnvelopeValue:
    """Transform of the spectrum at one delay, carrier kept separate.

    The full single-photon amplitude is ``value * exp(1j * carrier_phase)``.
    """

    value: complex
    carrier_phase: float

    @property
    def magnitude(self):
        return abs(self.value)

    def full(self):
        return self.value * complex(math.cos(self.carrier_phase), math.sin(self.carrier_phase))


def wrap_phase(phase):
    """Map phases into (-pi, pi]; scalars stay scalars."""
    wrapped = -np.remainder(-np.asarray(phase, dtype=float) + math.pi, _TWO_PI) + math.pi
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def make_gaussian_spectrum(omega0, tau_c):
    """Build the Gaussian spectrum with centre ``omega0`` [rad/s] and width ``tau_c`` [s]."""
    return SpectrumFunction(center_frequency=omega0, coherence_time=tau_c)


def spectrum_ft(spectrum, tau):
    """Normalised Fourier transform of ``spectrum`` at delay ``tau``.

    Returns an :class:`EnvelopeValue` with envelope ``exp(-tau**2/tau_c**2)``
    (clamped to 0 below 1e-300) and carrier phase ``-omega_0*tau mod 2pi``.
    """
    if not math.isfinite(tau):
        raise ParameterError(f"delay must be finite, got {tau!r}")
    env = float(spectrum.envelope(tau))
    return EnvelopeValue(value=complex(env, 0.0), carrier_phase=spectrum.carrier_phase(tau))


def coherence_scales(wavelength, source_diameter, distance):
    """Angular size of the source and transverse coherence length.

    Returns
    -------
    (delta_theta, l_c) : tuple of float
        ``delta_theta = diameter / distance`` [rad] and
        ``l_c = wavelength / delta_theta`` [m].
    """
    _require_positive("wavelength", wavelength)
    _require_positive("source_diameter", source_diameter)
    _require_positive("distance", distance)
    delta_theta = source_diameter / distance
    return delta_theta, wavelength / delta_theta
