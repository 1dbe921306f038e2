"""Two-photon amplitude picture of the joint detection.

A joint click at (t1, t2) has four alternatives: both photons from tip A,
both from B, or one from each in two pairings.  Each alternative's amplitude
is a product of single-photon wavepacket amplitudes
``exp(-i w0 tau) * F_tau{f}``.  The two mixed pairings superpose with ``-``
behind the second beamsplitter and with ``+`` in the HBT geometry.
"""

from dataclasses import dataclass
import enum
import math

import numpy as np

from ..errors import NumericalError, ParameterError
from ..spectral import spectrum_ft, wrap_phase
from .curve import Gamma2Curve

__all__ = [
    "BeamsplitterSign",
    "PathDelays",
    "AmplitudeQuartet",
    "two_photon_amplitude",
    "amplitude_quartet",
    "g2_quantum_point",
    "coincidence_rate",
    "rc_from_g2_integral",
    "g2_hbt_curve",
    "temporal_coherence",
]


class BeamsplitterSign(enum.Enum):
    MINUS = "-"  # second beamsplitter present: antisymmetric pairing
    PLUS = "+"   # direct HBT detection: symmetric pairing

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ParameterError(f"sign must be '+' or '-', got {value!r}") from None


@dataclass(frozen=True)
class PathDelays:
    """Retarded times at the tips for one pair of detection times.

    ``tau_A1`` is the time at tip A seen by detector 1, and so on.  The scan
    delay ``delta`` enters both A paths identically.
    """

    tau_A1: float
    tau_B1: float
    tau_A2: float
    tau_B2: float
    delta: float = 0.0

    @classmethod
    def from_detection(cls, t1, t2, delta, t0_A=0.0, t0_B=0.0, path_1=0.0, path_2=0.0):
        """Build delays from detection times; ``path_j`` is the common transit to D_j."""
        return cls(
            tau_A1=t1 - t0_A - path_1 - delta,
            tau_B1=t1 - t0_B - path_1,
            tau_A2=t2 - t0_A - path_2 - delta,
            tau_B2=t2 - t0_B - path_2,
            delta=delta,
        )


@dataclass(frozen=True)
class AmplitudeQuartet:
    """Amplitudes of the four alternatives (AA, BB and the two mixed pairings)."""

    a_AA: complex
    a_BB: complex
    a_AB: complex
    a_BA: complex


def _amp(spectrum, tau_first, tau_second):
    # vectorised product of two single-photon amplitudes
    envelope = spectrum.envelope(tau_first) * spectrum.envelope(tau_second)
    phase = spectrum.carrier_phase(tau_first) + spectrum.carrier_phase(tau_second)
    return envelope * np.exp(1j * phase)


def two_photon_amplitude(spectrum, tau_first, tau_second):
    """Product of the two single-photon amplitudes at the given retarded times."""
    first = spectrum_ft(spectrum, tau_first)
    second = spectrum_ft(spectrum, tau_second)
    envelope = first.value * second.value
    phase = wrap_phase(first.carrier_phase + second.carrier_phase)
    return envelope * complex(math.cos(phase), math.sin(phase))


def amplitude_quartet(spectrum, delays):
    """Evaluate the four alternatives for ``delays`` (a :class:`PathDelays`).

    Array-valued delay fields are allowed; the quartet then holds arrays.
    """
    return AmplitudeQuartet(
        a_AA=_amp(spectrum, delays.tau_A1, delays.tau_A2),
        a_BB=_amp(spectrum, delays.tau_B1, delays.tau_B2),
        a_AB=_amp(spectrum, delays.tau_A1, delays.tau_B2),
        a_BA=_amp(spectrum, delays.tau_B1, delays.tau_A2),
    )


def g2_quantum_point(quartet, sign="-", gamma=1.0):
    """``|a_AA|^2 + |a_BB|^2 + |a_AB -/+ a_BA|^2`` (vectorised).

    ``gamma`` scales the interference part of the last term; 1 is the ideal
    formula.
    """
    s = -1.0 if BeamsplitterSign.coerce(sign) is BeamsplitterSign.MINUS else 1.0
    a_ab = np.asarray(quartet.a_AB)
    a_ba = np.asarray(quartet.a_BA)
    result = (
        np.abs(quartet.a_AA) ** 2
        + np.abs(quartet.a_BB) ** 2
        + np.abs(a_ab) ** 2
        + np.abs(a_ba) ** 2
        + 2.0 * s * gamma * np.real(np.conj(a_ab) * a_ba)
    )
    if gamma == 1.0:
        # exact form, keeps rounding symmetric with the definition
        result = np.abs(quartet.a_AA) ** 2 + np.abs(quartet.a_BB) ** 2 + np.abs(a_ab + s * a_ba) ** 2
    return result if np.ndim(result) else float(result)


def _check_gamma(gamma):
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma!r}")


def coincidence_rate(delta, tau_c, gamma=1.0):
    """Normalised coincidence rate ``1 - (gamma/2) exp(-delta^2/tau_c^2)``."""
    if not tau_c > 0:
        raise ParameterError(f"tau_c must be > 0, got {tau_c!r}")
    _check_gamma(gamma)
    delta = np.asarray(delta, dtype=float)
    out = 1.0 - 0.5 * gamma * np.exp(-((delta / tau_c) ** 2))
    return out if out.ndim else float(out)


def rc_from_g2_integral(spectrum, delta, gamma=1.0, t0_A=0.0, t0_B=0.0, n=241, rtol=1e-9):
    """Integrate the ``-`` sign two-photon rate G2(t1, t2) numerically.

    The result is divided by the integral of the four non-interfering terms,
    which is what remains as ``delta -> infinity``.  Integration runs on a
    uniform grid wide enough to hold both wavepackets (+-8 tau_c around them);
    the grid is refined once and the two answers must agree to ``rtol``.

    Raises
    ------
    NumericalError
        If refinement changes the answer by more than ``rtol``.
    """
    _check_gamma(gamma)
    tau_c = spectrum.coherence_time
    lo = min(t0_A + delta, t0_B) - 8.0 * tau_c
    hi = max(t0_A + delta, t0_B) + 8.0 * tau_c

    def integrate(points):
        t = np.linspace(lo, hi, points)
        t1, t2 = np.meshgrid(t, t, indexing="ij")
        delays = PathDelays.from_detection(t1, t2, delta, t0_A=t0_A, t0_B=t0_B)
        quartet = amplitude_quartet(spectrum, delays)
        g2 = g2_quantum_point(quartet, "-", gamma)
        baseline = (
            np.abs(quartet.a_AA) ** 2 + np.abs(quartet.a_BB) ** 2
            + np.abs(quartet.a_AB) ** 2 + np.abs(quartet.a_BA) ** 2
        )
        w = np.full(points, 1.0)
        w[0] = w[-1] = 0.5
        weights = np.outer(w, w)
        return float(np.sum(weights * g2) / np.sum(weights * baseline))

    coarse = integrate(n)
    fine = integrate(2 * n - 1)
    if not math.isfinite(fine) or abs(fine - coarse) > rtol * abs(fine):
        raise NumericalError(
            "two-photon rate integral did not converge",
            {"coarse": coarse, "fine": fine, "points": n, "window": (lo, hi)},
        )
    return fine


def temporal_coherence(spectrum, delays):
    """|g1(tau)| of the filtered field: the normalised spectrum transform."""
    return spectrum.envelope(delays)


def g2_hbt_curve(grid, coherence, engine_tag="quantum_analytic"):
    """``1 + |coherence|^2`` on ``grid``.

    ``coherence`` is an array of first-order coherence values on the grid
    (``mu(dx)`` for a transverse scan, ``|g1(tau)|`` for a longitudinal one)
    or a callable evaluated on it.
    """
    grid = np.asarray(grid, dtype=float)
    c = coherence(grid) if callable(coherence) else coherence
    c = np.broadcast_to(np.abs(np.asarray(c)), grid.shape)
    return Gamma2Curve(
        delta_grid=grid,
        values=1.0 + c**2,
        stderr=np.zeros(grid.shape),
        n_samples=0,
        engine_tag=engine_tag,
    )
