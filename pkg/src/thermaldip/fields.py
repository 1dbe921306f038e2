"""Chaotic (pseudo-thermal) field realizations for the Monte Carlo engines.

Each realization is a pair of baseband analytic signals at fiber tips A and B.
Per spectral mode the two tips receive circular complex Gaussian amplitudes
with covariance ``[[1, mu], [mu*, 1]]``; the time series is the superposition
of those modes weighted by the power spectrum.  The carrier ``exp(-i w0 t)`` is
not sampled; a path delay ``d`` contributes the factor ``exp(+i w0 d)``.

Random numbers are drawn in fixed blocks of :data:`RNG_BLOCK` realizations.
Block ``b`` of stream ``s`` is seeded from ``SeedSequence(master_seed,
spawn_key=(s, b))``, so the draws of one realization depend only on
``(master_seed, stream, index)`` and never on how work is split across threads.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np
from scipy import special

from .errors import InvalidInputError, ParameterError
from .spectral import SpectrumFunction, coherence_scales

__all__ = [
    "RNG_BLOCK",
    "EnsembleSpec",
    "FieldRealization",
    "MutualCoherence",
    "TimeGrid",
    "FieldSynthesizer",
    "mutual_coherence",
    "vcz_degree",
    "make_time_grid",
    "sample_pair_fields",
    "frozen_speckle_field",
    "run_ordered",
]

RNG_BLOCK = 512
# modes whose power is below this fraction of the peak are not drawn
_MODE_CUTOFF = 1e-16
_FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


@dataclass(frozen=True)
class EnsembleSpec:
    """How many realizations to draw and how the source emits.

    ``decorrelation_realizations_per_point`` stands in for the ground-glass
    rotation speed: ``None`` gives every scan point a fresh ensemble of
    ``n_realizations``; ``d > 1`` uses ``d`` fresh realizations per point;
    ``1`` freezes the speckle so every point reuses realization 0.

    ``n_sub_sources=None`` draws Gaussian amplitudes directly.  An integer
    (>= 2) sums that many unit phasors with uniform phases per mode instead.
    """

    n_realizations: int
    master_seed: int = 0
    emission_mode: str = "cw"
    pulse_fwhm: float | None = None
    n_sub_sources: int | None = None
    decorrelation_realizations_per_point: int | None = None

    def __post_init__(self):
        if int(self.n_realizations) != self.n_realizations or self.n_realizations < 1:
            raise ParameterError(f"n_realizations must be a positive integer, got {self.n_realizations!r}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ParameterError(f"master_seed must fit in 64 unsigned bits, got {self.master_seed!r}")
        if self.emission_mode not in ("cw", "pulsed"):
            raise ParameterError(f"emission_mode must be 'cw' or 'pulsed', got {self.emission_mode!r}")
        if self.emission_mode == "pulsed":
            if self.pulse_fwhm is None or not self.pulse_fwhm > 0:
                raise ParameterError("pulsed emission needs pulse_fwhm > 0")
        if self.n_sub_sources is not None and self.n_sub_sources < 2:
            raise ParameterError(f"n_sub_sources must be >= 2, got {self.n_sub_sources!r}")
        d = self.decorrelation_realizations_per_point
        if d is not None and d < 1:
            raise ParameterError(f"decorrelation_realizations_per_point must be >= 1, got {d!r}")

    @property
    def frozen(self):
        return self.decorrelation_realizations_per_point == 1

    @property
    def per_point(self):
        """Realizations averaged at each scan point."""
        d = self.decorrelation_realizations_per_point
        return self.n_realizations if d is None else d


@dataclass(frozen=True)
class MutualCoherence:
    """Complex degree of coherence between the tips, |mu| <= 1."""

    mu: complex

    def __post_init__(self):
        if abs(self.mu) > 1.0 + 1e-12:
            raise ParameterError(f"|mu| must be <= 1, got {abs(self.mu)!r}")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform periodic sample grid; ``center`` marks the pulse peak."""

    n: int
    dt: float
    center: float = 0.0

    @property
    def times(self):
        return np.arange(self.n) * self.dt

    @property
    def span(self):
        return self.n * self.dt

    @property
    def detunings(self):
        return 2.0 * math.pi * np.fft.fftfreq(self.n, self.dt)


@dataclass(frozen=True)
class FieldRealization:
    """Baseband field samples at both tips on a shared grid (carrier removed)."""

    time_grid: np.ndarray
    samples_A: np.ndarray
    samples_B: np.ndarray

    def __post_init__(self):
        if self.samples_A.shape != self.samples_B.shape or self.samples_A.shape != self.time_grid.shape:
            raise InvalidInputError("A and B samples must share the time grid")


def vcz_degree(x):
    """2 J1(x) / x with the x -> 0 limit; ``x`` may be an array."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-2
    safe = np.where(small, 1.0, x)
    # the series keeps |mu| <= 1 where 2 J1(x)/x rounds just above one
    x2 = x * x
    series = 1.0 - x2 / 8.0 + x2 * x2 / 192.0
    return np.where(small, series, 2.0 * special.j1(safe) / safe)


def mutual_coherence(source_diameter, distance, delta_rho, wavelength):
    """Van Cittert-Zernike degree of coherence of a uniform disc source.

    ``mu = 2 J1(x)/x`` with ``x = pi * dtheta * delta_rho / wavelength`` and
    ``dtheta = diameter / distance``.
    """
    dtheta, _ = coherence_scales(wavelength, source_diameter, distance)
    x = math.pi * dtheta * abs(delta_rho) / wavelength
    return MutualCoherence(complex(float(vcz_degree(x)), 0.0))


def make_time_grid(spectrum, spec, max_delay=0.0, min_span=None):
    """Grid with spacing tau_c/8.

    CW fields use the smallest power-of-two grid covering ``8 tau_c`` (and
    ``min_span``); it is periodic, so delays wrap harmlessly.  Pulsed fields
    also cover the detection window and the largest delay the caller needs,
    with the pulse peak placed mid-grid.
    """
    tau_c = spectrum.coherence_time
    dt = tau_c / 8.0
    span = 8.0 * tau_c
    if min_span is not None:
        span = max(span, min_span)
    center = 0.0
    if spec.emission_mode == "pulsed":
        half = detection_half_width(spectrum, spec, max_delay)
        span = max(span, 2.0 * (half + abs(max_delay)) + 4.0 * tau_c)
    n = 1 << max(6, math.ceil(math.log2(span / dt - 1e-9)))
    if spec.emission_mode == "pulsed":
        center = (n // 2) * dt
    return TimeGrid(n=n, dt=dt, center=center)


def pulse_sigma(spec):
    """Intensity standard deviation of the Gaussian pulse (None for CW)."""
    if spec.emission_mode != "pulsed":
        return None
    return spec.pulse_fwhm * _FWHM_TO_SIGMA


def detection_half_width(spectrum, spec, max_delay=0.0):
    """Half width of the pulsed detection window around the pulse peak."""
    sigma = pulse_sigma(spec) or 0.0
    return 6.0 * max(spectrum.coherence_time, sigma) + abs(max_delay)


class FieldSynthesizer:
    """Draws spectral amplitudes and turns them into tip time series.

    Parameters
    ----------
    spec : EnsembleSpec
    spectrum : SpectrumFunction
    grid : TimeGrid
    intensity : float
        Mean intensity at each tip (pulse peak for pulsed emission).
    """

    def __init__(self, spec, spectrum, grid, intensity=1.0):
        self.spec = spec
        self.spectrum = spectrum
        self.grid = grid
        self.intensity = float(intensity)
        nu = grid.detunings
        # power spectrum is f(nu) itself, so that g1(tau) = exp(-tau^2/tau_c^2)
        power = spectrum.amplitude(nu)
        self.modes = np.flatnonzero(power > _MODE_CUTOFF * power.max())
        weights = power[self.modes]
        self.weights = weights / weights.sum()
        self.nu = nu[self.modes]
        self.sqrt_w = np.sqrt(self.weights * self.intensity)
        sigma = pulse_sigma(spec)
        self._pulse_a = None if sigma is None else 1.0 / (4.0 * sigma**2)

    @property
    def n_modes(self):
        return self.modes.size

    # ---- random draws -------------------------------------------------

    def block_draws(self, stream, block):
        """Unit circular Gaussian pairs ``(z1, z2)``, each shaped (RNG_BLOCK, n_modes)."""
        seq = np.random.SeedSequence(int(self.spec.master_seed), spawn_key=(int(stream), int(block)))
        rng = np.random.Generator(np.random.Philox(seq))
        k = self.n_modes
        if self.spec.n_sub_sources is None:
            x = rng.standard_normal((RNG_BLOCK, 4, k))
            x *= math.sqrt(0.5)
            z1 = x[:, 0] + 1j * x[:, 1]
            z2 = x[:, 2] + 1j * x[:, 3]
            return z1, z2
        m = self.spec.n_sub_sources
        phases = rng.uniform(0.0, 2.0 * math.pi, size=(RNG_BLOCK, 2, k, m))
        sums = np.exp(1j * phases).sum(axis=-1) / math.sqrt(m)
        return sums[:, 0], sums[:, 1]

    def draws(self, stream, indices):
        """Draws for arbitrary realization indices of one stream."""
        indices = np.asarray(indices, dtype=np.int64)
        z1 = np.empty((indices.size, self.n_modes), complex)
        z2 = np.empty_like(z1)
        blocks = indices // RNG_BLOCK
        for b in np.unique(blocks):
            sel = blocks == b
            zb1, zb2 = self.block_draws(stream, b)
            z1[sel] = zb1[indices[sel] % RNG_BLOCK]
            z2[sel] = zb2[indices[sel] % RNG_BLOCK]
        return z1, z2

    @staticmethod
    def correlate(z1, z2, mu):
        """Tip amplitudes with <a* b> = mu per mode; ``mu`` may broadcast per row."""
        mu = np.asarray(mu, dtype=complex)
        if mu.ndim == 1:
            mu = mu[:, None]
        a = z1
        b = mu * z1 + np.sqrt(np.maximum(0.0, 1.0 - np.abs(mu) ** 2)) * z2
        return a, b

    # ---- synthesis -----------------------------------------------------

    def pulse(self, t):
        """Pulse amplitude envelope (1 at the peak); ones for CW."""
        t = np.asarray(t, dtype=float)
        if self._pulse_a is None:
            return np.ones_like(t)
        return np.exp(-self._pulse_a * (t - self.grid.center) ** 2)

    def carrier(self, delay):
        """exp(+i w0 delay) per delay, reduced before exponentiation."""
        phase = np.remainder(self.spectrum.center_frequency * np.asarray(delay, dtype=float), 2.0 * math.pi)
        return np.exp(1j * phase)

    def series(self, amps, delay=0.0):
        """Field ``E(t - delay)`` on the grid for rows of spectral amplitudes.

        ``delay`` is a scalar or one value per row.
        """
        amps = np.atleast_2d(amps)
        delay = np.broadcast_to(np.asarray(delay, dtype=float), (amps.shape[0],))
        shift = np.exp(1j * np.outer(delay, self.nu))
        full = np.zeros((amps.shape[0], self.grid.n), complex)
        full[:, self.modes] = amps * self.sqrt_w * shift
        env = np.fft.fft(full, axis=1)
        out = env * self.carrier(delay)[:, None]
        if self._pulse_a is not None:
            out *= self.pulse(self.grid.times[None, :] - delay[:, None])
        return out

    def at(self, amps, t, delay=0.0):
        """Field ``E(t - delay)`` at a single time ``t`` for each row."""
        amps = np.atleast_2d(amps)
        delay = np.broadcast_to(np.asarray(delay, dtype=float), (amps.shape[0],))
        phase = np.exp(-1j * np.outer(t - delay, self.nu))
        val = (amps * self.sqrt_w * phase).sum(axis=1) * self.carrier(delay)
        if self._pulse_a is not None:
            val = val * self.pulse(t - delay)
        return val

    def mean_intensity(self, t):
        """Ensemble-mean intensity at time(s) ``t`` (known, not estimated)."""
        return self.intensity * self.pulse(t) ** 2


def _check_index(spec, realization_index):
    if not 0 <= realization_index < spec.n_realizations:
        raise InvalidInputError(
            f"realization_index {realization_index} out of range [0, {spec.n_realizations})"
        )


def sample_pair_fields(spec, spectrum, mu, realization_index, stream=0, grid=None, intensity=1.0):
    """One realization of the tip fields, determined by seed, stream and index.

    Parameters
    ----------
    spec : EnsembleSpec
    spectrum : SpectrumFunction
    mu : MutualCoherence or complex
    realization_index : int
        Must satisfy ``0 <= realization_index < spec.n_realizations``.
    stream : int
        Independent ensemble label; scans use one stream per point.
    """
    _check_index(spec, realization_index)
    mu = mu.mu if isinstance(mu, MutualCoherence) else complex(mu)
    if grid is None:
        grid = make_time_grid(spectrum, spec)
    synth = FieldSynthesizer(spec, spectrum, grid, intensity)
    z1, z2 = synth.draws(stream, [realization_index])
    a, b = synth.correlate(z1, z2, mu)
    return FieldRealization(
        time_grid=grid.times,
        samples_A=synth.series(a)[0],
        samples_B=synth.series(b)[0],
    )


def frozen_speckle_field(spec, spectrum, mu, scan_index=0, grid=None, intensity=1.0):
    """Field seen at scan point ``scan_index`` with the ground glass at rest.

    Every scan point reuses realization 0 of stream 0; only ``mu`` changes.
    """
    if not spec.frozen:
        raise ParameterError("frozen_speckle_field needs decorrelation_realizations_per_point == 1")
    if scan_index < 0:
        raise InvalidInputError(f"scan_index must be >= 0, got {scan_index}")
    return sample_pair_fields(spec, spectrum, mu, 0, stream=0, grid=grid, intensity=intensity)


def run_ordered(fn, tasks, threads=1):
    """Apply ``fn`` to ``tasks`` and return results in task order.

    Ordering, not scheduling, decides every downstream reduction, so output is
    identical for any ``threads``.
    """
    tasks = list(tasks)
    if threads is None or threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, tasks))
