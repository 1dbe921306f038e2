"""Classical statistical intensity correlation behind a beamsplitter.

Three routes to the same quantity:

* :func:`gamma2_gaussian_moment` -- the factorised fourth moment of a
  circular Gaussian field, for two detectors looking straight at the source;
* :func:`classical_term_ledger` -- closed-form values of the eight surviving
  terms when the arms are mutually incoherent, integrated over both detection
  times;
* :func:`classical_mc` / :func:`hbt_mc` -- direct sampling of chaotic fields.

All curves are normalised by the product of mean singles the detectors would
record with incoherent inputs, which is the delta -> infinity baseline in CW.
"""

from dataclasses import dataclass
import math

import numpy as np

from ..errors import InvalidInputError, UnsupportedRegimeError
from ..fields import (
    FieldSynthesizer,
    MutualCoherence,
    RNG_BLOCK,
    detection_half_width,
    make_time_grid,
    pulse_sigma,
    run_ordered,
)
from .curve import Gamma2Curve

__all__ = [
    "MU_ZERO_TOL",
    "TERM_NAMES",
    "TERM_SIGNS",
    "TermLedger",
    "gamma2_gaussian_moment",
    "classical_term_ledger",
    "classical_gamma2_quadrature",
    "classical_mc",
    "mc_term_estimates",
    "hbt_mc",
]

# |mu| below this is treated as mutually incoherent by the ledger
MU_ZERO_TOL = 1e-2

TERM_NAMES = (
    "A11*A22",
    "A12*A21",
    "B11*B22",
    "B12*B21",
    "A11*B22",
    "A22*B11",
    "A12*B21",
    "A21*B12",
)
TERM_SIGNS = (1, 1, 1, 1, 1, 1, -1, -1)


def gamma2_gaussian_moment(gamma1_aa, gamma1_bb, gamma1_ab):
    """``G_AA G_BB + |G_AB|^2`` for a circular Gaussian field.

    Raises
    ------
    InvalidInputError
        If ``|G_AB|^2 > G_AA G_BB`` (Cauchy-Schwarz) or an intensity is negative.
    """
    g_aa = float(np.real(gamma1_aa))
    g_bb = float(np.real(gamma1_bb))
    ab2 = abs(complex(gamma1_ab)) ** 2
    if g_aa < 0 or g_bb < 0:
        raise InvalidInputError("self-coherences are intensities and must be >= 0")
    if ab2 > g_aa * g_bb * (1.0 + 1e-12) + 1e-300:
        raise InvalidInputError(
            f"|Gamma_AB|^2 = {ab2:g} exceeds Gamma_AA*Gamma_BB = {g_aa * g_bb:g}"
        )
    return g_aa * g_bb + ab2


@dataclass(frozen=True)
class TermLedger:
    """The eight integrated terms, normalised by the incoherent singles product.

    ``values[i]`` is the magnitude-with-sign contribution of ``TERM_NAMES[i]``:
    the last two already include their minus sign.
    """

    delta: float
    emission_mode: str
    values: tuple
    norm: float

    @property
    def signs(self):
        return TERM_SIGNS

    @property
    def names(self):
        return TERM_NAMES

    @property
    def total(self):
        return math.fsum(self.values)

    def as_dict(self):
        return dict(zip(TERM_NAMES, self.values))


def _check_incoherent(mu):
    mu = mu.mu if isinstance(mu, MutualCoherence) else complex(mu)
    if abs(mu) > MU_ZERO_TOL:
        raise UnsupportedRegimeError(
            f"term ledger assumes mutually incoherent arms; |mu| = {abs(mu):.3g} > {MU_ZERO_TOL}"
        )


def classical_term_ledger(spectrum, delta, spec, mu=0.0, cw_window=None):
    """Closed-form term ledger at delay ``delta``.

    Parameters
    ----------
    spectrum : SpectrumFunction
    delta : float
        Delay of arm A [s].
    spec : EnsembleSpec
        Supplies the emission mode and pulse width.
    mu : complex
        Mutual coherence of the arms; must be (numerically) zero.
    cw_window : float, optional
        Detection window for CW light.  Defaults to the Monte Carlo grid span
        so both routes integrate over the same window.
    """
    _check_incoherent(mu)
    tau_c = spectrum.coherence_time
    b = 2.0 / tau_c**2  # |g1(tau)|^2 = exp(-b tau^2)
    if spec.emission_mode == "cw":
        T = cw_window if cw_window is not None else make_time_grid(spectrum, spec).span
        energy = T
        self_pair = T * math.sqrt(math.pi / b)
        cross_pair = self_pair
    else:
        a = 1.0 / (4.0 * pulse_sigma(spec) ** 2)  # pulse amplitude exp(-a t^2)
        energy = math.sqrt(math.pi / (2.0 * a))
        self_pair = math.pi / (2.0 * math.sqrt(a * (a + b)))
        cross_pair = self_pair * math.exp(-a * delta**2)
    norm = energy**2
    raw = (
        energy**2,
        self_pair,
        energy**2,
        self_pair,
        energy**2,
        energy**2,
        -cross_pair,
        -cross_pair,
    )
    values = tuple(0.25 * v / norm for v in raw)
    return TermLedger(delta=float(delta), emission_mode=spec.emission_mode, values=values, norm=norm)


def classical_gamma2_quadrature(spectrum, delta, spec, n=513, cw_window=None):
    """Brute-force double integral of the Gaussian-moment expansion.

    Independent of the ledger's closed forms: the integrand is built pointwise
    from first-order coherence functions and summed on an ``n x n`` grid.
    Same normalisation as :func:`classical_term_ledger`.
    """
    tau_c = spectrum.coherence_time
    omega0 = spectrum.center_frequency

    def g1(tau):
        return spectrum.envelope(tau) * np.exp(-1j * np.remainder(omega0 * tau, 2 * math.pi))

    if spec.emission_mode == "cw":
        T = cw_window if cw_window is not None else make_time_grid(spectrum, spec).span
        t = np.linspace(0.0, T, n, endpoint=False)
        dt = T / n
        t1, t2 = np.meshgrid(t, t, indexing="ij")
        lag = t2 - t1

        def g1p(tau):
            # periodic window: sum of images
            return sum(g1(tau + m * T) for m in (-2, -1, 0, 1, 2))

        pa = pb = 1.0
        gA = g1p(lag)
        gB = g1p(lag)
        IA1 = IA2 = IB1 = IB2 = 1.0
        norm = T**2
    else:
        sigma = pulse_sigma(spec)
        half = 6.0 * max(tau_c, sigma) + abs(delta)
        t = np.linspace(-half, half, n)
        dt = t[1] - t[0]
        t1, t2 = np.meshgrid(t, t, indexing="ij")

        def p(x):
            return np.exp(-(x**2) / (4.0 * sigma**2))

        lag = t2 - t1
        gA = p(t1 - delta) * p(t2 - delta) * g1(lag)
        gB = p(t1) * p(t2) * g1(lag)
        IA1, IA2 = p(t1 - delta) ** 2, p(t2 - delta) ** 2
        IB1, IB2 = p(t1) ** 2, p(t2) ** 2
        energy = np.sum(p(t) ** 2) * dt
        norm = energy**2
    integrand = 0.25 * (
        IA1 * IA2 + np.abs(gA) ** 2
        + IB1 * IB2 + np.abs(gB) ** 2
        + IA1 * IB2 + IB1 * IA2
        - 2.0 * np.real(gA * np.conj(gB))
    )
    return float(np.sum(integrand) * dt * dt / norm)


def _window_mask(synth, spectrum, spec, max_delay):
    if spec.emission_mode == "cw":
        return np.ones(synth.grid.n, bool)
    half = detection_half_width(spectrum, spec, max_delay)
    return np.abs(synth.grid.times - synth.grid.center) <= half


def classical_mc(spec, spectrum, mu, delta_grid, threads=1, intensity=1.0):
    """Monte Carlo joint detection behind the second beamsplitter.

    For every realization forms ``E1 = (E_A(t - d) + E_B(t))/sqrt2`` and
    ``E2 = (E_A(t - d) - E_B(t))/sqrt2``, integrates each intensity over the
    detection window (the whole periodic grid for CW, +-6 coherence or pulse
    widths around the peak for pulses) and records the product.

    Each grid point gets its own ensemble (stream ``j``) of
    ``spec.per_point`` realizations; the ensemble sizes and draws do not
    depend on ``threads``.

    Returns
    -------
    Gamma2Curve
        ``engine_tag == "classical_mc"``; ``extras["terms"]`` and
        ``extras["terms_stderr"]`` hold per-term estimates (8 x n_points) in
        ledger order and normalisation.
    """
    delta_grid = np.asarray(delta_grid, dtype=float)
    if delta_grid.ndim != 1 or delta_grid.size == 0:
        raise InvalidInputError("delta_grid must be a non-empty 1-D sequence")
    n_per = spec.per_point
    if n_per < 2:
        raise InvalidInputError("need at least 2 realizations per point to estimate stderr")
    mu = mu.mu if isinstance(mu, MutualCoherence) else complex(mu)
    max_delay = float(np.max(np.abs(delta_grid)))
    grid = make_time_grid(spectrum, spec, max_delay=max_delay)
    synth = FieldSynthesizer(spec, spectrum, grid, intensity)
    mask = _window_mask(synth, spectrum, spec, max_delay)
    dt = grid.dt
    n_blocks = -(-n_per // RNG_BLOCK)

    def task(job):
        j, blk = job
        z1, z2 = synth.block_draws(j, blk)
        count = min(RNG_BLOCK, n_per - blk * RNG_BLOCK)
        z1, z2 = z1[:count], z2[:count]
        a, b = synth.correlate(z1, z2, mu)
        ea = synth.series(a, delta_grid[j])[:, mask]
        eb = synth.series(b, 0.0)[:, mask]
        e1 = (ea + eb) * math.sqrt(0.5)
        e2 = (ea - eb) * math.sqrt(0.5)
        w1 = np.sum(np.abs(e1) ** 2, axis=1) * dt
        w2 = np.sum(np.abs(e2) ** 2, axis=1) * dt
        wa = np.sum(np.abs(ea) ** 2, axis=1) * dt
        wb = np.sum(np.abs(eb) ** 2, axis=1) * dt
        x = np.sum(np.conj(ea) * eb, axis=1) * dt
        return np.stack([w1 * w2, w1, w2, wa, wb, np.abs(x) ** 2])

    jobs = [(j, blk) for j in range(delta_grid.size) for blk in range(n_blocks)]
    parts = run_ordered(task, jobs, threads)

    t = grid.times[mask]
    values = np.empty(delta_grid.size)
    stderr = np.empty_like(values)
    s1 = np.empty_like(values)
    s2 = np.empty_like(values)
    s_err = np.empty_like(values)
    terms = np.empty((8, delta_grid.size))
    terms_err = np.empty_like(terms)
    sqrt_n = math.sqrt(n_per)
    for j, d in enumerate(delta_grid):
        samples = np.concatenate(parts[j * n_blocks:(j + 1) * n_blocks], axis=1)
        ea_mean = np.sum(synth.mean_intensity(t - d)) * dt
        eb_mean = np.sum(synth.mean_intensity(t)) * dt
        single = 0.5 * (ea_mean + eb_mean)
        norm = single**2
        joint, w1, w2, wa, wb, x2 = samples
        values[j] = joint.mean() / norm
        stderr[j] = joint.std(ddof=1) / sqrt_n / norm
        s1[j] = w1.mean() / (2.0 * single)
        s2[j] = w2.mean() / (2.0 * single)
        s_err[j] = w1.std(ddof=1) / sqrt_n / (2.0 * single)
        terms[:, j], terms_err[:, j] = mc_term_estimates(wa, wb, x2, norm)
    return Gamma2Curve(
        delta_grid=delta_grid,
        values=values,
        stderr=stderr,
        n_samples=n_per,
        engine_tag="classical_mc",
        singles_1=s1,
        singles_2=s2,
        singles_stderr=s_err,
        extras={"terms": terms, "terms_stderr": terms_err, "grid": grid},
    )


def mc_term_estimates(wa, wb, x2, norm):
    """Ledger-ordered term estimates from per-realization arm energies.

    ``wa``/``wb`` are window energies of each arm and ``x2`` is
    ``|integral E_A* E_B dt|^2``.  Squared means use the delta method for their
    errors; variances use the spread of squared deviations.
    """
    n = wa.size
    root = math.sqrt(n)
    ma, mb = wa.mean(), wb.mean()
    sa, sb = wa.std(ddof=1) / root, wb.std(ddof=1) / root
    dev_a = (wa - ma) ** 2
    dev_b = (wb - mb) ** 2
    prod_err = math.hypot(mb * sa, ma * sb)
    vals = np.array([
        ma * ma,
        wa.var(ddof=1),
        mb * mb,
        wb.var(ddof=1),
        ma * mb,
        ma * mb,
        -x2.mean(),
        -x2.mean(),
    ])
    errs = np.array([
        2 * abs(ma) * sa,
        dev_a.std(ddof=1) / root,
        2 * abs(mb) * sb,
        dev_b.std(ddof=1) / root,
        prod_err,
        prod_err,
        x2.std(ddof=1) / root,
        x2.std(ddof=1) / root,
    ])
    return 0.25 * vals / norm, 0.25 * errs / norm


def hbt_mc(spec, spectrum, mu, delays, grid_values=None, threads=1, intensity=1.0):
    """Single-exposure intensity correlation of two detectors at the tips.

    Point ``j`` estimates ``<I_A(t0 - delays[j]) I_B(t0)>`` divided by the
    product of the known mean intensities, where ``t0`` is the pulse peak (or
    grid origin for CW) and ``mu[j]`` is the tips' mutual coherence.

    A frozen ensemble (one realization per point) reuses the same draw for
    the whole scan and reports ``stderr = nan``.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    delays = np.atleast_1d(np.asarray(delays, dtype=float))
    mu, delays = np.broadcast_arrays(mu, delays)
    if mu.size == 0:
        raise InvalidInputError("empty scan")
    grid = make_time_grid(spectrum, spec, max_delay=float(np.max(np.abs(delays))))
    synth = FieldSynthesizer(spec, spectrum, grid, intensity)
    t0 = grid.center
    n_per = spec.per_point
    frozen = spec.frozen
    n_blocks = -(-n_per // RNG_BLOCK)

    def task(job):
        j, blk = job
        z1, z2 = synth.block_draws(0 if frozen else j, blk)
        count = min(RNG_BLOCK, n_per - blk * RNG_BLOCK)
        a, b = synth.correlate(z1[:count], z2[:count], mu[j])
        ia = np.abs(synth.at(a, t0, delays[j])) ** 2
        ib = np.abs(synth.at(b, t0, 0.0)) ** 2
        return ia * ib

    jobs = [(j, blk) for j in range(mu.size) for blk in range(n_blocks)]
    parts = run_ordered(task, jobs, threads)
    values = np.empty(mu.size)
    stderr = np.empty_like(values)
    for j in range(mu.size):
        samples = np.concatenate(parts[j * n_blocks:(j + 1) * n_blocks])
        norm = synth.mean_intensity(t0 - delays[j]) * synth.mean_intensity(t0)
        values[j] = samples.mean() / norm
        stderr[j] = samples.std(ddof=1) / math.sqrt(n_per) / norm if n_per > 1 else math.nan
    grid_values = delays if grid_values is None else np.asarray(grid_values, dtype=float)
    return Gamma2Curve(
        delta_grid=grid_values,
        values=values,
        stderr=stderr,
        n_samples=n_per,
        engine_tag="classical_mc",
    )
