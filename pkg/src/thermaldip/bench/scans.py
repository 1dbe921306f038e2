"""Scan runners for the four measurement modes.

Grid coordinates are SI: seconds of delay for longitudinal scans, metres of
tip separation for transverse ones.  Rates are dimensionless: coincidences
are normalised to the uncorrelated baseline, singles to the total input
(BS2 present) or to each tip's mean intensity (direct HBT detection).
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from ..correlators import (
    classical_mc,
    classical_term_ledger,
    coincidence_rate,
    g2_hbt_curve,
    hbt_mc,
    temporal_coherence,
)
from ..errors import ConfigError, InvalidInputError
from ..fields import EnsembleSpec, mutual_coherence, vcz_degree
from ..spectral import coherence_scales, make_gaussian_spectrum
from .config import config_hash

__all__ = [
    "ScanResult",
    "DIP_ENGINES",
    "HBT_ENGINES",
    "MZ_ENGINES",
    "MU_DECOHERED",
    "scan_grid",
    "spectrum_of",
    "ensemble_of",
    "tip_coherence",
    "transverse_coherence",
    "run_dip_scan",
    "run_hbt_scan",
    "run_mach_zehnder",
    "ledger_scan",
    "add_counting_noise",
]

DIP_ENGINES = ("quantum", "classical-mc", "classical-ledger")
HBT_ENGINES = ("quantum", "classical-mc")
MZ_ENGINES = ("quantum", "classical-mc")
# |mu| below this counts as "tips outside the coherence area" for dip scans
MU_DECOHERED = 0.05


@dataclass
class ScanResult:
    """One correlation curve with its singles and provenance."""

    grid: np.ndarray
    singles_1: np.ndarray
    singles_2: np.ndarray
    joint: np.ndarray
    stderr: np.ndarray
    engine_tag: str
    config_hash: str
    n: np.ndarray
    axis: str = "longitudinal"
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        for name in ("singles_1", "singles_2", "joint", "stderr"):
            setattr(self, name, np.broadcast_to(np.asarray(getattr(self, name), dtype=float), self.grid.shape).copy())
        self.n = np.broadcast_to(np.asarray(self.n, dtype=np.int64), self.grid.shape).copy()
        if self.grid.size > 1 and np.any(np.diff(self.grid) <= 0):
            raise InvalidInputError("scan grid must be strictly increasing")


def scan_grid(cfg):
    """Grid points of ``cfg.scan`` in SI units, end point included."""
    scan = cfg.scan
    k = np.arange(scan.n_points)
    return (scan.start + scan.step * k) * scan.unit_scale


def spectrum_of(cfg):
    return make_gaussian_spectrum(cfg.filter.omega0, cfg.filter.tau_c)


def ensemble_of(cfg, per_point=None):
    """EnsembleSpec from the config's source, MC and counting sections."""
    return EnsembleSpec(
        n_realizations=cfg.mc.trials if per_point is None else per_point,
        master_seed=cfg.mc.seed,
        emission_mode=cfg.source.emission,
        pulse_fwhm=cfg.source.pulse_fwhm if cfg.source.emission == "pulsed" else None,
        n_sub_sources=cfg.mc.sub_sources,
        decorrelation_realizations_per_point=cfg.counting.integration_realizations,
    )


def _scales(cfg):
    return coherence_scales(cfg.filter.wavelength, cfg.source.diameter_mm * 1e-3, cfg.geometry.d_a_mm * 1e-3)


def transverse_coherence(cfg, dx):
    """mu at transverse separations ``dx`` [m] (vectorised)."""
    dtheta, _ = _scales(cfg)
    x = math.pi * dtheta * np.abs(np.asarray(dx, dtype=float)) / cfg.filter.wavelength
    return vcz_degree(x)


def tip_coherence(cfg):
    """mu between the tips at the configured transverse separation."""
    _, lc = _scales(cfg)
    return mutual_coherence(
        cfg.source.diameter_mm * 1e-3, cfg.geometry.d_a_mm * 1e-3, cfg.geometry.tip_sep_lc * lc, cfg.filter.wavelength
    ).mu


def _need(cond, message, key_path=None):
    if not cond:
        raise ConfigError(message, key_path=key_path)


def _meta(cfg, result):
    result.extras.setdefault("assumed", sorted(cfg.assumed))
    return result


def ledger_scan(cfg, grid=None):
    """Closed-form term ledgers over the scan grid (one TermLedger per point)."""
    spectrum = spectrum_of(cfg)
    spec = ensemble_of(cfg)
    grid = scan_grid(cfg) if grid is None else grid
    mu = tip_coherence(cfg)
    return [classical_term_ledger(spectrum, d, spec, mu=mu) for d in grid]


def run_dip_scan(cfg, engine="quantum", threads=1):
    """Joint-detection rate behind BS2 as tip A is scanned longitudinally.

    ``quantum`` evaluates the two-photon dip law with the configured gamma;
    ``classical-mc`` samples chaotic fields; ``classical-ledger`` sums the
    closed-form classical terms.
    """
    _need(engine in DIP_ENGINES, f"unknown dip engine {engine!r}")
    _need(cfg.topology.bs2, "dip scan needs bs2 = true", "[topology].bs2")
    _need(cfg.scan.axis == "longitudinal", "dip scan needs a longitudinal axis", "[scan].axis")
    mu = tip_coherence(cfg)
    _need(abs(mu) < MU_DECOHERED, f"tips are not mutually incoherent (|mu| = {abs(mu):.3g})", "[geometry].tip_sep_lc")
    grid = scan_grid(cfg)
    h = config_hash(cfg)
    if engine == "quantum":
        joint = coincidence_rate(grid, cfg.filter.tau_c, cfg.imperfection.gamma)
        return _meta(cfg, ScanResult(grid, 0.5, 0.5, joint, 0.0, "quantum_analytic", h, 0))
    if engine == "classical-ledger":
        ledgers = ledger_scan(cfg, grid)
        joint = np.array([L.total for L in ledgers])
        result = ScanResult(grid, 0.5, 0.5, joint, 0.0, "classical_analytic", h, 0)
        result.extras["ledgers"] = ledgers
        return _meta(cfg, result)
    curve = classical_mc(ensemble_of(cfg), spectrum_of(cfg), mu, grid, threads=threads)
    result = ScanResult(
        grid, curve.singles_1, curve.singles_2, curve.values, curve.stderr, "classical_mc", h, curve.n_samples
    )
    result.extras["terms"] = curve.extras["terms"]
    result.extras["terms_stderr"] = curve.extras["terms_stderr"]
    return _meta(cfg, result)


def run_hbt_scan(cfg, axis=None, engine="quantum", threads=1):
    """Direct two-detector correlation (no BS2) along ``axis``.

    Transverse scans move tip A sideways (grid in m); longitudinal scans
    delay it (grid in s) at the configured transverse separation.  The
    ``quantum`` engine gives the ensemble average ``1 + |coherence|^2``;
    ``classical-mc`` samples it, with frozen speckle when
    ``integration_realizations == 1``.
    """
    _need(engine in HBT_ENGINES, f"unknown HBT engine {engine!r}")
    _need(not cfg.topology.bs2, "HBT scan needs bs2 = false", "[topology].bs2")
    axis = axis or cfg.scan.axis
    if axis != cfg.scan.axis:
        raise ConfigError(f"config scans {cfg.scan.axis!r}, not {axis!r}", key_path="[scan].axis")
    frozen = cfg.counting.integration_realizations == 1
    _need(
        not (frozen and engine == "quantum"),
        "frozen speckle (integration_realizations = 1) needs the classical-mc engine",
        "[counting].integration_realizations",
    )
    spectrum = spectrum_of(cfg)
    grid = scan_grid(cfg)
    h = config_hash(cfg)
    if axis == "transverse":
        mu = transverse_coherence(cfg, grid)
        delays = np.zeros_like(grid)
    else:
        mu = np.full(grid.shape, tip_coherence(cfg))
        delays = grid
    coherence = np.abs(mu) * temporal_coherence(spectrum, delays)
    if engine == "quantum":
        curve = g2_hbt_curve(grid, coherence)
        return _meta(cfg, ScanResult(grid, 1.0, 1.0, curve.values, 0.0, curve.engine_tag, h, 0, axis=axis))
    curve = hbt_mc(ensemble_of(cfg), spectrum, mu, delays, grid_values=grid, threads=threads)
    result = ScanResult(grid, 1.0, 1.0, curve.values, curve.stderr, "classical_mc", h, curve.n_samples, axis=axis)
    result.extras["frozen"] = frozen
    return _meta(cfg, result)


def _coherent_mz(spectrum, grid, n_time=257):
    """Singles and two-time joint rate for a transform-limited input pulse.

    The pulse ``exp(-2 t^2/tau_c^2)`` has power spectrum ``f(nu)``, so its
    first-order coherence matches the chaotic field's.  Detector 1 takes the
    ``+`` port and is bright at zero delay.
    """
    tau_c = spectrum.coherence_time
    omega0 = spectrum.center_frequency
    s1 = np.empty(grid.shape)
    s2 = np.empty(grid.shape)
    joint = np.empty(grid.shape)
    for j, d in enumerate(grid):
        t = np.linspace(min(0.0, d) - 6 * tau_c, max(0.0, d) + 6 * tau_c, n_time)
        dt = t[1] - t[0]
        carrier = np.exp(1j * np.remainder(omega0 * d, 2 * math.pi))
        ea = np.exp(-2.0 * ((t - d) / tau_c) ** 2) * carrier
        eb = np.exp(-2.0 * (t / tau_c) ** 2)
        i1 = 0.5 * np.abs(ea + eb) ** 2
        i2 = 0.5 * np.abs(ea - eb) ** 2
        total = np.sum(np.abs(ea) ** 2 + np.abs(eb) ** 2) * dt
        w1 = np.sum(i1) * dt
        w2 = np.sum(i2) * dt
        s1[j] = w1 / total
        s2[j] = w2 / total
        joint[j] = np.sum(np.outer(i1, i2)) * dt * dt / total**2
    return s1, s2, joint


def run_mach_zehnder(cfg, engine="quantum", threads=1):
    """First-order interference with both tips inside one coherence area.

    ``joint`` is normalised by the squared total input, so an exactly
    factorising joint rate equals ``singles_1 * singles_2``.
    ``extras["factorization_residual"]`` is ``|joint - s1*s2|`` divided by
    the incoherent-baseline product 1/4.

    For the chaotic-light Monte Carlo engine the window energy itself
    fluctuates, so the raw ``<W1 W2>`` carries the delay-independent factor
    ``kappa = <W^2>/<W>^2`` (one plus the inverse mode count of the window).
    The joint reported is divided by the per-point sample ``kappa``, which
    is stored in ``extras["kappa"]``.
    """
    _need(engine in MZ_ENGINES, f"unknown Mach-Zehnder engine {engine!r}")
    _need(cfg.topology.bs2, "Mach-Zehnder needs bs2 = true", "[topology].bs2")
    _need(cfg.geometry.tip_sep_lc == 0, "Mach-Zehnder needs tip_sep_lc = 0", "[geometry].tip_sep_lc")
    _need(cfg.scan.axis == "longitudinal", "Mach-Zehnder needs a longitudinal axis", "[scan].axis")
    spectrum = spectrum_of(cfg)
    grid = scan_grid(cfg)
    h = config_hash(cfg)
    if engine == "quantum":
        s1, s2, joint = _coherent_mz(spectrum, grid)
        result = ScanResult(grid, s1, s2, joint, 0.0, "classical_analytic", h, 0)
    else:
        curve = classical_mc(ensemble_of(cfg), spectrum, 1.0, grid, threads=threads)
        # classical_mc normalises by the singles product (1/2)^2 of the total
        terms = curve.extras["terms"]
        kappa = 1.0 + terms[1] / terms[0]
        joint = 0.25 * curve.values / kappa
        result = ScanResult(
            grid, curve.singles_1, curve.singles_2, joint, 0.25 * curve.stderr / kappa, "classical_mc", h,
            curve.n_samples,
        )
        result.extras["singles_stderr"] = curve.singles_stderr
        result.extras["kappa"] = kappa
    result.extras["factorization_residual"] = np.abs(result.joint - result.singles_1 * result.singles_2) / 0.25
    result.extras["visibility"] = fringe_visibility(result.singles_1)
    return _meta(cfg, result)


def fringe_visibility(singles):
    hi, lo = float(np.max(singles)), float(np.min(singles))
    return (hi - lo) / (hi + lo)


def add_counting_noise(result, stderr, seed=0):
    """Copy of ``result`` with Gaussian counting noise of width ``stderr`` on ``joint``."""
    stderr = np.broadcast_to(np.asarray(stderr, dtype=float), result.grid.shape)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(0x6E6F697365,)))
    noisy = result.joint + stderr * rng.standard_normal(result.grid.shape)
    return replace(result, joint=noisy, stderr=stderr.copy(), extras=dict(result.extras, noised=True))
