import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from thermaldip.correlators import (
    AmplitudeQuartet,
    BeamsplitterSign,
    Gamma2Curve,
    MU_ZERO_TOL,
    PathDelays,
    TERM_NAMES,
    amplitude_quartet,
    classical_gamma2_quadrature,
    classical_mc,
    classical_term_ledger,
    coincidence_rate,
    g2_hbt_curve,
    g2_quantum_point,
    gamma2_gaussian_moment,
    hbt_mc,
    rc_from_g2_integral,
    temporal_coherence,
    two_photon_amplitude,
)
from thermaldip.errors import InvalidInputError, NumericalError, ParameterError, UnsupportedRegimeError
from thermaldip.fields import EnsembleSpec, vcz_degree
from thermaldip.spectral import make_gaussian_spectrum

from conftest import FS, OMEGA_800

TAU_C = 345 * FS
CW = EnsembleSpec(2, emission_mode="cw")
PULSED = EnsembleSpec(2, emission_mode="pulsed", pulse_fwhm=200 * FS)

complexes = st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False)


# ---- Gaussian moment -------------------------------------------------------

@pytest.mark.parametrize("args, expected", [((1, 1, 1), 2.0), ((1, 1, 0), 1.0), ((1, 1, 0.5), 1.25)])
def test_gaussian_moment_examples(args, expected):
    assert gamma2_gaussian_moment(*args) == expected


def test_gaussian_moment_cauchy_schwarz():
    with pytest.raises(InvalidInputError):
        gamma2_gaussian_moment(1, 1, 1.1)
    with pytest.raises(InvalidInputError):
        gamma2_gaussian_moment(-1, 1, 0)


def test_gaussian_moment_half_against_mc(spectrum_345):
    curve = hbt_mc(EnsembleSpec(10000, master_seed=1), spectrum_345, 0.5, 0.0)
    assert abs(curve.values[0] - gamma2_gaussian_moment(1, 1, 0.5)) < 3 * curve.stderr[0]


# ---- two-photon amplitudes -------------------------------------------------

def test_two_photon_amplitude_examples(spectrum_345):
    a = two_photon_amplitude(spectrum_345, 0.0, 0.0)
    assert a == 1.0
    assert abs(two_photon_amplitude(spectrum_345, TAU_C, 0.0)) == pytest.approx(math.exp(-1), rel=1e-14)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_two_photon_phase_additive(x1, x2):
    s = make_gaussian_spectrum(OMEGA_800, TAU_C)
    t1, t2 = x1 * TAU_C, x2 * TAU_C
    a = two_photon_amplitude(s, t1, t2)
    if abs(a) < 1e-250:
        return
    expected = math.remainder(-OMEGA_800 * (t1 + t2), 2 * math.pi)
    diff = math.remainder(np.angle(a) - expected, 2 * math.pi)
    assert abs(diff) < 1e-9
    assert abs(a) == pytest.approx(math.exp(-(x1**2 + x2**2)), rel=1e-12)


def test_quartet_vectorised_matches_scalar(spectrum_345):
    rng = np.random.default_rng(1)
    t1, t2 = rng.normal(0, TAU_C, (2, 5))
    d = PathDelays.from_detection(t1, t2, 0.3 * TAU_C)
    q = amplitude_quartet(spectrum_345, d)
    for k in range(5):
        assert q.a_AB[k] == pytest.approx(two_photon_amplitude(spectrum_345, d.tau_A1[k], d.tau_B2[k]), abs=1e-12)
        assert q.a_BA[k] == pytest.approx(two_photon_amplitude(spectrum_345, d.tau_B1[k], d.tau_A2[k]), abs=1e-12)


def test_delay_enters_both_a_paths():
    d = PathDelays.from_detection(1.0, 2.0, 0.25)
    assert (d.tau_A1, d.tau_A2) == (0.75, 1.75)
    assert (d.tau_B1, d.tau_B2) == (1.0, 2.0)


# ---- quantum G2 point -----------------------------------------------------

def test_quantum_point_limits():
    a = 0.3 - 0.4j
    q = AmplitudeQuartet(a, a, a, a)
    assert g2_quantum_point(q, "-") == pytest.approx(2 * abs(a) ** 2, abs=1e-16)
    assert g2_quantum_point(q, "+") == pytest.approx(6 * abs(a) ** 2, rel=1e-15)
    assert g2_quantum_point(q, BeamsplitterSign.PLUS) == g2_quantum_point(q, "+")


def test_quantum_point_bad_sign():
    with pytest.raises(ParameterError):
        g2_quantum_point(AmplitudeQuartet(1, 1, 1, 1), "x")


@given(complexes, complexes, complexes, complexes)
def test_quantum_point_expansion(aa, bb, ab, ba):
    q = AmplitudeQuartet(aa, bb, ab, ba)
    direct = abs(ab) ** 2 + abs(ba) ** 2 - 2 * (np.conj(ab) * ba).real + abs(aa) ** 2 + abs(bb) ** 2
    assert g2_quantum_point(q, "-") == pytest.approx(direct, rel=1e-12, abs=1e-12)
    assert g2_quantum_point(q, "-") >= 0


@given(complexes, complexes, complexes, complexes)
def test_sign_flip_identity(aa, bb, ab, ba):
    q = AmplitudeQuartet(aa, bb, ab, ba)
    diff = g2_quantum_point(q, "+") - g2_quantum_point(q, "-")
    scale = max(1.0, abs(ab) * abs(ba))
    assert abs(diff - 4 * (np.conj(ab) * ba).real) <= 1e-14 * 8 * scale


def test_carrier_phases_cancel_symbolically():
    t1, t2, t0a, t0b, d, w0 = sp.symbols("t1 t2 t0A t0B delta omega0", real=True)
    tau_a1, tau_a2 = t1 - t0a - d, t2 - t0a - d
    tau_b1, tau_b2 = t1 - t0b, t2 - t0b
    # arg of conj(a_AB) * a_BA: the carrier parts of the two pairings
    phase = w0 * (tau_a1 + tau_b2) - w0 * (tau_b1 + tau_a2)
    assert sp.simplify(phase) == 0
    carrier = sp.exp(sp.I * w0 * (tau_a1 + tau_b2)) * sp.exp(-sp.I * w0 * (tau_b1 + tau_a2))
    assert sp.simplify(carrier) == 1


def test_cross_term_phase_numerically_zero(spectrum_345):
    rng = np.random.default_rng(5)
    t1, t2 = rng.uniform(-2, 2, (2, 200)) * TAU_C
    d = PathDelays.from_detection(t1, t2, 0.4 * TAU_C, t0_A=1e-12, t0_B=1e-12)
    q = amplitude_quartet(spectrum_345, d)
    cross = np.conj(q.a_AB) * q.a_BA
    assert np.max(np.abs(np.angle(cross))) < 1e-9


# ---- dip law ---------------------------------------------------------------

def test_coincidence_rate_examples():
    assert coincidence_rate(0.0, TAU_C) == 0.5
    assert coincidence_rate(1e-9, TAU_C, 0.3) == 1.0
    assert coincidence_rate(TAU_C, TAU_C) == pytest.approx(1 - 0.5 * math.exp(-1), abs=1e-15)
    assert coincidence_rate(TAU_C, TAU_C) == pytest.approx(0.81606, abs=1e-5)


@pytest.mark.parametrize("gamma", [-0.1, 1.1, math.nan])
def test_coincidence_rate_gamma_range(gamma):
    with pytest.raises(ParameterError):
        coincidence_rate(0.0, TAU_C, gamma)


@given(st.floats(0, 10), st.floats(0, 5), st.floats(0, 1))
def test_dip_shape(x, step, gamma):
    lo = coincidence_rate(x * TAU_C, TAU_C, gamma)
    hi = coincidence_rate((x + step) * TAU_C, TAU_C, gamma)
    assert coincidence_rate(-x * TAU_C, TAU_C, gamma) == lo
    assert hi >= lo
    assert lo >= coincidence_rate(0.0, TAU_C, gamma)


@pytest.mark.parametrize("x", [0, 0.5, -0.5, 1, -1, 2, -2, 4, -4])
def test_integral_closure(spectrum_345, x):
    val = rc_from_g2_integral(spectrum_345, x * TAU_C)
    assert val == pytest.approx(coincidence_rate(x * TAU_C, TAU_C), rel=1e-6)


def test_integral_examples(spectrum_345):
    assert rc_from_g2_integral(spectrum_345, 0.0) == pytest.approx(0.5, abs=1e-6)
    assert rc_from_g2_integral(spectrum_345, 2 * TAU_C) == pytest.approx(0.99084, abs=1e-5)


def test_integral_with_gamma(spectrum_345):
    for gamma in (0.0, 0.56):
        val = rc_from_g2_integral(spectrum_345, 0.5 * TAU_C, gamma=gamma)
        assert val == pytest.approx(coincidence_rate(0.5 * TAU_C, TAU_C, gamma), rel=1e-6)


def test_integral_nonconvergence_diagnostics(spectrum_345):
    with pytest.raises(NumericalError) as info:
        rc_from_g2_integral(spectrum_345, 1.3 * TAU_C, n=7)
    assert {"coarse", "fine"} <= set(info.value.diagnostics)


# ---- HBT curve -------------------------------------------------------------

def test_hbt_curve_examples(spectrum_345):
    assert g2_hbt_curve([0.0], [1.0]).values[0] == 2.0
    far = float(vcz_degree(40 * math.pi))  # mu at 40 coherence lengths
    assert g2_hbt_curve([0.0], [far]).values[0] == pytest.approx(1.0, abs=1e-3)
    c = g2_hbt_curve([TAU_C], lambda g: temporal_coherence(spectrum_345, g))
    assert c.values[0] == pytest.approx(1 + math.exp(-2), rel=1e-14)
    assert c.engine_tag == "quantum_analytic" and np.all(c.stderr == 0)


def test_curve_invariants():
    with pytest.raises(InvalidInputError):
        Gamma2Curve(np.zeros(1), np.ones(1), np.ones(1), 0, "quantum_analytic")
    with pytest.raises(InvalidInputError):
        Gamma2Curve(np.zeros(1), np.ones(1), np.zeros(1), 0, "tea_leaves")
    with pytest.raises(InvalidInputError):
        Gamma2Curve(np.zeros(1), -np.ones(1), np.zeros(1), 0, "quantum_analytic")


# ---- term ledger -----------------------------------------------------------

def test_ledger_cw_flat(spectrum_345):
    ref = classical_term_ledger(spectrum_345, 0.0, CW)
    for x in (0.3, 1, 3, 10):
        assert classical_term_ledger(spectrum_345, x * TAU_C, CW).total == ref.total
    assert ref.total == pytest.approx(1.0, abs=1e-15)


def test_ledger_cw_term_cancellation(spectrum_345):
    v = classical_term_ledger(spectrum_345, 0.0, CW).as_dict()
    assert -v["A12*B21"] == v["A12*A21"]
    assert -v["A21*B12"] == v["B12*B21"]
    assert v["A11*B22"] == v["A22*B11"] == v["A11*A22"] == v["B11*B22"]


def test_ledger_names_and_signs(spectrum_345):
    L = classical_term_ledger(spectrum_345, 0.0, PULSED)
    assert L.names == TERM_NAMES and len(L.values) == 8
    for v, s in zip(L.values, L.signs):
        assert v * s >= 0


@pytest.mark.parametrize("spec", [CW, PULSED], ids=["cw", "pulsed"])
@pytest.mark.parametrize("x", [0, 0.7, 3])
def test_ledger_matches_quadrature(spectrum_345, spec, x):
    delta = x * TAU_C
    total = classical_term_ledger(spectrum_345, delta, spec).total
    assert classical_gamma2_quadrature(spectrum_345, delta, spec) == pytest.approx(total, rel=1e-9)


def test_ledger_pulsed_closed_form_sympy():
    """Pulse-overlap integral used by the pulsed cross terms.

    With u = (t1 + t2 - delta)/2 and v = t2 - t1 (unit Jacobian) the integrand
    separates; sympy checks the exponent identity and does both integrals.
    """
    t1, t2, d, u, v = sp.symbols("t1 t2 delta u v", real=True)
    a, b = sp.symbols("a b", positive=True)
    exponent = -a * ((t1 - d) ** 2 + (t2 - d) ** 2 + t1**2 + t2**2) - b * (t2 - t1) ** 2
    separated = -a * d**2 - 4 * a * u**2 - (a + b) * v**2
    sub = {t1: u + d / 2 - v / 2, t2: u + d / 2 + v / 2}
    assert sp.expand(exponent.subs(sub) - separated) == 0
    total = (
        sp.exp(-a * d**2)
        * sp.integrate(sp.exp(-4 * a * u**2), (u, -sp.oo, sp.oo))
        * sp.integrate(sp.exp(-(a + b) * v**2), (v, -sp.oo, sp.oo))
    )
    expected = sp.pi / (2 * sp.sqrt(a * (a + b))) * sp.exp(-a * d**2)
    assert sp.simplify(total - expected) == 0


def test_ledger_rejects_coherent_arms(spectrum_345):
    with pytest.raises(UnsupportedRegimeError):
        classical_term_ledger(spectrum_345, 0.0, CW, mu=0.5)
    classical_term_ledger(spectrum_345, 0.0, CW, mu=MU_ZERO_TOL / 2)


# ---- Monte Carlo -----------------------------------------------------------

def test_classical_mc_errors(spectrum_345):
    with pytest.raises(InvalidInputError):
        classical_mc(EnsembleSpec(10), spectrum_345, 0.0, [])
    with pytest.raises(InvalidInputError):
        classical_mc(EnsembleSpec(1), spectrum_345, 0.0, [0.0])


def test_mc_matches_ledger_cw(spectrum_345):
    grid = np.array([-2, 0, 0.5, 2]) * TAU_C
    curve = classical_mc(EnsembleSpec(8000, master_seed=3), spectrum_345, 0.0, grid)
    for j, d in enumerate(grid):
        total = classical_term_ledger(spectrum_345, d, CW).total
        assert abs(curve.values[j] - total) < 3 * curve.stderr[j]
    assert np.all(np.abs(curve.singles_1 - 0.5) < 3 * curve.singles_stderr)


def test_mc_matches_ledger_pulsed_per_term(spectrum_345):
    spec = EnsembleSpec(6000, master_seed=4, emission_mode="pulsed", pulse_fwhm=200 * FS)
    grid = np.array([0, 1, 3]) * TAU_C
    curve = classical_mc(spec, spectrum_345, 0.0, grid)
    terms, errs = curve.extras["terms"], curve.extras["terms_stderr"]
    for j, d in enumerate(grid):
        ledger = classical_term_ledger(spectrum_345, d, spec)
        assert abs(curve.values[j] - ledger.total) < 3 * curve.stderr[j]
        for i in range(8):
            assert abs(terms[i, j] - ledger.values[i]) <= 3 * errs[i, j] + 1e-9


def test_mc_mach_zehnder_factorises(spectrum_345):
    grid = np.linspace(-2, 2, 9) * FS
    curve = classical_mc(EnsembleSpec(3000, master_seed=2), spectrum_345, 1.0, grid)
    kappa = 1 + curve.extras["terms"][1] / curve.extras["terms"][0]
    joint = 0.25 * curve.values / kappa
    assert np.max(np.abs(joint - curve.singles_1 * curve.singles_2)) / 0.25 < 1e-3


def test_mc_thread_independent(spectrum_345):
    grid = np.array([-1, 0, 1]) * TAU_C
    spec = EnsembleSpec(1100, master_seed=7)
    ref = classical_mc(spec, spectrum_345, 0.0, grid, threads=1)
    for threads in (4, 16):
        out = classical_mc(spec, spectrum_345, 0.0, grid, threads=threads)
        assert np.array_equal(out.values, ref.values)
        assert np.array_equal(out.extras["terms"], ref.extras["terms"])
