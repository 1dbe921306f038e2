"""Classical and quantum second-order correlators."""

from .curve import ENGINE_TAGS, Gamma2Curve
from .classical import (
    MU_ZERO_TOL,
    TERM_NAMES,
    TERM_SIGNS,
    TermLedger,
    classical_gamma2_quadrature,
    classical_mc,
    classical_term_ledger,
    gamma2_gaussian_moment,
    hbt_mc,
    mc_term_estimates,
)
from .quantum import (
    AmplitudeQuartet,
    BeamsplitterSign,
    PathDelays,
    amplitude_quartet,
    coincidence_rate,
    g2_hbt_curve,
    g2_quantum_point,
    rc_from_g2_integral,
    temporal_coherence,
    two_photon_amplitude,
)
