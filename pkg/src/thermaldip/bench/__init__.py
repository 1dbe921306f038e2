"""Experiment orchestration: configuration, scan runners and dip fitting."""

from .config import (
    BenchConfig,
    config_hash,
    load_bench_config,
    parse_bench_config,
    serialize_bench_config,
)
from .fitting import FitResult, dip_model, fit_dip
from .scans import (
    DIP_ENGINES,
    HBT_ENGINES,
    MZ_ENGINES,
    ScanResult,
    add_counting_noise,
    ensemble_of,
    fringe_visibility,
    ledger_scan,
    run_dip_scan,
    run_hbt_scan,
    run_mach_zehnder,
    scan_grid,
    spectrum_of,
    tip_coherence,
    transverse_coherence,
)
