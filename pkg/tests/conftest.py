import math

import pytest

from thermaldip.bench import parse_bench_config
from thermaldip.spectral import make_gaussian_spectrum

C = 299_792_458.0
OMEGA_800 = 2 * math.pi * C / 800e-9
FS = 1e-15


@pytest.fixture
def spectrum_345():
    return make_gaussian_spectrum(OMEGA_800, 345 * FS)


def bench_text(emission="cw", tau_c=345, tip_sep=40, bs2=True, axis="longitudinal",
               start=-1500, stop=1500, step=100, trials=2000, seed=0, gamma=None,
               integration=None, pulse=200):
    unit = "fs" if axis == "longitudinal" else "um"
    lines = [
        "[source]",
        f"emission = {emission}",
        f"pulse_fwhm_fs = {pulse}",
        "[filter]",
        f"tau_c_fs = {tau_c}",
        "lambda0_nm = 800",
        "[geometry]",
        f"tip_sep_lc = {tip_sep}",
        "[topology]",
        f"bs2 = {'true' if bs2 else 'false'}",
        "[scan]",
        f"axis = {axis}",
        f"from_{unit} = {start}",
        f"to_{unit} = {stop}",
        f"step_{unit} = {step}",
        "[mc]",
        f"trials = {trials}",
        f"seed = {seed}",
    ]
    if gamma is not None:
        lines += ["[imperfection]", f"gamma = {gamma}"]
    if integration is not None:
        lines += ["[counting]", f"integration_realizations = {integration}"]
    return "\n".join(lines) + "\n"


def bench(**kw):
    return parse_bench_config(bench_text(**kw))


_ACCEPTANCE = pytest.StashKey()


@pytest.fixture
def criterion(request):
    """``record(number, ok, detail)`` logs one acceptance line and returns ``ok``."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
