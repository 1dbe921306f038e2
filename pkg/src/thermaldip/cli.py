"""Command-line front end.

::

    thermaldip dip --config bench.cfg --engine quantum --out dip.csv
    thermaldip hbt --config hbt.cfg --axis transverse --engine classical-mc --out hbt.csv
    thermaldip mz --config mz.cfg --out mz.csv
    thermaldip compare --config pulsed.cfg --out cmp.csv --threads 4

Exit status: 0 success, 2 configuration error, 3 runtime or numerical error.
"""

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .bench import (
    DIP_ENGINES,
    HBT_ENGINES,
    MZ_ENGINES,
    fit_dip,
    load_bench_config,
    run_dip_scan,
    run_hbt_scan,
    run_mach_zehnder,
)
from .correlators import TERM_NAMES, TERM_SIGNS
from .errors import ConfigError, FitError, InvalidInputError, ThermalDipError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# absolute floor for per-term comparisons; terms are normalised to O(1)
TERM_ATOL = 1e-9

_ENGINE_TAG_NAMES = {
    "quantum_analytic": "quantum_analytic",
    "classical_mc": "classical_mc",
    "classical_analytic": "classical_analytic",
}


def _num(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".9g")


class _Output:
    """Collects a CSV in memory and publishes it atomically."""

    def __init__(self, manifest):
        self.lines = [f"# {k}={v}" for k, v in manifest.items()]

    def header(self, *cols):
        self.lines.append(",".join(cols))

    def row(self, *values):
        self.lines.append(",".join(v if isinstance(v, str) else _num(v) for v in values))

    def text(self):
        return "\n".join(self.lines) + "\n"


def _publish(path, text):
    if path is None:
        sys.stdout.write(text)
        return
    tmp = f"{path}.part"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _manifest(command, cfg, engine_tag, extra=None):
    out = {
        "command": command,
        "config_hash": cfg.hash,
        "master_seed": cfg.mc.seed,
        "engine_tag": engine_tag,
        "tool_version": __version__,
    }
    if cfg.assumed:
        out["assumed"] = ";".join(sorted(cfg.assumed))
    out.update(extra or {})
    return out


def _fit_summary(result, **kw):
    try:
        fit = fit_dip(result, **kw)
    except (FitError, InvalidInputError) as exc:
        # a missing fit is reported, not fatal: flat classical curves are expected
        return {"error": str(exc)}
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in fit.__dict__.items()}


def _write_summary(args, manifest, payload, started):
    summary = dict(manifest, wall_time=round(time.perf_counter() - started, 6), **payload)
    text = json.dumps(summary, indent=2, sort_keys=True, default=float) + "\n"
    if args.out is None:
        sys.stderr.write(text)
    else:
        _publish(f"{args.out}.summary.json", text)


def _write_plot(args, columns, title):
    if not args.plot or args.out is None:
        return
    csv = os.path.basename(args.out)
    plots = ", ".join(
        f"'{csv}' using 1:{i + 2} with linespoints title '{name}'" for i, name in enumerate(columns)
    )
    script = (
        "set datafile separator ','\n"
        "set datafile commentschars '#'\n"
        f"set title '{title}'\n"
        "set key autotitle columnhead\n"
        f"plot {plots}\n"
    )
    _publish(f"{args.out}.gp", script)


def cmd_dip(args, cfg, started):
    result = run_dip_scan(cfg, engine=args.engine, threads=args.threads)
    manifest = _manifest("dip", cfg, result.engine_tag)
    out = _Output(manifest)
    out.header("delta_fs", "rate", "stderr", "n")
    for x, y, e, n in zip(result.grid / 1e-15, result.joint, result.stderr, result.n):
        out.row(x, y, e, n)
    _publish(args.out, out.text())
    tau_c = cfg.filter.tau_c
    payload = {
        "fit": _fit_summary(result),
        "fit_fixed_shape": _fit_summary(result, fixed_center=0.0, fixed_width=tau_c),
        "min_over_baseline": float(np.min(result.joint) / np.max(result.joint)),
    }
    _write_summary(args, manifest, payload, started)
    _write_plot(args, ["rate"], "coincidence rate vs delay")
    return EXIT_OK


def cmd_hbt(args, cfg, started):
    result = run_hbt_scan(cfg, axis=args.axis, engine=args.engine, threads=args.threads)
    manifest = _manifest("hbt", cfg, result.engine_tag, {"axis": result.axis})
    out = _Output(manifest)
    if result.axis == "transverse":
        out.header("dx_um", "g2", "stderr", "n")
        coords = result.grid / 1e-6
    else:
        out.header("delta_fs", "g2", "stderr", "n")
        coords = result.grid / 1e-15
    for x, y, e, n in zip(coords, result.joint, result.stderr, result.n):
        out.row(x, y, e, n)
    _publish(args.out, out.text())
    k = int(np.argmin(np.abs(result.grid)))
    payload = {"g2_at_zero": float(result.joint[k]), "stderr_at_zero": float(result.stderr[k]),
               "frozen": bool(result.extras.get("frozen", False))}
    _write_summary(args, manifest, payload, started)
    _write_plot(args, ["g2"], "HBT correlation")
    return EXIT_OK


def cmd_mz(args, cfg, started):
    result = run_mach_zehnder(cfg, engine=args.engine, threads=args.threads)
    manifest = _manifest("mz", cfg, result.engine_tag)
    out = _Output(manifest)
    out.header("delta_fs", "singles1", "singles2", "joint", "factorization_residual")
    resid = result.extras["factorization_residual"]
    for row in zip(result.grid / 1e-15, result.singles_1, result.singles_2, result.joint, resid):
        out.row(*row)
    _publish(args.out, out.text())
    payload = {
        "visibility": float(result.extras["visibility"]),
        "max_factorization_residual": float(np.max(resid)),
    }
    _write_summary(args, manifest, payload, started)
    _write_plot(args, ["singles1", "singles2", "joint"], "Mach-Zehnder fringes")
    return EXIT_OK


def cmd_compare(args, cfg, started):
    quantum = run_dip_scan(cfg, engine="quantum")
    ledger = run_dip_scan(cfg, engine="classical-ledger")
    mc = run_dip_scan(cfg, engine="classical-mc", threads=args.threads)
    manifest = _manifest("compare", cfg, "quantum_analytic;classical_analytic;classical_mc")
    out = _Output(manifest)
    out.header("delta_fs", "quantum", "classical_ledger", "classical_mc", "classical_mc_stderr", "n")
    for row in zip(quantum.grid / 1e-15, quantum.joint, ledger.joint, mc.joint, mc.stderr, mc.n):
        out.row(*row)

    book = _Output({"block": "term_ledger"})
    book.header("delta_fs", "term", "sign", "ledger", "mc", "mc_stderr", "z", "within_3sigma")
    terms, terms_err = mc.extras["terms"], mc.extras["terms_stderr"]
    n_ok = n_all = 0
    for j, (d, L) in enumerate(zip(ledger.grid, ledger.extras["ledgers"])):
        for i, name in enumerate(TERM_NAMES):
            diff = terms[i, j] - L.values[i]
            z = diff / terms_err[i, j] if terms_err[i, j] > 0 else (0.0 if diff == 0 else math.inf)
            ok = abs(diff) <= 3.0 * terms_err[i, j] + TERM_ATOL
            n_ok += ok
            n_all += 1
            book.row(d / 1e-15, name, "+" if TERM_SIGNS[i] > 0 else "-", L.values[i], terms[i, j],
                     terms_err[i, j], z, "true" if ok else "false")
        diff = mc.joint[j] - L.total
        ok = abs(diff) <= 3.0 * mc.stderr[j] + TERM_ATOL
        n_ok += ok
        n_all += 1
        book.row(d / 1e-15, "total", "", L.total, mc.joint[j], mc.stderr[j],
                 diff / mc.stderr[j], "true" if ok else "false")

    text = out.text() + book.text()
    _publish(args.out, text)
    tau_c = cfg.filter.tau_c
    payload = {
        "terms_within_3sigma": int(n_ok),
        "terms_compared": int(n_all),
        "fit_quantum": _fit_summary(quantum),
        "fit_classical_mc": _fit_summary(mc),
        "fit_classical_mc_fixed_shape": _fit_summary(mc, fixed_center=0.0, fixed_width=tau_c),
        "fit_classical_ledger": _fit_summary(ledger),
    }
    _write_summary(args, manifest, payload, started)
    _write_plot(args, ["quantum", "classical_ledger", "classical_mc"], "quantum vs classical")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="thermaldip", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, engines, default):
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--engine", choices=engines, default=default)
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--seed", type=_u64, metavar="U64", help="overrides [mc].seed")
        p.add_argument("--threads", type=_positive_int, default=1, metavar="N")
        p.add_argument("--plot", action="store_true", help="also write a gnuplot script next to --out")

    common(sub.add_parser("dip", help="anti-correlation dip scan"), DIP_ENGINES, "quantum")
    p = sub.add_parser("hbt", help="HBT temporal/spatial correlation")
    common(p, HBT_ENGINES, "quantum")
    p.add_argument("--axis", choices=("longitudinal", "transverse"))
    common(sub.add_parser("mz", help="Mach-Zehnder fringes with coincident tips"), MZ_ENGINES, "quantum")
    p = sub.add_parser("compare", help="quantum, classical ledger and classical MC side by side")
    common(p, ("all",), "all")
    return parser


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


_COMMANDS = {"dip": cmd_dip, "hbt": cmd_hbt, "mz": cmd_mz, "compare": cmd_compare}


def main(argv=None):
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = load_bench_config(args.config)
    except ConfigError as exc:
        print(f"thermaldip: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"thermaldip: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    try:
        return _COMMANDS[args.command](args, cfg, started)
    except ConfigError as exc:
        print(f"thermaldip: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ThermalDipError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"thermaldip: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
