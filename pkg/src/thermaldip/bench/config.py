"""Bench configuration: a small line-oriented INI-like grammar.

Example::

    [source]
    emission = pulsed      # cw | pulsed
    pulse_fwhm_fs = 200

    [filter]
    tau_c_fs = 345

    [geometry]
    tip_sep_lc = 40

    [scan]
    from_fs = -1500
    to_fs = 1500
    step_fs = 50

Values are stored in the units named by their key suffix so that
``parse(serialize(cfg)) == cfg`` holds exactly; SI views are properties.
"""

from dataclasses import dataclass, field, fields, replace
import hashlib
import math
import re

from ..errors import ConfigError

__all__ = [
    "BenchConfig",
    "SourceConfig",
    "FilterConfig",
    "GeometryConfig",
    "TopologyConfig",
    "ScanConfig",
    "CountingConfig",
    "MCConfig",
    "ImperfectionConfig",
    "parse_bench_config",
    "load_bench_config",
    "serialize_bench_config",
    "config_hash",
]

SPEED_OF_LIGHT = 299_792_458.0
MAX_SCAN_POINTS = 1_000_000

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_INTEGER = re.compile(r"^[+-]?\d+$")
_IDENT = re.compile(r"^[a-z][a-z0-9_]*$")
_SECTION = re.compile(r"^\[\s*([^\]]*?)\s*\]$")


@dataclass(frozen=True)
class SourceConfig:
    emission: str = "cw"
    pulse_fwhm_fs: float = 200.0
    rep_rate_mhz: float = 78.0
    diameter_mm: float = 4.5

    @property
    def pulse_fwhm(self):
        return self.pulse_fwhm_fs * 1e-15


@dataclass(frozen=True)
class FilterConfig:
    tau_c_fs: float = math.nan
    lambda0_nm: float = 800.0

    @property
    def tau_c(self):
        return self.tau_c_fs * 1e-15

    @property
    def wavelength(self):
        return self.lambda0_nm * 1e-9

    @property
    def omega0(self):
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.wavelength


@dataclass(frozen=True)
class GeometryConfig:
    d_a_mm: float = 200.0
    d_b_mm: float = 200.0
    tip_sep_lc: float = math.nan


@dataclass(frozen=True)
class TopologyConfig:
    bs2: bool = True


@dataclass(frozen=True)
class ScanConfig:
    """Scan range in fs (longitudinal) or um (transverse)."""

    axis: str = "longitudinal"
    start: float = math.nan
    stop: float = math.nan
    step: float = math.nan

    @property
    def unit_scale(self):
        return 1e-15 if self.axis == "longitudinal" else 1e-6

    @property
    def n_points(self):
        return int(round((self.stop - self.start) / self.step)) + 1


@dataclass(frozen=True)
class CountingConfig:
    integration_realizations: int | None = None


@dataclass(frozen=True)
class MCConfig:
    trials: int = 10_000
    seed: int = 0
    sub_sources: int | None = None


@dataclass(frozen=True)
class ImperfectionConfig:
    gamma: float = 1.0


@dataclass(frozen=True)
class BenchConfig:
    """Complete description of one simulated experiment."""

    source: SourceConfig = field(default_factory=SourceConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    counting: CountingConfig = field(default_factory=CountingConfig)
    mc: MCConfig = field(default_factory=MCConfig)
    imperfection: ImperfectionConfig = field(default_factory=ImperfectionConfig)
    # keys whose defaults are not backed by a measurement
    assumed: frozenset = field(default=frozenset(), compare=False)

    def with_seed(self, seed):
        return replace(self, mc=replace(self.mc, seed=int(seed)))

    @property
    def hash(self):
        return config_hash(self)


# key -> (attribute, kind); kind in {"float", "int", "opt_int", "bool", enum tuple}
_KEYS = {
    "source": {
        "emission": ("emission", ("cw", "pulsed")),
        "pulse_fwhm_fs": ("pulse_fwhm_fs", "float"),
        "rep_rate_mhz": ("rep_rate_mhz", "float"),
        "diameter_mm": ("diameter_mm", "float"),
    },
    "filter": {
        "tau_c_fs": ("tau_c_fs", "float"),
        "lambda0_nm": ("lambda0_nm", "float"),
    },
    "geometry": {
        "d_a_mm": ("d_a_mm", "float"),
        "d_b_mm": ("d_b_mm", "float"),
        "tip_sep_lc": ("tip_sep_lc", "float"),
    },
    "topology": {
        "bs2": ("bs2", "bool"),
    },
    "scan": {
        "axis": ("axis", ("longitudinal", "transverse")),
        "from_fs": ("start", "float"),
        "to_fs": ("stop", "float"),
        "step_fs": ("step", "float"),
        "from_um": ("start", "float"),
        "to_um": ("stop", "float"),
        "step_um": ("step", "float"),
    },
    "counting": {
        "integration_realizations": ("integration_realizations", "opt_int"),
    },
    "mc": {
        "trials": ("trials", "int"),
        "seed": ("seed", "int"),
        "sub_sources": ("sub_sources", "opt_int"),
    },
    "imperfection": {
        "gamma": ("gamma", "float"),
    },
}
_SECTION_TYPES = {
    "source": SourceConfig,
    "filter": FilterConfig,
    "geometry": GeometryConfig,
    "topology": TopologyConfig,
    "scan": ScanConfig,
    "counting": CountingConfig,
    "mc": MCConfig,
    "imperfection": ImperfectionConfig,
}
REQUIRED_SECTIONS = ("source", "filter", "geometry", "scan")
_REQUIRED_KEYS = {
    "source": ("emission",),
    "filter": ("tau_c_fs",),
    "geometry": ("tip_sep_lc",),
}
_ASSUMED_DEFAULTS = {"filter.lambda0_nm"}


def _convert(kind, raw, line, path):
    if isinstance(kind, tuple):
        if raw not in kind:
            raise ConfigError(f"expected one of {', '.join(kind)}, got {raw!r}", line, path)
        return raw
    if kind == "bool":
        if raw not in ("true", "false"):
            raise ConfigError(f"expected true or false, got {raw!r}", line, path)
        return raw == "true"
    if not _NUMBER.match(raw):
        raise ConfigError(f"malformed number {raw!r}", line, path)
    if kind != "float" and _INTEGER.match(raw):
        # exact: 64-bit seeds do not survive a trip through float
        return int(raw)
    value = float(raw)
    if not math.isfinite(value):
        raise ConfigError(f"number out of range {raw!r}", line, path)
    if kind == "float":
        return value
    if value != int(value):
        raise ConfigError(f"expected an integer, got {raw!r}", line, path)
    return int(value)


def parse_bench_config(text):
    """Parse a bench document into a validated :class:`BenchConfig`.

    Raises
    ------
    ConfigError
        Unknown section or key, malformed value, missing section or key, or a
        violated invariant.  The error carries ``line`` and ``key_path``.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"document is not valid UTF-8: {exc}") from None
    values = {}
    lines = {}
    section = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1)
            if section not in _KEYS:
                raise ConfigError(f"unknown section [{section}]", lineno, f"[{section}]")
            if section in values:
                raise ConfigError(f"duplicate section [{section}]", lineno, f"[{section}]")
            values[section] = {}
            lines[section] = {"": lineno}
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if section is None:
            raise ConfigError("entry outside of any section", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        path = f"[{section}].{key}"
        if not _IDENT.match(key) or key not in _KEYS[section]:
            raise ConfigError(f"unknown key {key!r}", lineno, path)
        if not value:
            raise ConfigError("missing value", lineno, path)
        if key in values[section]:
            raise ConfigError("duplicate key", lineno, path)
        kind = _KEYS[section][key][1]
        values[section][key] = _convert(kind, value, lineno, path)
        lines[section][key] = lineno

    for name in REQUIRED_SECTIONS:
        if name not in values:
            raise ConfigError(f"missing required section [{name}]", None, f"[{name}]")
    return _build(values, lines)


def _build(values, lines):
    parts = {}
    assumed = set()
    for section, cls in _SECTION_TYPES.items():
        given = values.get(section, {})
        for key in _REQUIRED_KEYS.get(section, ()):
            if key not in given:
                raise ConfigError("missing required key", lines.get(section, {}).get(""), f"[{section}].{key}")
        kwargs = {}
        for key, value in given.items():
            kwargs[_KEYS[section][key][0]] = value
        if section == "scan":
            kwargs = _scan_kwargs(given, lines.get("scan", {}))
        for key in _KEYS[section]:
            if f"{section}.{key}" in _ASSUMED_DEFAULTS and key not in given:
                assumed.add(f"{section}.{key}")
        parts[section] = cls(**kwargs)
    cfg = BenchConfig(**parts, assumed=frozenset(assumed))
    _validate(cfg, lines)
    return cfg


def _scan_kwargs(given, lines):
    axis = given.get("axis", "longitudinal")
    unit = "fs" if axis == "longitudinal" else "um"
    other = "um" if unit == "fs" else "fs"
    for key in given:
        if key.endswith("_" + other):
            raise ConfigError(f"{axis} scans take *_{unit} keys", lines.get(key), f"[scan].{key}")
    kwargs = {"axis": axis}
    for stem, attr in (("from", "start"), ("to", "stop"), ("step", "step")):
        key = f"{stem}_{unit}"
        if key not in given:
            raise ConfigError("missing required key", lines.get(""), f"[scan].{key}")
        kwargs[attr] = given[key]
    return kwargs


def _validate(cfg, lines):
    def fail(section, key, message):
        line = lines.get(section, {}).get(key, lines.get(section, {}).get(""))
        raise ConfigError(message, line, f"[{section}].{key}")

    src, flt, geo, scan = cfg.source, cfg.filter, cfg.geometry, cfg.scan
    if src.pulse_fwhm_fs <= 0:
        fail("source", "pulse_fwhm_fs", "must be > 0")
    if src.rep_rate_mhz <= 0:
        fail("source", "rep_rate_mhz", "must be > 0")
    if src.diameter_mm <= 0:
        fail("source", "diameter_mm", "must be > 0")
    if flt.tau_c_fs <= 0:
        fail("filter", "tau_c_fs", "must be > 0")
    if flt.lambda0_nm <= 0:
        fail("filter", "lambda0_nm", "must be > 0")
    if geo.d_a_mm <= 0:
        fail("geometry", "d_a_mm", "must be > 0")
    if geo.d_b_mm <= 0:
        fail("geometry", "d_b_mm", "must be > 0")
    if geo.tip_sep_lc < 0:
        fail("geometry", "tip_sep_lc", "must be >= 0")
    unit = "fs" if scan.axis == "longitudinal" else "um"
    if scan.step <= 0:
        fail("scan", f"step_{unit}", "must be > 0")
    if scan.stop < scan.start:
        fail("scan", f"to_{unit}", "must be >= the scan start")
    if (scan.stop - scan.start) / scan.step > MAX_SCAN_POINTS:
        fail("scan", f"step_{unit}", f"scan would exceed {MAX_SCAN_POINTS} points")
    if cfg.counting.integration_realizations is not None and cfg.counting.integration_realizations < 1:
        fail("counting", "integration_realizations", "must be >= 1")
    if cfg.mc.trials < 1:
        fail("mc", "trials", "must be >= 1")
    if not 0 <= cfg.mc.seed < 2**64:
        fail("mc", "seed", "must be an unsigned 64-bit integer")
    if cfg.mc.sub_sources is not None and cfg.mc.sub_sources < 2:
        fail("mc", "sub_sources", "must be >= 2")
    if not 0.0 <= cfg.imperfection.gamma <= 1.0:
        fail("imperfection", "gamma", "must lie in [0, 1]")


def load_bench_config(path):
    with open(path, "rb") as fh:
        return parse_bench_config(fh.read())


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = repr(value)
        return text if _NUMBER.match(text) else f"{value:.17e}"
    return str(value)


def serialize_bench_config(cfg):
    """Normalised document: every key explicit, fixed order, exact floats."""
    out = []
    for section, cls in _SECTION_TYPES.items():
        part = getattr(cfg, section)
        out.append(f"[{section}]")
        if section == "scan":
            unit = "fs" if part.axis == "longitudinal" else "um"
            out.append(f"axis = {part.axis}")
            out.append(f"from_{unit} = {_fmt(part.start)}")
            out.append(f"to_{unit} = {_fmt(part.stop)}")
            out.append(f"step_{unit} = {_fmt(part.step)}")
        else:
            for key, (attr, _kind) in _KEYS[section].items():
                value = getattr(part, attr)
                if value is None:
                    continue
                out.append(f"{key} = {_fmt(value)}")
        out.append("")
    return "\n".join(out)


def config_hash(cfg):
    """SHA-256 (first 16 hex digits) of the normalised document."""
    return hashlib.sha256(serialize_bench_config(cfg).encode("utf-8")).hexdigest()[:16]
