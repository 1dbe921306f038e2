"""Exception hierarchy shared by every subsystem."""


class ThermalDipError(Exception):
    """Base class for all package errors."""


class ParameterError(ThermalDipError, ValueError):
    """An argument is outside its physical domain (non-positive time, gamma > 1, ...)."""


class InvalidInputError(ThermalDipError, ValueError):
    """Input data is inconsistent (Cauchy-Schwarz violation, empty grid, ...)."""


class UnsupportedRegimeError(ThermalDipError):
    """The requested calculation is only defined for mutually incoherent arms."""


class NumericalError(ThermalDipError, RuntimeError):
    """A numerical procedure failed to converge.

    ``diagnostics`` carries whatever the failing routine measured.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class FitError(NumericalError):
    """Least-squares dip fit did not converge."""


class ConfigError(ThermalDipError):
    """Bench configuration could not be parsed or failed validation."""

    def __init__(self, message, line=None, key_path=None):
        self.line = line
        self.key_path = key_path
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key_path:
            where.append(key_path)
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.reason = message
