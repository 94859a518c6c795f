"""Exception hierarchy shared by the library and the command line."""


class KGLabError(Exception):
    """Base class for all library errors."""


class FieldError(KGLabError, ValueError):
    """Malformed or inconsistent field data."""


class FieldFormatError(FieldError):
    """A field file could not be parsed (bad header, truncated payload)."""


class FieldSizeError(FieldFormatError):
    """Header lattice size disagrees with the declared value count."""


class SymbolError(KGLabError, ValueError):
    """A Fourier symbol evaluated to a non-finite value."""

    def __init__(self, message: str, xi=None):
        super().__init__(message)
        self.xi = xi


class SupportError(KGLabError, ValueError):
    """A field is nonzero where an inverse weight is undefined."""

    def __init__(self, message: str, site=None):
        super().__init__(message)
        self.site = site


class AdmissibilityError(KGLabError, ValueError):
    """An exponent triple violates the admissible or gap condition."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class SolverError(KGLabError, RuntimeError):
    """Base class for time-integration and fixed-point failures."""

    def __init__(self, message: str, trace=None, solution=None):
        super().__init__(message)
        self.trace = trace
        self.solution = solution


class PicardDivergenceError(SolverError):
    """Residuals grew for several consecutive Picard iterations."""


class PicardNotConvergedError(SolverError):
    """The iteration budget ran out before the tolerance was met."""


class EnergyDriftError(SolverError):
    """Splitting integrator energy drifted beyond the allowed fraction."""


class QuadratureError(KGLabError, RuntimeError):
    """A quadrature tail or band estimate exceeded its tolerance."""


class ConfigError(KGLabError, ValueError):
    """Scenario configuration failed validation; ``errors`` lists every violation."""

    def __init__(self, errors: list[str]):
        super().__init__("invalid configuration:\n  " + "\n  ".join(errors))
        self.errors = list(errors)


class BudgetExceededError(KGLabError, RuntimeError):
    """A scenario ran past its wall-clock budget."""
