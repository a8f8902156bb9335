"""Exception hierarchy shared across the package."""


class ReconError(Exception):
    """Base class for all reconlab errors."""


class DimensionError(ReconError, ValueError):
    """Vector/matrix dimensions are inconsistent."""


class AlistFormatError(ReconError, ValueError):
    """Malformed alist text; carries the offending 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DistributionError(ReconError, ValueError):
    """Degree distribution is inconsistent or infeasible."""


class ConfigError(ReconError, ValueError):
    """Bad configuration key or value (reported with its key path)."""


class ModelDomainError(ReconError, ValueError):
    """Key-rate model left its physical domain (e.g. symplectic eigenvalue < 1)."""


class PeelLimitError(ReconError, RuntimeError):
    """Defensive cap on peeling work was exceeded."""
