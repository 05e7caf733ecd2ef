"""Exception hierarchy shared across the simulator."""


class EonPlanError(Exception):
    """Base class for all simulator errors."""


class ParseError(EonPlanError):
    """A trace/topology file is malformed (message names the offending line or element)."""


class ValidationError(EonPlanError):
    """Parsed input violates a domain invariant (negative bit-rate, non-uniform timestamps, ...)."""


class DatasetSizeError(EonPlanError):
    """Not enough samples to build the requested window dataset or split."""


class NormalizationError(EonPlanError):
    """Normalizer cannot be fitted (degenerate min == max series)."""


class CoverageError(EonPlanError):
    """A predictions file does not cover the requested (source, epoch, step) horizon."""


class HorizonError(EonPlanError):
    """Requested epoch lies outside the simulated trace horizon."""


class ConfigError(EonPlanError):
    """Inconsistent or incomplete run configuration."""
