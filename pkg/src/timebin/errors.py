"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so library code should raise
the most specific class that applies rather than bare ValueError when the
failure is a user-facing condition (bad config, resource limit, numerical
breakdown).
"""


class TimebinError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TimebinError):
    """Invalid scenario, graph document, schedule override, or CLI input."""


class GraphFormatError(ConfigError):
    """A graph document violates the schema; message carries field context."""


class ScheduleError(ConfigError):
    """A schedule request is inconsistent with the lattice it targets."""


class ResourceCapError(TimebinError):
    """Estimated memory or dense-path dimension exceeds the configured cap."""


class NumericalError(TimebinError):
    """A numerical procedure cannot certify its result."""


class BranchCutError(NumericalError):
    """A propagator eigenphase sits on the logarithm branch cut."""


class KrylovError(NumericalError):
    """Krylov propagation failed its residual test or broke down."""
