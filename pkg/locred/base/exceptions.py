class LocredError(Exception):
    """Base class for errors raised by locred."""


class ConfigError(LocredError, ValueError):
    """Rejected input: mesh size, field resolution, geometry or configuration value."""


class SolverError(LocredError, RuntimeError):
    """A linear solve did not reach its residual contract or met an indefinite system."""


class ExtensionError(LocredError):
    """The enrichment vector is numerically contained in the reduced space."""


class OutputError(LocredError, OSError):
    """Writing a result file failed."""

    def __init__(self, path, reason):
        super().__init__(f"cannot write {path}: {reason}")
        self.path = path
