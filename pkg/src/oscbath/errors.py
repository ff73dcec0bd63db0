"""Exception types shared across the solvers."""


class ConfigError(ValueError):
    """Invalid scenario configuration or unsupported solver/bath pairing."""


class IntegrationError(RuntimeError):
    """Adaptive integrator could not meet its tolerance.

    Carries the time at which step-size control gave up.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class TruncationError(RuntimeError):
    """Truncated level basis is too small for the requested state/run."""
