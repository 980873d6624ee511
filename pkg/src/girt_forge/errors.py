"""Shared exception hierarchy."""


class GirtForgeError(Exception):
    """Base class for all toolkit errors."""


class DataError(GirtForgeError):
    """Input data could not be parsed or violates a contract."""


class BackendUnavailable(GirtForgeError):
    """A remote backend could not be reached or timed out."""


class InvalidBackendOutput(GirtForgeError):
    """A remote backend answered, but its output is not a usable template."""

    def __init__(self, message: str, output: str = ""):
        super().__init__(message)
        self.output = output
