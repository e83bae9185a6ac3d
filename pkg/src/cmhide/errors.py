"""Exception types shared across the package."""


class CmhideError(Exception):
    """Base class for all package errors."""


class EdgeListParseError(CmhideError, ValueError):
    """Raised on malformed edge-list input; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ConfigError(CmhideError, ValueError):
    """Invalid configuration value (weights, thresholds, unknown names)."""


class SingletonCommunityError(CmhideError, ValueError):
    """Target node sits alone in its community; it is trivially hidden."""
