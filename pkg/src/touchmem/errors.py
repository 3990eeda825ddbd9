"""Exception types shared across the package."""


class ConfigError(Exception):
    """Invalid or inconsistent configuration (CLI exit code 2)."""


class DataError(Exception):
    """Invalid, empty, or mismatched data (CLI exit code 3)."""


class ProtocolError(Exception):
    """Malformed wire message on the live session socket."""
