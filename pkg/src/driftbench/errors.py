"""Exception types shared across the package."""


class UsageError(Exception):
    """Bad configuration: unknown names, parameters out of domain."""


class DataFormatError(Exception):
    """Malformed input data (CSV parsing and schema problems)."""
