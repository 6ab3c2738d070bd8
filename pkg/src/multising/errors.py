"""Shared exception types."""


class ParseError(ValueError):
    """Malformed input file; message carries a line number where possible."""


class CapacityError(ValueError):
    """Problem exceeds a hard size limit (hardware emulation or exact oracle)."""
