class OracleSizeError(ValueError):
    """Raised when the exhaustive oracle is asked to decode a sentence that is too long."""
