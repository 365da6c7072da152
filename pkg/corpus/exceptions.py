class GenerationError(ValueError):
    """Raised when a generator configuration cannot produce valid sentences."""


class CorpusFormatError(ValueError):
    """Raised when a corpus, label-space or predictions file fails validation."""


class TensorFormatError(ValueError):
    """Raised when a tensor batch file is malformed or does not match the label space."""
