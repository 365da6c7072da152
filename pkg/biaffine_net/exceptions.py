class NumericError(ArithmeticError):
    """Raised when a forward pass produces non-finite values; names the failing stage."""

    def __init__(self, location):
        super().__init__(f"Non-finite values in {location}.")
        self.location = location


class ForwardStateError(RuntimeError):
    """Raised when backward is requested without a completed forward pass."""


class CheckpointFormatError(ValueError):
    """Raised when a checkpoint file is truncated, mislabelled or inconsistent."""
