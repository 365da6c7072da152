class EmptyCorpusError(ValueError):
    """Raised when training is asked to run without train or dev sentences."""


class TrainingDivergedError(ArithmeticError):
    """Raised when the training loss stops being finite."""
