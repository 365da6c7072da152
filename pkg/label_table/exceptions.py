class InvalidLabelSpaceError(ValueError):
    """Raised when entity/relation type names violate the label-space rules."""


class InvalidAnnotationError(ValueError):
    """Raised when a sentence annotation breaks its invariants against a label space."""


class TableConsistencyError(RuntimeError):
    """Raised when rendering would put two different labels in one cell."""


class InvalidTensorError(ValueError):
    """Raised when a probability tensor has the wrong shape or invalid entries."""
