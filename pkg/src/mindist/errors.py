"""Exception hierarchy shared by all modules.

Precondition failures subclass :class:`PreconditionError` (CLI exit code 2);
sketches that cannot have come from a valid curve raise
:class:`InconsistentSketchError` (CLI exit code 3).
"""


class MindistError(Exception):
    pass


class PreconditionError(MindistError, ValueError):
    """Input violates a documented precondition."""


class DimensionMismatchError(PreconditionError):
    pass


class DegenerateHyperplaneError(PreconditionError):
    pass


class DegenerateCircleError(PreconditionError):
    """Two identical circles have infinitely many common tangents."""


class RankDeficientError(PreconditionError):
    pass


class UnsupportedInputError(PreconditionError):
    """Input lies outside the class an algorithm can handle (e.g. a closed curve)."""


class InconsistentSketchError(MindistError, RuntimeError):
    """A sketch vector does not match any curve in the supported class."""
