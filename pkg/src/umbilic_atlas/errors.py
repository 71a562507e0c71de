"""Exception hierarchy.

Validation errors map to CLI exit code 1, numerical failures to 2;
anything else that escapes is an internal error (3).
"""


class AtlasError(Exception):
    pass


class ValidationError(AtlasError):
    pass


class NumericalError(AtlasError):
    pass


class ExprError(ValidationError):
    """Expression problem carrying a source position."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class ExprSyntaxError(ExprError):
    pass


class ExprNameError(ExprError):
    pass


class ExprArityError(ExprError):
    pass


class EvalDomainError(NumericalError):
    """Math domain failure during evaluation (sqrt/log/div); evaluation
    aborts instead of propagating NaN."""

    def __init__(self, message, point=None):
        if point is not None:
            message = f"{message} at point {point}"
        super().__init__(message)
        self.point = point


class DegenerateMetricError(NumericalError):
    pass


class UmbilicPointError(NumericalError):
    """Operation requested at (or too close to) an umbilic point."""


class WindingError(NumericalError):
    """Angle tracking could not be made continuous or failed to snap."""
