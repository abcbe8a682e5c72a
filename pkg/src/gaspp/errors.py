class InvalidInputError(ValueError):
    """An argument is non-finite, has the wrong length, or lies outside its domain."""


class InvalidStateError(ValueError):
    """A learner state is infeasible (strategy outside its simplex)."""


class UnsupportedShapeError(ValueError):
    """The operation is only defined for a different game shape."""


class UnsupportedCaseError(ValueError):
    """The 2x2 dynamics case does not admit the requested analysis."""


class ConfigError(ValueError):
    """An experiment configuration could not be parsed or validated.

    ``field`` names the offending key (dotted path) when known; ``line`` and
    ``column`` locate JSON syntax errors.
    """

    def __init__(self, message, field=None, line=None, column=None):
        super().__init__(message)
        self.field = field
        self.line = line
        self.column = column
