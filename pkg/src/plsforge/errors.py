"""Exception types shared across the package."""


class PlsForgeError(Exception):
    """Base class for every error raised by plsforge."""


class InvalidArgument(PlsForgeError, ValueError):
    pass


class InvalidInstance(PlsForgeError, ValueError):
    pass


class DimensionError(PlsForgeError, ValueError):
    pass


class NotAnEdge(PlsForgeError, KeyError):
    pass


class NotADag(PlsForgeError, ValueError):
    pass


class NotCanonical(PlsForgeError, ValueError):
    """A target solution does not have the shape a solution map expects."""


class ScaleTooSmall(PlsForgeError, ValueError):
    pass


class TooLarge(PlsForgeError, ValueError):
    """An enumeration would exceed its hard cap."""


class StepCapExceeded(PlsForgeError, RuntimeError):
    """Dynamics hit the step cap; ``profile`` holds the last state reached."""

    def __init__(self, message, profile=None, trace=None):
        super().__init__(message)
        self.profile = profile
        self.trace = trace


class ParseError(PlsForgeError, ValueError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
