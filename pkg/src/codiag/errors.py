"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operands have incompatible or non-square shapes."""


class SingularMatrixError(ValueError):
    """A matrix required to be invertible is numerically singular.

    Carries the offending smallest singular value so callers can report
    how far from invertible the input was.
    """

    def __init__(self, message, smallest=0.0, largest=0.0):
        super().__init__(message)
        self.smallest = float(smallest)
        self.largest = float(largest)


class NumericalFailure(RuntimeError):
    """An iterative kernel routine failed to converge, or a result that is
    guaranteed in exact arithmetic was lost to rounding."""


class ParseError(ValueError):
    """A matrix file is malformed. Message names the file and line."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = int(line)


class GenerationError(RuntimeError):
    """Instance generation exhausted its resampling budget."""


class MalformedCertificateError(ValueError):
    """A certificate references data outside the collection it claims
    to witness."""
