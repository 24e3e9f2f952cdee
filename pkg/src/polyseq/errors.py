"""Exception types shared across the package."""


class PolyseqError(Exception):
    """Base class for all package-specific errors."""


class DegeneratePolygon(PolyseqError):
    """Polygon has fewer than 3 distinct vertices or zero signed area."""


class DimensionMismatch(PolyseqError):
    """Two masks being compared do not share the same pixel dimensions."""


class EmptyEvaluation(PolyseqError):
    """An aggregate metric was requested over zero samples."""


class MalformedSequence(PolyseqError):
    """A token sequence violates the target-sequence grammar.

    Carries the offending token position and a human-readable reason.
    """

    def __init__(self, position: int, reason: str):
        super().__init__(f"token {position}: {reason}")
        self.position = position
        self.reason = reason


class OutOfRange(PolyseqError):
    """A normalized coordinate falls outside [0, 1]."""


class ShapeMismatch(PolyseqError):
    """A tensor argument does not match the configured dimensions."""


class AlignmentError(PolyseqError):
    """Per-position predictions are not aligned with the shifted targets."""


class NumericalFailure(PolyseqError):
    """A non-finite value appeared in a loss or gradient."""


class ConfigError(PolyseqError):
    """A configuration value is invalid or a constraint is unsatisfiable."""


class ParseError(PolyseqError):
    """An annotation or config file failed strict parsing.

    Carries the 1-based line number of the offending record.
    """

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason
