"""Exception hierarchy.

Everything the library raises on bad data or unsolvable queries derives from
:class:`DisturbanceError`, so callers (and the CLI) can separate domain
failures from programming errors.
"""


class DisturbanceError(Exception):
    """Base class for domain errors."""


class InvalidModel(DisturbanceError, ValueError):
    pass


class ThresholdUnreachable(DisturbanceError):
    """alpha * l_control <= l_hide: the response never drops to the threshold."""


class DegenerateModel(DisturbanceError):
    """l_control == l_hide: there is no response to invert."""


class TargetOutOfRange(DisturbanceError, ValueError):
    pass


class InsufficientData(DisturbanceError):
    pass


class AbscissaMismatch(DisturbanceError):
    pass


class EmptySample(DisturbanceError, ValueError):
    pass


class MissingGroup(DisturbanceError):
    pass


class UnitMismatch(DisturbanceError):
    pass


class SchemaError(DisturbanceError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"missing required column {column!r}")


class ParseError(DisturbanceError):
    def __init__(self, row, field, message):
        self.row = row
        self.field = field
        super().__init__(f"row {row}, field {field!r}: {message}")


class MixedUnits(DisturbanceError):
    pass


class EmptyInput(DisturbanceError):
    pass


class TimeDomainModel(DisturbanceError):
    pass


class Infeasible(DisturbanceError):
    pass
