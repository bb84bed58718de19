class MinttError(Exception):
    pass


class SeriesTooShortError(MinttError, ValueError):
    pass


class ComponentIndexError(MinttError, IndexError):
    pass


class EmptyInputError(MinttError, ValueError):
    pass


class DegenerateSeriesError(MinttError, ValueError):
    pass


class BandwidthError(MinttError, ValueError):
    pass


class DimensionMismatchError(MinttError, ValueError):
    pass


class UnknownModelError(MinttError, LookupError):
    pass


class UnknownTransformError(MinttError, LookupError):
    pass


class UnknownMethodError(MinttError, LookupError):
    pass


class NonFiniteTrajectoryError(MinttError, ArithmeticError):
    pass


class MisalignedCurvesError(MinttError, ValueError):
    pass


class NonPositiveValueError(MinttError, ValueError):
    pass


class ConfigError(MinttError, ValueError):
    pass


class CsvParseError(MinttError, ValueError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column
