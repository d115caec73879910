from typing import Optional


class EllShrinkError(ValueError):
    """Base class for every error raised by the toolkit"""


class DomainError(EllShrinkError):
    """A parameter lies outside its admissible range"""


class NotSymmetric(EllShrinkError):
    pass


class NotPositiveDefinite(EllShrinkError):
    pass


class DimensionMismatch(EllShrinkError):
    pass


class NonFiniteData(EllShrinkError):
    pass


class DegenerateDenominator(EllShrinkError):
    pass


class DimensionTooLarge(EllShrinkError):
    pass


class ZeroNormRow(EllShrinkError):
    def __init__(self, row_index: int):
        self.row_index = row_index
        super().__init__(f"Row {row_index} has zero Euclidean norm")

    def __reduce__(self):
        return (ZeroNormRow, (self.row_index,))


class ZeroVarianceColumn(EllShrinkError):
    def __init__(self, column_index: int):
        self.column_index = column_index
        super().__init__(f"Column {column_index} has zero second sample moment")

    def __reduce__(self):
        return (ZeroVarianceColumn, (self.column_index,))


class ScenarioConfigError(EllShrinkError):
    """Scenario document cannot be parsed or validated"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class DataParseError(EllShrinkError):
    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        self.row = row
        self.column = column
        where = ""
        if row is not None:
            where = f" (row {row}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{where}")


class TrialError(EllShrinkError):
    """An estimator failed inside a Monte Carlo trial"""

    def __init__(self, scenario: str, n: int, trial: int, cause: Exception):
        self.scenario = scenario
        self.n = n
        self.trial = trial
        self.cause = cause
        super().__init__(f"Scenario '{scenario}', n={n}, trial {trial}: {cause}")

    def __reduce__(self):
        return (TrialError, (self.scenario, self.n, self.trial, self.cause))


class BenchIOError(EllShrinkError):
    def __init__(self, path, cause: Exception):
        self.path = str(path)
        super().__init__(f"Cannot write '{path}': {cause}")
