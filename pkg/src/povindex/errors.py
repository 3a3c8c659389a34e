"""Exception hierarchy with stable machine-readable codes.

The CLI maps categories to exit codes: data errors exit 2, inference errors
exit 3, configuration errors exit 4.
"""

from __future__ import annotations


class PovindexError(Exception):
    code = "ERROR"
    exit_code = 1


class DataError(PovindexError):
    """Problems with the input data itself (CSV contents, shapes)."""

    code = "DATA_ERROR"
    exit_code = 2


class NegativeIncome(DataError):
    code = "NEGATIVE_INCOME"

    def __init__(self, rows: list[int]):
        self.rows = list(rows)
        super().__init__(f"negative income in data row(s) {self.rows}")


class MalformedNumber(DataError):
    code = "MALFORMED_NUMBER"

    def __init__(self, rows: list[int]):
        self.rows = list(rows)
        super().__init__(f"unparseable income in data row(s) {self.rows}")


class MissingColumn(DataError):
    code = "MISSING_COLUMN"


class TooFewObservations(DataError):
    code = "TOO_FEW_OBSERVATIONS"


class InferenceError(PovindexError):
    """Estimation or interval construction cannot proceed on this sample."""

    code = "INFERENCE_ERROR"
    exit_code = 3


class NoPoorObservations(InferenceError):
    code = "NO_POOR_OBSERVATIONS"


class DegenerateSubsample(InferenceError):
    code = "DEGENERATE_SUBSAMPLE"


class Infeasible(InferenceError):
    """Zero lies outside the convex hull of the estimating values."""

    code = "INFEASIBLE"


class NonConvergence(InferenceError):
    """Dual-equation solver failed; indicates a bug, not a data problem."""

    code = "NON_CONVERGENCE"


class DegenerateInterval(InferenceError):
    """The feasible parameter window has collapsed (e.g. all poor incomes equal)."""

    code = "DEGENERATE_INTERVAL"


class ZeroPoorMass(InferenceError):
    """The distribution places (numerically) no mass at or below the poverty line."""

    code = "ZERO_POOR_MASS"


class ConfigError(PovindexError):
    code = "CONFIG_ERROR"
    exit_code = 4

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
